//! Parameter sweeps: the cross product of a few axes applied to a template
//! run config, each cell run as an isolated twin experiment.

use std::fs;
use std::path::{Path, PathBuf};

use detmodes::diagnostics::fmt_f64;
use rayon::prelude::*;
use serde::Deserialize;
use toml::{Table, Value};

use crate::commands::{cmd_grashof, cmd_twin};
use crate::config::RunConfig;
use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub sweep: SweepSection,
    /// A run config; axis keys are dotted paths into it.
    pub template: Table,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Defaults to the template's output directory.
    pub directory: Option<PathBuf>,
    pub axes: Vec<Axis>,
}

fn one() -> usize {
    1
}

fn default_cap() -> usize {
    256
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub key: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub cell: usize,
    pub values: Vec<Value>,
    pub gr: Option<f64>,
    pub minimal: Option<(usize, usize)>,
    pub modes: Option<(usize, usize)>,
    pub verdict: Option<String>,
    pub error: Option<String>,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let spec: Self = toml::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.sweep.workers == 0 {
            return Err(CliError::Parse("sweep.workers must be at least 1".into()));
        }
        if self.sweep.axes.iter().any(|a| a.values.is_empty()) {
            return Err(CliError::Parse(
                "every sweep axis needs at least one value".into(),
            ));
        }
        let size = self.size();
        if size > self.sweep.cap {
            return Err(CliError::Parse(format!(
                "sweep has {size} cells, above sweep.cap = {}",
                self.sweep.cap
            )));
        }
        // a template that cannot parse would fail every cell identically
        self.cell_config(&self.cell_values(0))?;
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.sweep.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of a cell; the last axis varies fastest.
    pub fn cell_values(&self, cell: usize) -> Vec<Value> {
        let mut rest = cell;
        let mut values = vec![Value::Boolean(false); self.sweep.axes.len()];
        for (i, axis) in self.sweep.axes.iter().enumerate().rev() {
            values[i] = axis.values[rest % axis.values.len()].clone();
            rest /= axis.values.len();
        }
        values
    }

    pub fn cell_config(&self, values: &[Value]) -> Result<RunConfig, CliError> {
        let mut table = self.template.clone();
        for (axis, value) in self.sweep.axes.iter().zip(values) {
            set_path(&mut table, &axis.key, value.clone())?;
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Parse(format!("template: {e}")))
    }

    pub fn root(&self) -> Result<PathBuf, CliError> {
        match &self.sweep.directory {
            Some(d) => Ok(d.clone()),
            None => Ok(self.cell_config(&self.cell_values(0))?.output.directory),
        }
    }
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Parse(format!("sweep axis {key}: {p} is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn run_cell(spec: &SweepSpec, cell: usize, dir: &Path) -> SweepRow {
    let values = spec.cell_values(cell);
    let mut row = SweepRow {
        cell,
        values: values.clone(),
        gr: None,
        minimal: None,
        modes: None,
        verdict: None,
        error: None,
    };
    let cfg = match spec.cell_config(&values) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    if let Ok(g) = cmd_grashof(&cfg) {
        row.gr = Some(g.Gr);
        row.minimal = g.minimal_MN.pair();
    }
    match cmd_twin(&cfg, dir) {
        Ok(outcome) => {
            row.modes = Some((outcome.verdict.m, outcome.verdict.n));
            row.verdict = serde_json::to_value(outcome.verdict.determining.verdict)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned));
            row.error = outcome.gronwall.err().map(|e| format!("gronwall: {e}"));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Float(x) => fmt_f64(*x),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs every cell on a pool of `sweep.workers` threads and writes
/// `summary.csv` under the sweep root. Cell failures become rows.
pub fn cmd_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    let root = spec.root()?;
    fs::create_dir_all(&root)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.sweep.workers)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        (0..spec.size())
            .into_par_iter()
            .map(|cell| run_cell(spec, cell, &root.join(format!("cell-{cell:04}"))))
            .collect()
    });

    let mut w = csv::Writer::from_path(root.join("summary.csv"))?;
    let mut header = vec!["cell".to_string()];
    header.extend(spec.sweep.axes.iter().map(|a| a.key.clone()));
    header.extend(
        [
            "Gr",
            "minimal_M",
            "minimal_N",
            "M",
            "N",
            "verdict",
            "status",
            "message",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in &rows {
        let mut rec = vec![r.cell.to_string()];
        rec.extend(r.values.iter().map(cell_text));
        rec.push(r.gr.map(fmt_f64).unwrap_or_default());
        rec.push(opt(r.minimal.map(|p| p.0)));
        rec.push(opt(r.minimal.map(|p| p.1)));
        rec.push(opt(r.modes.map(|p| p.0)));
        rec.push(opt(r.modes.map(|p| p.1)));
        rec.push(r.verdict.clone().unwrap_or_default());
        let failed = r.verdict.is_none();
        rec.push(if failed { "error" } else { "ok" }.to_string());
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(rows)
}
