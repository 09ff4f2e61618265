//! The experiment commands. Each writes its files into an output directory
//! and returns what the caller needs for exit codes and summaries.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use detmodes::diagnostics::{
    fmt_f64, run_twin_series, DeterminingVerdict, GronwallCheck, GronwallOutcome, LemmaEvaluator,
    ModeSplitSeries, TwinRunner,
};
use detmodes::grashof::{compute_grashof_with, GrashofReport};
use detmodes::model::Verdict;
use detmodes::{
    load_checkpoint, save_checkpoint, validate_properties, Error, Integrator, NormEvaluator,
    NormOrder, PositivityWarning, PropertyReport, SimulationState,
};
use serde::Serialize;

use crate::config::{ModeCount, RunConfig};
use crate::svg::{line_plot, Series};
use crate::CliError;

pub const TRAJECTORY_COLUMNS: [&str; 9] = [
    "t", "mean_u", "mean_v", "l2_u", "l2_v", "l4_u", "l4_v", "min_u", "min_v",
];

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes through a temporary file so an interrupted write never leaves a
/// truncated checkpoint behind.
fn write_checkpoint(path: &Path, state: &SimulationState, n_eval: usize) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let mut w = BufWriter::new(File::create(&tmp)?);
    save_checkpoint(&mut w, state, n_eval)?;
    w.flush()?;
    drop(w);
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<PropertyReport, CliError> {
    let params = cfg.params()?;
    Ok(validate_properties(
        &params,
        params.default_sample_box(),
        cfg.diagnostics.p5_samples,
    ))
}

/// One line per property, e.g. `P1 fails: d1 = 0, d2 = 1`.
pub fn format_report(report: &PropertyReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let verdict = match c.verdict {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined",
        };
        out.push_str(&format!("{:?} {verdict}: {}\n", c.property, c.note));
        if let Some(w) = &c.witness {
            out.push_str(&format!(
                "   witness u = {}, v = {}, x = {}, y = {}, t = {}, excess = {}\n",
                w.u, w.v, w.x, w.y, w.t, w.excess
            ));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateSummary {
    pub t: f64,
    pub step: u64,
    pub rows: usize,
    pub positivity_warnings: Vec<PositivityWarning>,
}

fn trajectory_row(
    integrator: &Integrator,
    norms: &NormEvaluator,
    s: &SimulationState,
) -> Result<String, CliError> {
    let (min_u, min_v) = integrator.minima(s)?;
    let row = [
        s.t,
        s.u.mean(),
        s.v.mean(),
        s.u.l2_norm(),
        s.v.l2_norm(),
        norms.norm(&s.u, NormOrder::L4)?,
        norms.norm(&s.v, NormOrder::L4)?,
        min_u,
        min_v,
    ];
    Ok(row
        .iter()
        .map(|&x| fmt_f64(x))
        .collect::<Vec<_>>()
        .join(","))
}

/// Integrates the reference system, writing `trajectory.csv`,
/// `checkpoint.bin` and `simulate.json` into `out`.
///
/// With `resume`, starts from that checkpoint; the rows written are then the
/// tail of the uninterrupted run's rows. On divergence the CSV written so far
/// and the last checkpoint are kept.
pub fn cmd_simulate(
    cfg: &RunConfig,
    out: &Path,
    resume: Option<&Path>,
) -> Result<SimulateSummary, CliError> {
    let params = cfg.params()?;
    let icfg = cfg.integrator();
    let integrator = Integrator::new(&params, &icfg)?;
    let norms = NormEvaluator::with_grid(icfg.modes, icfg.n_eval)?;
    let state = match resume {
        Some(path) => {
            let (state, n_eval) = load_checkpoint(File::open(path)?)?;
            if state.modes() != icfg.modes || n_eval != icfg.n_eval {
                return Err(Error::Checkpoint(format!(
                    "checkpoint holds K = {}, N_eval = {n_eval}; config has K = {}, N_eval = {}",
                    state.modes(),
                    icfg.modes,
                    icfg.n_eval
                ))
                .into());
            }
            state
        }
        None => cfg.initial.build(icfg.modes, icfg.n_eval)?,
    };

    fs::create_dir_all(out)?;
    let checkpoint = out.join("checkpoint.bin");
    let mut csv = BufWriter::new(File::create(out.join("trajectory.csv"))?);
    writeln!(csv, "{}", TRAJECTORY_COLUMNS.join(","))?;
    let mut rows = 0usize;
    if state.step % icfg.record_every == 0 {
        writeln!(csv, "{}", trajectory_row(&integrator, &norms, &state)?)?;
        rows += 1;
    }
    let every = cfg.output.checkpoint_every;
    let mut io_error = None;
    let result = integrator.run(state, cfg.time.t_end, |s| {
        let written = trajectory_row(&integrator, &norms, s).and_then(|row| {
            writeln!(csv, "{row}")?;
            if every > 0 && s.step % every == 0 {
                write_checkpoint(&checkpoint, s, icfg.n_eval)?;
            }
            Ok(())
        });
        match written {
            Ok(()) => {
                rows += 1;
                Ok(())
            }
            Err(e) => {
                io_error = Some(e);
                Err(Error::Checkpoint("output failed".into()))
            }
        }
    });
    csv.flush()?;
    if let Some(e) = io_error {
        return Err(e);
    }
    let outcome = result?;
    write_checkpoint(&checkpoint, &outcome.state, icfg.n_eval)?;
    let summary = SimulateSummary {
        t: outcome.state.t,
        step: outcome.state.step,
        rows,
        positivity_warnings: outcome.warnings,
    };
    write_json(&out.join("simulate.json"), &summary)?;
    Ok(summary)
}

pub fn cmd_grashof(cfg: &RunConfig) -> Result<GrashofReport, CliError> {
    let params = cfg.params()?;
    Ok(compute_grashof_with(
        &params,
        &cfg.grashof_ordering(),
        cfg.modes.strategy,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub samples: usize,
    #[serde(flatten)]
    pub determining: DeterminingVerdict,
}

#[derive(Debug)]
pub struct TwinOutcome {
    pub grashof: GrashofReport,
    pub verdict: VerdictReport,
    pub gronwall: detmodes::Result<GronwallCheck>,
}

/// Resolves `"auto"` counts from the Grashof report.
pub fn resolve_modes(cfg: &RunConfig, grashof: &GrashofReport) -> Result<(usize, usize), CliError> {
    let auto = grashof.minimal_MN.pair();
    let pick = |count: ModeCount, which: fn((usize, usize)) -> usize| match count {
        ModeCount::Fixed(k) => Ok(k),
        ModeCount::Auto(_) => auto.map(which).ok_or_else(|| {
            CliError::Runtime(Error::InvalidParameter {
                name: "modes",
                reason: format!(
                    "no admissible mode pair below ordering cutoff {}; raise modes.ordering_cutoff",
                    cfg.modes.ordering_cutoff
                ),
            })
        }),
    };
    let (m, n) = (pick(cfg.modes.m, |p| p.0)?, pick(cfg.modes.n, |p| p.1)?);
    let available = cfg.ordering().len();
    if m.max(n) + 1 > available {
        return Err(Error::InvalidParameter {
            name: "modes",
            reason: format!(
                "(M, N) = ({m}, {n}) needs more than the {available} modes retained at K = {}; raise grid.modes",
                cfg.grid.modes
            ),
        }
        .into());
    }
    Ok((m, n))
}

/// Runs the reference/twin pair and writes `series.csv`, `verdict.json`,
/// `grashof.json`, `gronwall.json` and the plots into `out`.
///
/// A Gronwall check that cannot run (for example a horizon shorter than the
/// window) is returned in `gronwall` after the other files are written.
pub fn cmd_twin(cfg: &RunConfig, out: &Path) -> Result<TwinOutcome, CliError> {
    let params = cfg.params()?;
    let twin = cfg.twin_params(&params);
    let grashof = compute_grashof_with(&params, &cfg.grashof_ordering(), cfg.modes.strategy);
    let (m, n) = resolve_modes(cfg, &grashof)?;
    let icfg = cfg.integrator();
    let runner = TwinRunner::new(&params, &twin, &icfg)?;
    let ordering = cfg.ordering();
    let evaluator = LemmaEvaluator::new(
        &params,
        &ordering,
        icfg.modes,
        icfg.n_eval,
        m,
        n,
        cfg.diagnostics.epsilon,
    )?;
    let initial = cfg.initial.build(icfg.modes, icfg.n_eval)?;
    let series = run_twin_series(
        &runner,
        &evaluator,
        &initial,
        cfg.time.t_end,
        cfg.time.sample_every,
    )?;

    fs::create_dir_all(out)?;
    let mut w = BufWriter::new(File::create(out.join("series.csv"))?);
    series.write_csv(&mut w, params.min_diffusion())?;
    w.flush()?;
    let d = &cfg.diagnostics;
    let determining = series.verdict(d.tol_low, d.tol_high, d.tail_fraction)?;
    let verdict = VerdictReport {
        m,
        n,
        epsilon: series.epsilon,
        samples: series.len(),
        determining,
    };
    write_json(&out.join("verdict.json"), &verdict)?;
    write_json(&out.join("grashof.json"), &grashof)?;

    let gronwall = series.check_gronwall(d.window, d.gronwall_options());
    if let Ok(check) = &gronwall {
        write_json(&out.join("gronwall.json"), check)?;
    }
    if cfg.output.svg {
        write_plots(out, &series, gronwall.as_ref().ok())?;
    }
    Ok(TwinOutcome {
        grashof,
        verdict,
        gronwall,
    })
}

fn write_plots(
    out: &Path,
    series: &ModeSplitSeries,
    check: Option<&GronwallCheck>,
) -> Result<(), CliError> {
    let t = series.times();
    let x = series.column(|r| r.x);
    let mut curves = vec![Series {
        label: "X",
        x: &t,
        y: &x,
    }];
    if let Some(GronwallCheck {
        outcome: GronwallOutcome::Applicable { envelope, .. },
        ..
    }) = check
    {
        curves.push(Series {
            label: "envelope",
            x: &t,
            y: envelope,
        });
    }
    fs::write(
        out.join("x_envelope.svg"),
        line_plot("X(t) against the Gronwall envelope", "t", &curves, true),
    )?;
    let q_xi = series.column(|r| r.q_xi_l2);
    let q_eta = series.column(|r| r.q_eta_l2);
    fs::write(
        out.join("q_norms.svg"),
        line_plot(
            "high-mode difference norms",
            "t",
            &[
                Series {
                    label: "|Q xi|_L2",
                    x: &t,
                    y: &q_xi,
                },
                Series {
                    label: "|Q eta|_L2",
                    x: &t,
                    y: &q_eta,
                },
            ],
            true,
        ),
    )?;
    Ok(())
}
