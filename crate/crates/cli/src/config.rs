//! Run configuration, read from TOML. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use detmodes::diagnostics::{GronwallOptions, DEFAULT_BURN_IN_FRACTION, DEFAULT_TAIL_FRACTION};
use detmodes::grashof::{ModeStrategy, DEFAULT_ORDERING_CUTOFF};
use detmodes::model::{
    preset_brusselator, preset_glycolysis, preset_gray_scott, DEFAULT_P5_SAMPLES,
};
use detmodes::{
    BasisConvention, ForcingSpec, InitialCondition, IntegratorConfig, ModeOrdering, ModelParams,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    /// Forcing of the perturbed twin; absent means an identical twin.
    #[serde(default)]
    pub twin_forcing: Option<TwinSection>,
    pub initial: InitialCondition,
    pub grid: GridSection,
    pub time: TimeSection,
    #[serde(default)]
    pub modes: ModesSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSection {
    GrayScott {
        f: f64,
        k: f64,
        d1: f64,
        d2: f64,
    },
    Brusselator {
        a: f64,
        b: f64,
        d1: f64,
        d2: f64,
    },
    Glycolysis {
        kappa: f64,
        delta: f64,
        d1: f64,
        d2: f64,
    },
    /// Coefficients given directly; forcing comes from `[forcing]`.
    Raw {
        d1: f64,
        d2: f64,
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
        gamma: f64,
        c1: f64,
        c2: f64,
        #[serde(default = "one")]
        natural_scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// Replacements for the model's own forcing terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    pub g1: Option<ForcingSpec>,
    pub g2: Option<ForcingSpec>,
}

/// Twin forcing. A larger forcing usually needs its own P5 constants.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwinSection {
    pub g1: Option<ForcingSpec>,
    pub g2: Option<ForcingSpec>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Retained modes per dimension, `K`.
    pub modes: usize,
    /// Collocation grid, default `2K`.
    pub n_eval: Option<usize>,
    #[serde(default)]
    pub convention: BasisConvention,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one_u64")]
    pub record_every: u64,
    #[serde(default = "one_u64")]
    pub sample_every: u64,
}

fn one_u64() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Auto {
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeCount {
    Fixed(usize),
    Auto(Auto),
}

impl Default for ModeCount {
    fn default() -> Self {
        Self::Auto(Auto::Auto)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSection {
    #[serde(default)]
    pub m: ModeCount,
    #[serde(default)]
    pub n: ModeCount,
    #[serde(default)]
    pub strategy: ModeStrategy,
    /// Ordering cutoff used when resolving `"auto"`.
    #[serde(default = "default_cutoff")]
    pub ordering_cutoff: usize,
}

fn default_cutoff() -> usize {
    DEFAULT_ORDERING_CUTOFF
}

impl Default for ModesSection {
    fn default() -> Self {
        Self {
            m: ModeCount::default(),
            n: ModeCount::default(),
            strategy: ModeStrategy::default(),
            ordering_cutoff: DEFAULT_ORDERING_CUTOFF,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Defaults to `1e-3 d λ_{M+1}`.
    pub epsilon: Option<f64>,
    /// Averaging window `T`.
    pub window: f64,
    pub burn_in_fraction: f64,
    /// Relative slack on `X ≤ envelope`.
    pub slack: f64,
    pub tol_low: f64,
    pub tol_high: f64,
    pub tail_fraction: f64,
    pub tol_pos: f64,
    pub p5_samples: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            epsilon: None,
            window: 10.0,
            burn_in_fraction: DEFAULT_BURN_IN_FRACTION,
            slack: GronwallOptions::default().slack,
            tol_low: 1e-8,
            tol_high: 1e-6,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            tol_pos: 1e-6,
            p5_samples: DEFAULT_P5_SAMPLES,
        }
    }
}

impl DiagnosticsSection {
    pub fn gronwall_options(&self) -> GronwallOptions {
        GronwallOptions {
            burn_in_fraction: self.burn_in_fraction,
            slack: self.slack,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Steps between checkpoints; 0 writes only the final state.
    pub checkpoint_every: u64,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            checkpoint_every: 0,
            svg: true,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Reference parameters with `[forcing]` applied.
    pub fn params(&self) -> Result<ModelParams, CliError> {
        let mut p = match self.model {
            ModelSection::GrayScott { f, k, d1, d2 } => preset_gray_scott(f, k, d1, d2),
            ModelSection::Brusselator { a, b, d1, d2 } => preset_brusselator(a, b, d1, d2),
            ModelSection::Glycolysis {
                kappa,
                delta,
                d1,
                d2,
            } => preset_glycolysis(kappa, delta, d1, d2),
            ModelSection::Raw {
                d1,
                d2,
                a1,
                a2,
                b1,
                b2,
                gamma,
                c1,
                c2,
                natural_scale,
            } => Ok(ModelParams {
                d1,
                d2,
                a1,
                a2,
                b1,
                b2,
                gamma,
                g1: ForcingSpec::zero(),
                g2: ForcingSpec::zero(),
                c1,
                c2,
                natural_scale,
                steady_state: None,
            }),
        }
        .map_err(|e| CliError::Validation(e.to_string()))?;
        if let Some(g) = &self.forcing.g1 {
            p.g1 = g.clone();
        }
        if let Some(g) = &self.forcing.g2 {
            p.g2 = g.clone();
        }
        Ok(p)
    }

    pub fn twin_params(&self, params: &ModelParams) -> ModelParams {
        let Some(t) = &self.twin_forcing else {
            return params.clone();
        };
        let mut twin = params.with_forcing(
            t.g1.clone().unwrap_or_else(|| params.g1.clone()),
            t.g2.clone().unwrap_or_else(|| params.g2.clone()),
        );
        if let Some(c1) = t.c1 {
            twin.c1 = c1;
        }
        if let Some(c2) = t.c2 {
            twin.c2 = c2;
        }
        twin
    }

    pub fn n_eval(&self) -> usize {
        self.grid.n_eval.unwrap_or(2 * self.grid.modes)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.time.dt,
            modes: self.grid.modes,
            n_eval: self.n_eval(),
            tol_pos: self.diagnostics.tol_pos,
            record_every: self.time.record_every,
        }
    }

    /// Ordering over the retained modes, used for the mode split.
    pub fn ordering(&self) -> ModeOrdering {
        ModeOrdering::with_convention(self.grid.modes, self.grid.convention)
    }

    /// Ordering used to resolve `"auto"` mode counts.
    pub fn grashof_ordering(&self) -> ModeOrdering {
        ModeOrdering::with_convention(self.modes.ordering_cutoff, self.grid.convention)
    }
}
