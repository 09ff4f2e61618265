use crate::error::{Error, Result};
use crate::integrator::{Integrator, IntegratorConfig, PositivityWarning, SimulationState};
use crate::model::{validate_properties, ModelParams, DEFAULT_P5_SAMPLES};
use crate::spectral::SpectralField;

/// Both systems at one sample time.
#[derive(Clone, Debug)]
pub struct TwinRecord {
    pub t: f64,
    pub step: u64,
    pub u: SpectralField,
    pub v: SpectralField,
    pub u_twin: SpectralField,
    pub v_twin: SpectralField,
    /// `‖g1(t) - g̃1(t)‖_{L²}`.
    pub h1_l2: f64,
    pub h2_l2: f64,
}

impl TwinRecord {
    /// `ξ = u - ũ`.
    pub fn xi(&self) -> SpectralField {
        &self.u - &self.u_twin
    }

    /// `η = v - ṽ`.
    pub fn eta(&self) -> SpectralField {
        &self.v - &self.v_twin
    }
}

#[derive(Clone, Debug, Default)]
pub struct TwinTrajectory {
    pub records: Vec<TwinRecord>,
    /// Positivity warnings of the reference system, then of the twin.
    pub warnings: Vec<PositivityWarning>,
    pub twin_warnings: Vec<PositivityWarning>,
}

/// The reference system and its forcing-perturbed copy, stepped in lockstep.
pub struct TwinRunner {
    reference: Integrator,
    twin: Integrator,
}

impl TwinRunner {
    /// Checks that the two systems differ only in forcing and that neither
    /// fails a structural property. Undetermined P5 verdicts are accepted.
    pub fn new(
        params: &ModelParams,
        twin_params: &ModelParams,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        let same = params.d1 == twin_params.d1
            && params.d2 == twin_params.d2
            && params.a1 == twin_params.a1
            && params.a2 == twin_params.a2
            && params.b1 == twin_params.b1
            && params.b2 == twin_params.b2
            && params.gamma == twin_params.gamma;
        if !same {
            return Err(Error::InvalidParameter {
                name: "twin_params",
                reason: "the twin may differ from the reference only in its forcing".into(),
            });
        }
        for (label, p) in [("reference", params), ("twin", twin_params)] {
            let report = validate_properties(p, p.default_sample_box(), DEFAULT_P5_SAMPLES);
            if !report.passes() {
                let failed: Vec<String> =
                    report.failures().iter().map(|p| format!("{p:?}")).collect();
                return Err(Error::PropertyViolation(format!(
                    "{label} system fails {}",
                    failed.join(", ")
                )));
            }
        }
        Ok(Self {
            reference: Integrator::new(params, cfg)?,
            twin: Integrator::new(twin_params, cfg)?,
        })
    }

    pub fn reference(&self) -> &Integrator {
        &self.reference
    }

    pub fn twin(&self) -> &Integrator {
        &self.twin
    }

    fn record(&self, a: &SimulationState, b: &SimulationState) -> TwinRecord {
        let [g1, g2] = self.reference.forcing_at(a.t);
        let [g1t, g2t] = self.twin.forcing_at(b.t);
        TwinRecord {
            t: a.t,
            step: a.step,
            u: a.u.clone(),
            v: a.v.clone(),
            u_twin: b.u.clone(),
            v_twin: b.v.clone(),
            h1_l2: (&g1 - &g1t).l2_norm(),
            h2_l2: (&g2 - &g2t).l2_norm(),
        }
    }

    /// Runs both systems from the same initial state to `t_end`, passing a
    /// record to `observer` at the start and after every `sample_every`
    /// steps.
    pub fn run(
        &self,
        initial: &SimulationState,
        t_end: f64,
        sample_every: u64,
        mut observer: impl FnMut(&TwinRecord) -> Result<()>,
    ) -> Result<(Vec<PositivityWarning>, Vec<PositivityWarning>)> {
        if sample_every == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_every",
                reason: "must be at least 1".into(),
            });
        }
        let mut a = initial.clone();
        let mut b = initial.clone();
        let mut warnings = (Vec::new(), Vec::new());
        observer(&self.record(&a, &b))?;
        for _ in 0..self.reference.steps_until(a.t, t_end) {
            let sa = self.reference.step(&a)?;
            let sb = self.twin.step(&b)?;
            warnings.0.extend(sa.warning);
            warnings.1.extend(sb.warning);
            a = sa.state;
            b = sb.state;
            if a.step.is_multiple_of(sample_every) {
                observer(&self.record(&a, &b))?;
            }
        }
        Ok(warnings)
    }
}

/// Lockstep twin run collecting every sampled record.
pub fn run_twin(
    params: &ModelParams,
    twin_params: &ModelParams,
    cfg: &IntegratorConfig,
    initial: &SimulationState,
    t_end: f64,
    sample_every: u64,
) -> Result<TwinTrajectory> {
    let runner = TwinRunner::new(params, twin_params, cfg)?;
    let mut records = Vec::new();
    let (warnings, twin_warnings) = runner.run(initial, t_end, sample_every, |r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok(TwinTrajectory {
        records,
        warnings,
        twin_warnings,
    })
}
