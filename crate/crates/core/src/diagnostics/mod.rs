//! Twin experiment and the quantities of the determining-modes energy
//! argument: projection norms, `K_{M,N}`, `α`, `β`, `X`, sliding window
//! averages, the Gronwall envelope and the empirical verdict.

mod gronwall;
mod lemma;
mod twin;
mod verdict;
mod window;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use gronwall::{
    check_gronwall_samples, gamma_prime, gronwall_envelope, running_sup_abs, EnvelopeViolation,
    GronwallCheck, GronwallOptions, GronwallOutcome,
};
pub use lemma::{
    coefficient_a2, coefficient_a4, default_epsilon, LemmaEvaluator, ModeSplitRecord,
    AREA_QUARTER_ROOT, AREA_SQRT, ZERO_DIFFERENCE_GUARD,
};
pub use twin::{run_twin, TwinRecord, TwinRunner, TwinTrajectory};
pub use verdict::{
    determining_verdict, DeterminingOutcome, DeterminingVerdict, DEFAULT_TAIL_FRACTION,
};
pub use window::{defined_samples, window_average, WindowStats, DEFAULT_BURN_IN_FRACTION};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::ModeOrdering;

/// Mode-split records of one twin run with the `(M, N, ε)` they used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSplitSeries {
    pub m: usize,
    pub n: usize,
    pub epsilon: f64,
    pub records: Vec<ModeSplitRecord>,
}

pub const SERIES_COLUMNS: [&str; 21] = [
    "t",
    "p_xi_l4",
    "p_eta_l4",
    "q_xi_l2",
    "q_eta_l2",
    "grad_q_xi_l2",
    "grad_q_eta_l2",
    "k",
    "alpha",
    "beta",
    "x",
    "h1_l2",
    "h2_l2",
    "beta_l8",
    "q_xi_l4",
    "q_eta_l4",
    "v_l4",
    "ut_l4",
    "v_l8",
    "ut_l8",
    "form1",
];

/// Marker written in place of an undefined α.
pub const UNDEFINED: &str = "undefined-zero-difference";

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ModeSplitSeries {
    pub fn new(m: usize, n: usize, epsilon: f64) -> Self {
        Self {
            m,
            n,
            epsilon,
            records: Vec::new(),
        }
    }

    /// Evaluates every record of a stored twin trajectory.
    pub fn from_trajectory(evaluator: &LemmaEvaluator, traj: &TwinTrajectory) -> Result<Self> {
        let mut series = Self::new(evaluator.m(), evaluator.n(), evaluator.epsilon());
        for rec in &traj.records {
            series.records.push(evaluator.evaluate(rec)?);
        }
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&ModeSplitRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    pub fn alpha(&self) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.alpha).collect()
    }

    /// Writes the series as CSV; the form-lemma integrand uses diffusion `d`.
    pub fn write_csv<W: Write>(&self, mut w: W, d: f64) -> Result<()> {
        writeln!(w, "{}", SERIES_COLUMNS.join(","))?;
        let opt = |x: Option<f64>| x.map_or_else(|| UNDEFINED.to_string(), fmt_f64);
        for r in &self.records {
            let cells = [
                fmt_f64(r.t),
                fmt_f64(r.p_xi_l4),
                fmt_f64(r.p_eta_l4),
                fmt_f64(r.q_xi_l2),
                fmt_f64(r.q_eta_l2),
                fmt_f64(r.grad_q_xi_l2),
                fmt_f64(r.grad_q_eta_l2),
                fmt_f64(r.k),
                opt(r.alpha),
                fmt_f64(r.beta),
                fmt_f64(r.x),
                fmt_f64(r.h1_l2),
                fmt_f64(r.h2_l2),
                fmt_f64(r.beta_l8),
                fmt_f64(r.q_xi_l4),
                fmt_f64(r.q_eta_l4),
                fmt_f64(r.v_l4),
                fmt_f64(r.ut_l4),
                fmt_f64(r.v_l8),
                fmt_f64(r.ut_l8),
                opt(r.form1_integrand(d)),
            ];
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn check_gronwall(&self, window: f64, options: GronwallOptions) -> Result<GronwallCheck> {
        check_gronwall_samples(
            &self.times(),
            &self.alpha(),
            &self.column(|r| r.beta),
            &self.column(|r| r.x),
            window,
            options,
        )
    }

    pub fn verdict(
        &self,
        tol_low: f64,
        tol_high: f64,
        tail_fraction: f64,
    ) -> Result<DeterminingVerdict> {
        determining_verdict(&self.records, tol_low, tol_high, tail_fraction)
    }

    /// Samples violating `|K|/S² ≤ 2(γ‖v‖²_{L⁴} + γ‖ũ‖²_{L⁴} + A₂) G/S`
    /// by more than `slack` (relative, with an absolute floor of `slack`).
    pub fn k_bound_violations(&self, evaluator: &LemmaEvaluator, slack: f64) -> Vec<KBoundSample> {
        self.k_bound_samples(evaluator)
            .into_iter()
            .filter(|s| s.lhs > s.rhs + slack * s.rhs.max(1.0))
            .collect()
    }

    /// Both sides of the K-bound at every sample with a defined ratio.
    pub fn k_bound_samples(&self, evaluator: &LemmaEvaluator) -> Vec<KBoundSample> {
        self.records
            .iter()
            .filter_map(|r| {
                let rhs = evaluator.k_bound_rhs(r)?;
                let s = r.q_sum();
                Some(KBoundSample {
                    t: r.t,
                    lhs: r.k.abs() / (s * s),
                    rhs,
                })
            })
            .collect()
    }

    /// Samples with `‖Qf‖²_{L⁴} > ‖Qf‖_{L²} ‖∇Qf‖_{L²} (1 + slack)` for
    /// `f = ξ` or `η`.
    pub fn ladyzhenskaya_violations(&self, slack: f64) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| {
                let bad = |l4: f64, l2: f64, g: f64| l4 * l4 > l2 * g * (1.0 + slack) + 1e-300;
                bad(r.q_xi_l4, r.q_xi_l2, r.grad_q_xi_l2)
                    || bad(r.q_eta_l4, r.q_eta_l2, r.grad_q_eta_l2)
            })
            .map(|r| r.t)
            .collect()
    }

    /// `(X(t+Δ) - X(t))/Δ + α(t) X(t) - β(t)` between consecutive samples
    /// with defined α. Positive values exceed the differential inequality.
    pub fn energy_residuals(&self) -> Vec<(f64, f64)> {
        self.records
            .windows(2)
            .filter_map(|w| {
                let alpha = w[0].alpha?;
                let dt = w[1].t - w[0].t;
                Some((w[0].t, (w[1].x - w[0].x) / dt + alpha * w[0].x - w[0].beta))
            })
            .collect()
    }

    /// Lower window average of the form-lemma integrand
    /// `2d (G/S)² + |K|/S²`.
    pub fn condition_form1(&self, d: f64, window: f64, burn_in_fraction: f64) -> Result<f64> {
        let values: Vec<Option<f64>> = self.records.iter().map(|r| r.form1_integrand(d)).collect();
        let (t, v) = defined_samples(&self.times(), &values);
        Ok(window_average(&t, &v, window, burn_in_fraction)?.lower)
    }

    /// `A₂²/d² + (γ²/d²) limsup (1/T)∫(‖v‖⁴_{L⁴} + ‖ũ‖⁴_{L⁴})` against
    /// `λ_{M+1} + λ_{N+1}`.
    pub fn condition_lambda_estimate(
        &self,
        params: &ModelParams,
        ordering: &ModeOrdering,
        window: f64,
        burn_in_fraction: f64,
    ) -> Result<LambdaEstimate> {
        let quartic = self.column(|r| r.v_l4.powi(4) + r.ut_l4.powi(4));
        let stats = window_average(&self.times(), &quartic, window, burn_in_fraction)?;
        let d = params.min_diffusion();
        let a2 = coefficient_a2(params);
        let lhs = a2 * a2 / (d * d) + params.gamma * params.gamma / (d * d) * stats.upper;
        let rhs = ordering.eigenvalue(self.m + 1)? + ordering.eigenvalue(self.n + 1)?;
        Ok(LambdaEstimate {
            lhs,
            rhs,
            satisfied: lhs < rhs,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBoundSample {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Streams a twin run through `evaluator` without storing the fields.
pub fn run_twin_series(
    runner: &TwinRunner,
    evaluator: &LemmaEvaluator,
    initial: &crate::integrator::SimulationState,
    t_end: f64,
    sample_every: u64,
) -> Result<ModeSplitSeries> {
    let mut series = ModeSplitSeries::new(evaluator.m(), evaluator.n(), evaluator.epsilon());
    runner.run(initial, t_end, sample_every, |rec| {
        series.records.push(evaluator.evaluate(rec)?);
        Ok(())
    })?;
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(series)
}
