//! Nondimensional constants of the mode-count theorem and the search for
//! mode pairs satisfying it.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{coefficient_a2, coefficient_a4, window_average, AREA_SQRT};
use crate::error::Result;
use crate::model::{ForcingSpec, ModelParams};
use crate::spectral::ModeOrdering;

/// Cutoff of the ordering used when none is supplied. Ranks cover
/// eigenvalues up to `π² · 256²`.
pub const DEFAULT_ORDERING_CUTOFF: usize = 256;

/// `limsup ‖g(t)‖²_{L²}`: the decaying part drops out.
pub fn forcing_gstar(g: &ForcingSpec) -> f64 {
    g.base_l2_sq()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeStrategy {
    /// Smallest `M = N`.
    #[default]
    Balanced,
    /// Smallest `M + N`; ties go to the most balanced pair.
    MinSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum MinimalModes {
    Feasible {
        #[serde(rename = "M")]
        m: usize,
        #[serde(rename = "N")]
        n: usize,
    },
    /// No pair inside the ordering reaches `required_lambda_sum`.
    InfeasibleAtCutoff {
        required_lambda_sum: f64,
        max_lambda_sum: f64,
        cutoff: usize,
    },
}

impl MinimalModes {
    pub fn pair(&self) -> Option<(usize, usize)> {
        match *self {
            Self::Feasible { m, n } => Some((m, n)),
            Self::InfeasibleAtCutoff { .. } => None,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrashofReport {
    pub g1_star: f64,
    pub g2_star: f64,
    pub c1: f64,
    pub gamma: f64,
    pub F: f64,
    pub d: f64,
    pub lambda1: f64,
    pub Gr: f64,
    pub A2: f64,
    pub A4: f64,
    pub B2: f64,
    /// `2γ²d²Gr⁴ + Gr`.
    pub threshold_rhs: f64,
    /// `2γ²λ₁d²Gr⁴ + λ₁Gr`, compared against `λ_{M+1} + λ_{N+1}` directly.
    pub threshold_lambda: f64,
    pub minimal_MN: MinimalModes,
    /// `None` when no feasible pair exists.
    pub minimal_T: Option<f64>,
}

impl GrashofReport {
    /// `λ₁ · threshold_rhs`, the level the eigenvalue sum must exceed.
    pub fn required_lambda_sum(&self) -> f64 {
        self.lambda1 * self.threshold_rhs
    }

    /// The theorem's strict inequality for `(M, N)`.
    pub fn admits(&self, m: usize, n: usize, ordering: &ModeOrdering) -> Result<bool> {
        let sum = ordering.eigenvalue(m + 1)? + ordering.eigenvalue(n + 1)?;
        Ok(sum / self.lambda1 > self.threshold_rhs)
    }
}

/// Report with the default ordering and the balanced strategy.
pub fn compute_grashof(params: &ModelParams) -> GrashofReport {
    compute_grashof_with(
        params,
        &ModeOrdering::new(DEFAULT_ORDERING_CUTOFF),
        ModeStrategy::Balanced,
    )
}

pub fn compute_grashof_with(
    params: &ModelParams,
    ordering: &ModeOrdering,
    strategy: ModeStrategy,
) -> GrashofReport {
    let g1_star = forcing_gstar(&params.g1);
    let g2_star = forcing_gstar(&params.g2);
    let a2 = coefficient_a2(params);
    let b2 = params.c1 * AREA_SQRT;
    let f = params.c1 + g1_star + g2_star + a2 * a2 + b2;
    let d = params.min_diffusion();
    let lambda1 = ordering.lambda1();
    let gr = f / (d * d * lambda1);
    let gr4 = gr.powi(4);
    let g2 = params.gamma * params.gamma;
    let mut report = GrashofReport {
        g1_star,
        g2_star,
        c1: params.c1,
        gamma: params.gamma,
        F: f,
        d,
        lambda1,
        Gr: gr,
        A2: a2,
        A4: coefficient_a4(params),
        B2: b2,
        threshold_rhs: 2.0 * g2 * d * d * gr4 + gr,
        threshold_lambda: 2.0 * g2 * lambda1 * d * d * gr4 + lambda1 * gr,
        minimal_MN: MinimalModes::InfeasibleAtCutoff {
            required_lambda_sum: f64::NAN,
            max_lambda_sum: f64::NAN,
            cutoff: ordering.cutoff(),
        },
        minimal_T: None,
    };
    report.minimal_MN = minimal_modes(&report, ordering, strategy);
    report.minimal_T = report
        .minimal_MN
        .pair()
        .and_then(|(m, n)| minimal_t(&report, m, n, ordering));
    report
}

/// Smallest mode pair with `(λ_{M+1} + λ_{N+1}) / λ₁ > 2γ²d²Gr⁴ + Gr`.
pub fn minimal_modes(
    report: &GrashofReport,
    ordering: &ModeOrdering,
    strategy: ModeStrategy,
) -> MinimalModes {
    let lambdas: Vec<f64> = ordering.iter().map(|w| w.eigenvalue()).collect();
    // M ranges over 1..len so that λ_{M+1} exists
    let top = lambdas.len().saturating_sub(1);
    let admits =
        |m: usize, n: usize| (lambdas[m] + lambdas[n]) / report.lambda1 > report.threshold_rhs;
    let infeasible = MinimalModes::InfeasibleAtCutoff {
        required_lambda_sum: report.required_lambda_sum(),
        max_lambda_sum: lambdas.last().map_or(0.0, |l| 2.0 * l),
        cutoff: ordering.cutoff(),
    };
    if top == 0 || !admits(top, top) {
        return infeasible;
    }
    // λ is nondecreasing in rank, so admissibility is monotone in each index
    let first_n = |m: usize| -> Option<usize> {
        if !admits(m, top) {
            return None;
        }
        let (mut lo, mut hi) = (1, top);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if admits(m, mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    };
    let balanced = {
        let (mut lo, mut hi) = (1, top);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if admits(mid, mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    };
    match strategy {
        ModeStrategy::Balanced => MinimalModes::Feasible {
            m: balanced,
            n: balanced,
        },
        ModeStrategy::MinSum => {
            let mut best = (2 * balanced, 0usize, balanced, balanced);
            for m in 1..=top {
                if m > best.0 {
                    break;
                }
                if let Some(n) = first_n(m) {
                    let key = (m + n, m.abs_diff(n), m, n);
                    if key < best {
                        best = key;
                    }
                }
            }
            MinimalModes::Feasible {
                m: best.2,
                n: best.3,
            }
        }
    }
}

/// `d Gr⁴ / (λ_{M+1} + λ_{N+1} - 2γ²λ₁d²Gr⁴ - λ₁Gr)`, or `None` when the
/// denominator is not positive.
pub fn minimal_t(
    report: &GrashofReport,
    m: usize,
    n: usize,
    ordering: &ModeOrdering,
) -> Option<f64> {
    let sum = ordering.eigenvalue(m + 1).ok()? + ordering.eigenvalue(n + 1).ok()?;
    let den = sum - report.threshold_lambda;
    if den <= 0.0 {
        return None;
    }
    Some(report.d * report.Gr.powi(4) / den)
}

/// `γ²(d/T + 2λ₁d²)Gr⁴ + λ₁Gr`, the quantity the final step of the
/// argument requires to be below `λ_{M+1} + λ_{N+1}`.
pub fn combined_threshold(report: &GrashofReport, window: f64) -> f64 {
    let g2 = report.gamma * report.gamma;
    let d = report.d;
    g2 * (d / window + 2.0 * report.lambda1 * d * d) * report.Gr.powi(4)
        + report.lambda1 * report.Gr
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeAverageCheck {
    pub window: f64,
    /// `(1/d²) limsup (1/T) ∫ ‖u‖⁴_{L⁴}`.
    pub lhs_u: f64,
    pub lhs_v: f64,
    /// `(d/(2T) + λ₁d²) Gr⁴`.
    pub rhs: f64,
    pub margin_u: f64,
    pub margin_v: f64,
    pub holds: bool,
}

/// Finite-horizon check of the time-averaged L⁴ bounds from samples of
/// `‖u‖_{L⁴}` and `‖v‖_{L⁴}`.
pub fn verify_time_average_bounds(
    times: &[f64],
    u_l4: &[f64],
    v_l4: &[f64],
    window: f64,
    report: &GrashofReport,
    burn_in_fraction: f64,
) -> Result<TimeAverageCheck> {
    let d2 = report.d * report.d;
    let upper = |norms: &[f64]| -> Result<f64> {
        let quartic: Vec<f64> = norms.iter().map(|x| x.powi(4)).collect();
        Ok(window_average(times, &quartic, window, burn_in_fraction)?.upper / d2)
    };
    let lhs_u = upper(u_l4)?;
    let lhs_v = upper(v_l4)?;
    let rhs = (report.d / (2.0 * window) + report.lambda1 * d2) * report.Gr.powi(4);
    Ok(TimeAverageCheck {
        window,
        lhs_u,
        lhs_v,
        rhs,
        margin_u: rhs - lhs_u,
        margin_v: rhs - lhs_v,
        holds: lhs_u <= rhs && lhs_v <= rhs,
    })
}
