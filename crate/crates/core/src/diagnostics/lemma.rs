use ndarray::Zip;
use serde::{Deserialize, Serialize};

use super::twin::TwinRecord;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::{CosineTransform, GridField, ModeOrdering, SpectralField};

/// Below this `‖Q_Mξ‖ + ‖Q_Nη‖`, α is undefined.
pub const ZERO_DIFFERENCE_GUARD: f64 = 1e-14;

/// `|D|^{1/2}` and `|D|^{1/4}` on the unit square.
pub const AREA_SQRT: f64 = 1.0;
pub const AREA_QUARTER_ROOT: f64 = 1.0;

/// `A₂ = |D|^{1/2} Σ_j (|a_j| + |b_j|)`.
pub fn coefficient_a2(params: &ModelParams) -> f64 {
    AREA_SQRT * params.coefficient_sum()
}

/// `A₄ = |D|^{1/4} Σ_j (|a_j| + |b_j|)`.
pub fn coefficient_a4(params: &ModelParams) -> f64 {
    AREA_QUARTER_ROOT * params.coefficient_sum()
}

/// `ε = 10⁻³ d λ_{M+1}`.
pub fn default_epsilon(params: &ModelParams, m: usize, ordering: &ModeOrdering) -> Result<f64> {
    Ok(1e-3 * params.min_diffusion() * ordering.eigenvalue(m + 1)?)
}

/// Per-sample quantities of the mode-split energy argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSplitRecord {
    pub t: f64,
    pub p_xi_l4: f64,
    pub p_eta_l4: f64,
    pub q_xi_l2: f64,
    pub q_eta_l2: f64,
    pub grad_q_xi_l2: f64,
    pub grad_q_eta_l2: f64,
    pub k: f64,
    /// `None` when the Q-parts vanish.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub x: f64,
    pub h1_l2: f64,
    pub h2_l2: f64,
    /// β with the L⁸ fourth powers of the preceding nonlinear estimate.
    pub beta_l8: f64,
    pub q_xi_l4: f64,
    pub q_eta_l4: f64,
    pub v_l4: f64,
    pub ut_l4: f64,
    pub v_l8: f64,
    pub ut_l8: f64,
}

impl ModeSplitRecord {
    /// `‖Q_Mξ‖ + ‖Q_Nη‖`.
    pub fn q_sum(&self) -> f64 {
        self.q_xi_l2 + self.q_eta_l2
    }

    /// `‖P_Mξ‖_{L⁴} + ‖P_Nη‖_{L⁴}`.
    pub fn p_sum(&self) -> f64 {
        self.p_xi_l4 + self.p_eta_l4
    }

    /// `‖∇Q_Mξ‖ + ‖∇Q_Nη‖`.
    pub fn grad_sum(&self) -> f64 {
        self.grad_q_xi_l2 + self.grad_q_eta_l2
    }

    /// `2d (G/S)² + |K| / S²`, the integrand of the form-lemma hypothesis.
    pub fn form1_integrand(&self, d: f64) -> Option<f64> {
        let s = self.q_sum();
        (s >= ZERO_DIFFERENCE_GUARD).then(|| {
            let ratio = self.grad_sum() / s;
            2.0 * d * ratio * ratio + self.k.abs() / (s * s)
        })
    }
}

/// Evaluates K, α, β and the projection norms for fixed `(M, N, ε)`.
#[derive(Clone, Debug)]
pub struct LemmaEvaluator {
    params: ModelParams,
    ordering: ModeOrdering,
    m: usize,
    n: usize,
    epsilon: f64,
    transform: CosineTransform,
    fine: CosineTransform,
}

struct Fields {
    p_xi: SpectralField,
    q_xi: SpectralField,
    p_eta: SpectralField,
    q_eta: SpectralField,
}

impl LemmaEvaluator {
    /// `n_eval` must be at least `2 * modes` so the quartic integrands are
    /// integrated exactly. The L⁸ norms use a separate `4 * modes` grid.
    /// `ε = 0` is accepted; β is then infinite.
    pub fn new(
        params: &ModelParams,
        ordering: &ModeOrdering,
        modes: usize,
        n_eval: usize,
        m: usize,
        n: usize,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        if n_eval < 2 * modes {
            return Err(Error::Aliasing {
                order: 4,
                modes,
                grid: n_eval,
                required: 2 * modes,
            });
        }
        for (name, rank) in [("M", m), ("N", n)] {
            if rank == 0 || rank + 1 > ordering.len() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("rank {rank} needs 1 <= rank < {}", ordering.len()),
                });
            }
        }
        let epsilon = match epsilon {
            Some(e) => e,
            None => default_epsilon(params, m, ordering)?,
        };
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be finite and nonnegative, got {epsilon}"),
            });
        }
        Ok(Self {
            params: params.clone(),
            ordering: ordering.clone(),
            m,
            n,
            epsilon,
            transform: CosineTransform::new(modes, n_eval)?,
            fine: CosineTransform::new(modes, 4 * modes)?,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ordering(&self) -> &ModeOrdering {
        &self.ordering
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn check(&self, rec: &TwinRecord) -> Result<()> {
        let k = self.transform.modes();
        for f in [&rec.u, &rec.v, &rec.u_twin, &rec.v_twin] {
            if f.modes() != k {
                return Err(Error::ModeMismatch {
                    expected: k,
                    found: f.modes(),
                });
            }
        }
        Ok(())
    }

    fn fields(&self, rec: &TwinRecord) -> Result<Fields> {
        self.check(rec)?;
        let (p_xi, q_xi) = rec.xi().split(self.m, &self.ordering)?;
        let (p_eta, q_eta) = rec.eta().split(self.n, &self.ordering)?;
        Ok(Fields {
            p_xi,
            q_xi,
            p_eta,
            q_eta,
        })
    }

    fn grid(&self, f: &SpectralField) -> Result<GridField> {
        self.transform.to_physical(f)
    }

    /// `K_{M,N}` by quadrature on the collocation grid.
    fn k_from(&self, rec: &TwinRecord, q_xi: &GridField, q_eta: &GridField) -> Result<f64> {
        let p = &self.params;
        let v = self.grid(&rec.v)?;
        let vt = self.grid(&rec.v_twin)?;
        let ut = self.grid(&rec.u_twin)?;
        let mut sum = 0.0;
        Zip::from(q_xi.values())
            .and(q_eta.values())
            .and(v.values())
            .and(vt.values())
            .and(ut.values())
            .for_each(|&qx, &qe, &v, &vt, &ut| {
                let v2 = p.gamma * v * v;
                let cross = p.gamma * (v + vt) * ut;
                let first = (qx * (p.a1 - v2) + qe * (p.b1 - cross)) * qx;
                let second = (qx * (p.a2 + v2) + qe * (p.b2 + cross)) * qe;
                sum += first + second;
            });
        let cells = (q_xi.size() * q_xi.size()) as f64;
        Ok(-sum / cells)
    }

    /// Signed `K_{M,N}(t)`.
    pub fn compute_k(&self, rec: &TwinRecord) -> Result<f64> {
        let f = self.fields(rec)?;
        self.k_from(rec, &self.grid(&f.q_xi)?, &self.grid(&f.q_eta)?)
    }

    /// `K_{M,N}` for `γ = 0`, from spectral inner products only.
    pub fn compute_k_linear(&self, rec: &TwinRecord) -> Result<f64> {
        let f = self.fields(rec)?;
        let p = &self.params;
        Ok(-p.a1 * f.q_xi.l2_norm_sq()
            - (p.b1 + p.a2) * f.q_eta.inner(&f.q_xi)
            - p.b2 * f.q_eta.l2_norm_sq())
    }

    pub fn compute_alpha(&self, rec: &TwinRecord) -> Result<Option<f64>> {
        Ok(self.evaluate(rec)?.alpha)
    }

    pub fn compute_beta(&self, rec: &TwinRecord) -> Result<f64> {
        Ok(self.evaluate(rec)?.beta)
    }

    /// `α = 2d (G/S)² + 2|K|/S² - 2ε`, or `None` when `S` vanishes.
    pub fn alpha(&self, k: f64, s: f64, g: f64) -> Option<f64> {
        (s >= ZERO_DIFFERENCE_GUARD).then(|| {
            let d = self.params.min_diffusion();
            let ratio = g / s;
            2.0 * d * ratio * ratio + 2.0 * k.abs() / (s * s) - 2.0 * self.epsilon
        })
    }

    /// Right side of the bound on `|K| / S²`:
    /// `2 (γ‖v‖²_{L⁴} + γ‖ũ‖²_{L⁴} + A₂) G / S`.
    pub fn k_bound_rhs(&self, rec: &ModeSplitRecord) -> Option<f64> {
        let s = rec.q_sum();
        (s >= ZERO_DIFFERENCE_GUARD).then(|| {
            let g = self.params.gamma;
            2.0 * (g * rec.v_l4.powi(2) + g * rec.ut_l4.powi(2) + coefficient_a2(&self.params))
                * rec.grad_sum()
                / s
        })
    }

    /// All quantities of one twin record.
    pub fn evaluate(&self, rec: &TwinRecord) -> Result<ModeSplitRecord> {
        let f = self.fields(rec)?;
        let p = &self.params;
        let l4 = |g: &GridField| g.lp_norm(4.0);
        let q_xi_grid = self.grid(&f.q_xi)?;
        let q_eta_grid = self.grid(&f.q_eta)?;
        let k = self.k_from(rec, &q_xi_grid, &q_eta_grid)?;

        let p_xi_l4 = l4(&self.grid(&f.p_xi)?);
        let p_eta_l4 = l4(&self.grid(&f.p_eta)?);
        let v_l4 = l4(&self.grid(&rec.v)?);
        let ut_l4 = l4(&self.grid(&rec.u_twin)?);
        let v_l8 = self.fine.to_physical(&rec.v)?.lp_norm(8.0);
        let ut_l8 = self.fine.to_physical(&rec.u_twin)?.lp_norm(8.0);

        let q_xi_l2 = f.q_xi.l2_norm();
        let q_eta_l2 = f.q_eta.l2_norm();
        let grad_q_xi_l2 = f.q_xi.grad_norm_l2();
        let grad_q_eta_l2 = f.q_eta.grad_norm_l2();

        let gamma2 = p.gamma * p.gamma;
        let a4 = coefficient_a4(p);
        let p_part = p_xi_l4 * p_xi_l4 + p_eta_l4 * p_eta_l4;
        let h_part = (2.0 / self.epsilon) * (rec.h1_l2 * rec.h1_l2 + rec.h2_l2 * rec.h2_l2);
        let beta = (6.0 / self.epsilon)
            * p_part
            * (gamma2 * v_l4 * v_l4 + gamma2 * ut_l4 * ut_l4 + a4 * a4)
            + h_part;
        let beta_l8 = (6.0 / self.epsilon)
            * p_part
            * (gamma2 * v_l8.powi(4) + gamma2 * ut_l8.powi(4) + a4 * a4)
            + h_part;

        Ok(ModeSplitRecord {
            t: rec.t,
            p_xi_l4,
            p_eta_l4,
            q_xi_l2,
            q_eta_l2,
            grad_q_xi_l2,
            grad_q_eta_l2,
            k,
            alpha: self.alpha(k, q_xi_l2 + q_eta_l2, grad_q_xi_l2 + grad_q_eta_l2),
            beta,
            x: q_xi_l2 * q_xi_l2 + q_eta_l2 * q_eta_l2,
            h1_l2: rec.h1_l2,
            h2_l2: rec.h2_l2,
            beta_l8,
            q_xi_l4: l4(&q_xi_grid),
            q_eta_l4: l4(&q_eta_grid),
            v_l4,
            ut_l4,
            v_l8,
            ut_l8,
        })
    }
}
