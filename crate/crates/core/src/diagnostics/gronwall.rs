use serde::{Deserialize, Serialize};

use super::window::{defined_samples, window_average};
use crate::error::{Error, Result};

/// `X(t) ≤ X₀ Γ′ e^{-ĝ t / (2T)} + (2 Γ′ T / ĝ) sup_{τ ≤ t} |β(τ)|`,
/// `Γ′ = e^{Γ̂ + 1 + ĝ/2}`, with `t` measured from `times[0]`.
///
/// `sup_beta[i]` is the running supremum up to `times[i]`.
pub fn gronwall_envelope(
    x0: f64,
    gronwall_gamma: f64,
    gamma_upper: f64,
    window: f64,
    sup_beta: &[f64],
    times: &[f64],
) -> Result<Vec<f64>> {
    if gronwall_gamma.is_nan() || gronwall_gamma <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gronwall_gamma",
            reason: format!("the lower window average must be positive, got {gronwall_gamma}"),
        });
    }
    if sup_beta.len() != times.len() {
        return Err(Error::InvalidParameter {
            name: "sup_beta",
            reason: format!("{} values for {} times", sup_beta.len(), times.len()),
        });
    }
    let gp = gamma_prime(gronwall_gamma, gamma_upper);
    let t0 = times.first().copied().unwrap_or(0.0);
    let offset = 2.0 * gp * window / gronwall_gamma;
    Ok(times
        .iter()
        .zip(sup_beta)
        .map(|(&t, &b)| x0 * gp * (-gronwall_gamma * (t - t0) / (2.0 * window)).exp() + offset * b)
        .collect())
}

/// `Γ′ = e^{Γ̂ + 1 + ĝ/2}`.
pub fn gamma_prime(gronwall_gamma: f64, gamma_upper: f64) -> f64 {
    (gamma_upper + 1.0 + 0.5 * gronwall_gamma).exp()
}

/// Running supremum of `|β|`.
pub fn running_sup_abs(beta: &[f64]) -> Vec<f64> {
    beta.iter()
        .scan(0.0f64, |acc, &b| {
            *acc = acc.max(b.abs());
            Some(*acc)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeViolation {
    pub t: f64,
    pub x: f64,
    pub envelope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallOptions {
    pub burn_in_fraction: f64,
    /// Relative tolerance on `X ≤ envelope`.
    pub slack: f64,
}

impl Default for GronwallOptions {
    fn default() -> Self {
        Self {
            burn_in_fraction: super::window::DEFAULT_BURN_IN_FRACTION,
            slack: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GronwallOutcome {
    Applicable {
        gamma_prime: f64,
        envelope: Vec<f64>,
        violations: Vec<EnvelopeViolation>,
    },
    /// The lower window average of α is not positive.
    NotApplicable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallCheck {
    pub window: f64,
    /// Lower window average of α, `ĝ`.
    pub gronwall_gamma: f64,
    /// Upper window average of `α⁻`, `Γ̂`.
    pub gamma_upper: f64,
    pub horizon: f64,
    pub outcome: GronwallOutcome,
}

impl GronwallCheck {
    pub fn violations(&self) -> &[EnvelopeViolation] {
        match &self.outcome {
            GronwallOutcome::Applicable { violations, .. } => violations,
            GronwallOutcome::NotApplicable { .. } => &[],
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self.outcome, GronwallOutcome::Applicable { .. })
    }
}

/// Estimates `ĝ` and `Γ̂` from the defined α samples, builds the envelope
/// from `X(times[0])` and flags every sample with `X > envelope (1 + slack)`.
pub fn check_gronwall_samples(
    times: &[f64],
    alpha: &[Option<f64>],
    beta: &[f64],
    x: &[f64],
    window: f64,
    options: GronwallOptions,
) -> Result<GronwallCheck> {
    if times.is_empty() {
        return Err(Error::EmptySeries);
    }
    if alpha.len() != times.len() || beta.len() != times.len() || x.len() != times.len() {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: "alpha, beta and x must have one value per sample time".into(),
        });
    }
    let (at, av) = defined_samples(times, alpha);
    if at.len() < 2 {
        // X vanishes wherever α is undefined; only the horizon is checked
        let stats = window_average(
            times,
            &vec![0.0; times.len()],
            window,
            options.burn_in_fraction,
        )?;
        return Ok(GronwallCheck {
            window,
            gronwall_gamma: 0.0,
            gamma_upper: 0.0,
            horizon: stats.horizon,
            outcome: GronwallOutcome::NotApplicable {
                reason: format!(
                    "alpha is defined at {} of {} samples; the difference vanishes elsewhere",
                    at.len(),
                    times.len()
                ),
            },
        });
    }
    let stats = window_average(&at, &av, window, options.burn_in_fraction)?;
    let (g, upper) = (stats.lower, stats.negative_upper);
    let outcome = if g > 0.0 {
        let envelope = gronwall_envelope(x[0], g, upper, window, &running_sup_abs(beta), times)?;
        let violations = times
            .iter()
            .zip(x)
            .zip(&envelope)
            .filter(|((_, &xv), &e)| xv > e * (1.0 + options.slack))
            .map(|((&t, &xv), &e)| EnvelopeViolation {
                t,
                x: xv,
                envelope: e,
            })
            .collect();
        GronwallOutcome::Applicable {
            gamma_prime: gamma_prime(g, upper),
            envelope,
            violations,
        }
    } else {
        GronwallOutcome::NotApplicable {
            reason: format!(
                "the liminf hypothesis on alpha fails (window average {g}); lemma not applicable"
            ),
        }
    };
    Ok(GronwallCheck {
        window,
        gronwall_gamma: g,
        gamma_upper: upper,
        horizon: stats.horizon,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
    }

    #[test]
    fn undefined_alpha_is_not_applicable() {
        let t = grid(10.0, 100);
        let none = vec![None; t.len()];
        let zeros = vec![0.0; t.len()];
        let c = check_gronwall_samples(&t, &none, &zeros, &zeros, 1.0, GronwallOptions::default())
            .unwrap();
        assert!(!c.is_applicable());
        assert!(matches!(
            check_gronwall_samples(&t, &none, &zeros, &zeros, 5.0, GronwallOptions::default()),
            Err(Error::InsufficientHorizon { .. })
        ));
    }

    #[test]
    fn exponential_decay_is_enveloped() {
        let t = grid(20.0, 2000);
        let x: Vec<f64> = t.iter().map(|s| 3.0 * (-s).exp()).collect();
        let alpha = vec![Some(1.0); t.len()];
        let beta = vec![0.0; t.len()];
        let c =
            check_gronwall_samples(&t, &alpha, &beta, &x, 1.0, GronwallOptions::default()).unwrap();
        assert!((c.gronwall_gamma - 1.0).abs() < 1e-12);
        assert_eq!(c.gamma_upper, 0.0);
        let GronwallOutcome::Applicable {
            gamma_prime,
            envelope,
            violations,
        } = &c.outcome
        else {
            panic!("expected an envelope");
        };
        assert!((gamma_prime - 1.5f64.exp()).abs() < 1e-12);
        assert!(violations.is_empty());
        assert!((envelope[0] - 3.0 * 1.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn forced_relaxation_is_enveloped() {
        let b = 0.7;
        let t = grid(30.0, 3000);
        let x: Vec<f64> = t.iter().map(|s| b + (2.0 - b) * (-s).exp()).collect();
        let alpha = vec![Some(1.0); t.len()];
        let beta = vec![b; t.len()];
        let c =
            check_gronwall_samples(&t, &alpha, &beta, &x, 1.0, GronwallOptions::default()).unwrap();
        assert!(c.is_applicable());
        assert!(c.violations().is_empty());
    }

    #[test]
    fn nonpositive_average_is_not_applicable() {
        let t = grid(10.0, 100);
        let alpha = vec![Some(-0.5); t.len()];
        let zeros = vec![0.0; t.len()];
        let c = check_gronwall_samples(&t, &alpha, &zeros, &zeros, 1.0, GronwallOptions::default())
            .unwrap();
        assert!(!c.is_applicable());
        assert!((c.gamma_upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn envelope_rejects_nonpositive_gamma() {
        assert!(gronwall_envelope(1.0, 0.0, 0.0, 1.0, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn violations_are_listed() {
        let t = grid(10.0, 100);
        let alpha = vec![Some(1.0); t.len()];
        let beta = vec![0.0; t.len()];
        let mut x: Vec<f64> = t.iter().map(|s| (-s).exp()).collect();
        x[50] = 100.0;
        let c =
            check_gronwall_samples(&t, &alpha, &beta, &x, 1.0, GronwallOptions::default()).unwrap();
        assert_eq!(c.violations().len(), 1);
        assert_eq!(c.violations()[0].t, t[50]);
    }
}
