use serde::{Deserialize, Serialize};

use super::lemma::ModeSplitRecord;
use crate::error::{Error, Result};

pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeterminingOutcome {
    /// The low-mode differences did not settle below `tol_low`.
    PremiseNotMet,
    DeterminingObserved,
    DeterminingViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminingVerdict {
    pub verdict: DeterminingOutcome,
    /// Tail mean of `‖P_Mξ‖_{L⁴} + ‖P_Nη‖_{L⁴}`.
    pub p_sum_tail: f64,
    /// Tail mean of `‖Q_Mξ‖_{L²} + ‖Q_Nη‖_{L²}`.
    pub q_sum_tail: f64,
    pub tail_start: f64,
    pub tail_samples: usize,
    pub tol_low: f64,
    pub tol_high: f64,
}

/// Compares tail means of the low- and high-mode difference norms.
pub fn determining_verdict(
    records: &[ModeSplitRecord],
    tol_low: f64,
    tol_high: f64,
    tail_fraction: f64,
) -> Result<DeterminingVerdict> {
    if records.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            reason: format!("must lie in (0, 1], got {tail_fraction}"),
        });
    }
    let count = ((records.len() as f64 * tail_fraction).ceil() as usize).clamp(1, records.len());
    let tail = &records[records.len() - count..];
    let mean = |f: fn(&ModeSplitRecord) -> f64| tail.iter().map(f).sum::<f64>() / count as f64;
    let p_sum_tail = mean(ModeSplitRecord::p_sum);
    let q_sum_tail = mean(ModeSplitRecord::q_sum);
    let verdict = if p_sum_tail > tol_low {
        DeterminingOutcome::PremiseNotMet
    } else if q_sum_tail <= tol_high {
        DeterminingOutcome::DeterminingObserved
    } else {
        DeterminingOutcome::DeterminingViolated
    };
    Ok(DeterminingVerdict {
        verdict,
        p_sum_tail,
        q_sum_tail,
        tail_start: tail[0].t,
        tail_samples: count,
        tol_low,
        tol_high,
    })
}
