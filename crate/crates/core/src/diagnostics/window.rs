use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the horizon discarded before windows start.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.2;

/// Finite-horizon surrogates for the liminf and limsup of sliding window
/// averages `(1/T) ∫_s^{s+T} f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub lower: f64,
    pub upper: f64,
    /// Largest window average of `f⁻ = max(-f, 0)`.
    pub negative_upper: f64,
    pub windows: usize,
    pub horizon: f64,
}

/// Cumulative trapezoid integral of samples, with linear interpolation
/// between sample times.
struct Cumulative<'a> {
    times: &'a [f64],
    values: Vec<f64>,
    integral: Vec<f64>,
}

impl<'a> Cumulative<'a> {
    fn new(times: &'a [f64], values: Vec<f64>) -> Self {
        let mut integral = Vec::with_capacity(times.len());
        integral.push(0.0);
        for i in 1..times.len() {
            let dt = times[i] - times[i - 1];
            integral.push(integral[i - 1] + 0.5 * dt * (values[i] + values[i - 1]));
        }
        Self {
            times,
            values,
            integral,
        }
    }

    fn at(&self, t: f64) -> f64 {
        let j = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if j + 1 >= self.times.len() {
            return self.integral[j];
        }
        let (t0, t1) = (self.times[j], self.times[j + 1]);
        let w = (t - t0) / (t1 - t0);
        let f0 = self.values[j];
        let ft = f0 + w * (self.values[j + 1] - f0);
        self.integral[j] + 0.5 * (t - t0) * (f0 + ft)
    }
}

/// Min and max over windows starting at sample times after burn-in, with
/// `s + T` inside the horizon. Requires `horizon - burn_in ≥ 2T`.
pub fn window_average(
    times: &[f64],
    values: &[f64],
    window: f64,
    burn_in_fraction: f64,
) -> Result<WindowStats> {
    if times.len() != values.len() {
        return Err(Error::InvalidParameter {
            name: "values",
            reason: format!("{} samples for {} times", values.len(), times.len()),
        });
    }
    if window.is_nan() || window <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("must be positive, got {window}"),
        });
    }
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::InvalidParameter {
            name: "burn_in_fraction",
            reason: format!("must lie in [0, 1), got {burn_in_fraction}"),
        });
    }
    if times.len() < 2 {
        return Err(Error::EmptySeries);
    }
    let (first, last) = (times[0], times[times.len() - 1]);
    let horizon = last - first;
    let start = first + burn_in_fraction * horizon;
    let available = last - start;
    // relative slack so that `horizon - burn_in == 2T` up to rounding passes
    if available < 2.0 * window * (1.0 - 1e-12) {
        return Err(Error::InsufficientHorizon {
            needed: 2.0 * window,
            available,
        });
    }

    let plain = Cumulative::new(times, values.to_vec());
    let negative = Cumulative::new(times, values.iter().map(|&a| (-a).max(0.0)).collect());
    let mut stats = WindowStats {
        lower: f64::INFINITY,
        upper: f64::NEG_INFINITY,
        negative_upper: f64::NEG_INFINITY,
        windows: 0,
        horizon,
    };
    let tol = 1e-12 * horizon.max(1.0);
    for &s in times
        .iter()
        .filter(|&&s| s >= start - tol && s + window <= last + tol)
    {
        let end = (s + window).min(last);
        let avg = (plain.at(end) - plain.at(s)) / window;
        let neg = (negative.at(end) - negative.at(s)) / window;
        stats.lower = stats.lower.min(avg);
        stats.upper = stats.upper.max(avg);
        stats.negative_upper = stats.negative_upper.max(neg);
        stats.windows += 1;
    }
    Ok(stats)
}

/// Drops samples whose value is undefined.
pub fn defined_samples(times: &[f64], values: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    times
        .iter()
        .zip(values)
        .filter_map(|(&t, v)| v.map(|v| (t, v)))
        .unzip()
}
