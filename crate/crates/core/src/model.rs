//! The two-species system
//!
//! ```text
//! u_t = d1 Δu + a1 u + b1 v - γ u v² + g1(t)
//! v_t = d2 Δv + a2 u + b2 v + γ u v² + g2(t)
//! ```
//!
//! with zero Neumann boundary conditions, its forcing terms, the structural
//! properties P1-P6 and named presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{basis_sup, basis_value, GridField, SpectralField};

/// One term `amplitude · ψ_kl` of a forcing expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeTerm {
    pub k: usize,
    pub l: usize,
    pub amplitude: f64,
}

impl ModeTerm {
    pub fn new(k: usize, l: usize, amplitude: f64) -> Self {
        Self { k, l, amplitude }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    Constant,
    ConstantPlusDecaying,
    ModeSum,
}

/// `g(t, x) = base(x) + perturbation(x) · e^{-ρ t}`, both parts finite mode sums.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingSpec {
    pub base: Vec<ModeTerm>,
    pub perturbation: Vec<ModeTerm>,
    pub decay_rate: f64,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            base: vec![ModeTerm::new(0, 0, value)],
            ..Self::default()
        }
    }

    pub fn constant_plus_decaying(
        value: f64,
        perturbation: Vec<ModeTerm>,
        decay_rate: f64,
    ) -> Self {
        Self {
            base: vec![ModeTerm::new(0, 0, value)],
            perturbation,
            decay_rate,
        }
    }

    pub fn mode_sum(base: Vec<ModeTerm>, perturbation: Vec<ModeTerm>, decay_rate: f64) -> Self {
        Self {
            base,
            perturbation,
            decay_rate,
        }
    }

    pub fn kind(&self) -> ForcingKind {
        let constant_base = self.base.iter().all(|t| t.k == 0 && t.l == 0);
        if !constant_base {
            ForcingKind::ModeSum
        } else if self.perturbation.iter().any(|t| t.amplitude != 0.0) {
            ForcingKind::ConstantPlusDecaying
        } else {
            ForcingKind::Constant
        }
    }

    fn is_spatially_constant(&self) -> bool {
        self.base
            .iter()
            .chain(&self.perturbation)
            .all(|t| t.k == 0 && t.l == 0)
    }

    pub fn is_finite(&self) -> bool {
        self.decay_rate.is_finite()
            && self
                .base
                .iter()
                .chain(&self.perturbation)
                .all(|t| t.amplitude.is_finite())
    }

    /// `e^{-ρt}`; with `ρ = 0` the perturbation is permanent.
    pub fn decay_factor(&self, t: f64) -> f64 {
        (-self.decay_rate * t).exp()
    }

    pub fn base_field(&self, modes: usize) -> Result<SpectralField> {
        accumulate(&self.base, modes)
    }

    pub fn perturbation_field(&self, modes: usize) -> Result<SpectralField> {
        accumulate(&self.perturbation, modes)
    }

    pub fn spectral_at(&self, t: f64, modes: usize) -> Result<SpectralField> {
        let base = self.base_field(modes)?;
        let pert = self.perturbation_field(modes)?;
        Ok(&base + &pert.scaled(self.decay_factor(t)))
    }

    pub fn value_at(&self, t: f64, x: f64, y: f64) -> f64 {
        let decay = self.decay_factor(t);
        let sum = |terms: &[ModeTerm]| -> f64 {
            terms
                .iter()
                .map(|m| m.amplitude * basis_value(m.k, m.l, x, y))
                .sum()
        };
        sum(&self.base) + decay * sum(&self.perturbation)
    }

    /// Forcing sampled on an `n × n` midpoint grid.
    pub fn grid_at(&self, t: f64, n: usize) -> GridField {
        GridField::from_fn(n, |x, y| self.value_at(t, x, y))
    }

    /// `‖base‖²_{L²}`, the large-time limit of `‖g(t)‖²_{L²}`.
    pub fn base_l2_sq(&self) -> f64 {
        l2_sq(&self.base)
    }

    pub fn perturbation_l2(&self) -> f64 {
        l2_sq(&self.perturbation).sqrt()
    }

    /// `sup_t ‖g(t)‖_{L²}` bound from the triangle inequality; exact when the
    /// perturbation is permanent.
    pub fn sup_l2(&self) -> f64 {
        if self.decay_rate == 0.0 {
            let mut all = self.base.clone();
            all.extend_from_slice(&self.perturbation);
            l2_sq(&all).sqrt()
        } else {
            self.base_l2_sq().sqrt() + self.perturbation_l2()
        }
    }

    /// Bounds on `inf_{t,x} g` and `sup_{t,x} g`.
    pub fn range(&self) -> ForcingRange {
        let constant_part = |terms: &[ModeTerm]| -> f64 {
            terms
                .iter()
                .filter(|t| t.k == 0 && t.l == 0)
                .map(|t| t.amplitude)
                .sum()
        };
        let oscillating = |terms: &[ModeTerm]| -> f64 {
            terms
                .iter()
                .filter(|t| t.k != 0 || t.l != 0)
                .map(|t| t.amplitude.abs() * basis_sup(t.k, t.l))
                .sum()
        };
        let b0 = constant_part(&self.base);
        let p0 = constant_part(&self.perturbation);
        let bosc = oscillating(&self.base);
        let posc = oscillating(&self.perturbation);
        // for fixed x, g is monotone in t between base + pert (t = 0) and base
        // (t → ∞); with ρ = 0 only the first value is attained.
        let decays = self.decay_rate > 0.0;
        let (lower, upper) = if decays {
            (
                (b0 - bosc).min(b0 + p0 - bosc - posc),
                (b0 + bosc).max(b0 + p0 + bosc + posc),
            )
        } else {
            (b0 + p0 - bosc - posc, b0 + p0 + bosc + posc)
        };
        if self.is_spatially_constant() {
            return ForcingRange {
                lower,
                upper,
                exact: true,
                sampled_min: (lower, SamplePoint::default()),
                sampled_max: (upper, SamplePoint::default()),
            };
        }

        const N: usize = 64;
        let times: &[f64] = if decays {
            &[0.0, f64::INFINITY]
        } else {
            &[0.0]
        };
        let mut min = (f64::INFINITY, SamplePoint::default());
        let mut max = (f64::NEG_INFINITY, SamplePoint::default());
        for &t in times {
            for i in 0..=N {
                for j in 0..=N {
                    let (x, y) = (i as f64 / N as f64, j as f64 / N as f64);
                    let value = self.value_at(t, x, y);
                    let at = SamplePoint { x, y, t };
                    if value < min.0 {
                        min = (value, at);
                    }
                    if value > max.0 {
                        max = (value, at);
                    }
                }
            }
        }
        ForcingRange {
            lower,
            upper,
            exact: false,
            sampled_min: min,
            sampled_max: max,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

/// Analytic bounds on a forcing's range plus attained sample extremes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcingRange {
    pub lower: f64,
    pub upper: f64,
    /// The bounds are attained (spatially constant forcing).
    pub exact: bool,
    pub sampled_min: (f64, SamplePoint),
    pub sampled_max: (f64, SamplePoint),
}

fn accumulate(terms: &[ModeTerm], modes: usize) -> Result<SpectralField> {
    let mut f = SpectralField::zeros(modes);
    for t in terms {
        if t.k >= modes || t.l >= modes {
            return Err(Error::ForcingOutOfRange {
                k: t.k,
                l: t.l,
                modes,
            });
        }
        f.coeffs_mut()[[t.k, t.l]] += t.amplitude;
    }
    Ok(f)
}

/// Parseval over merged terms.
fn l2_sq(terms: &[ModeTerm]) -> f64 {
    let mut merged: Vec<ModeTerm> = Vec::new();
    for t in terms {
        match merged.iter_mut().find(|m| m.k == t.k && m.l == t.l) {
            Some(m) => m.amplitude += t.amplitude,
            None => merged.push(*t),
        }
    }
    // fold from +0.0: an empty f64 sum is -0.0
    merged
        .iter()
        .fold(0.0, |s, t| s + t.amplitude * t.amplitude)
}

fn default_scale() -> f64 {
    1.0
}

/// Constants of the system. `c1`, `c2` witness P5.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub gamma: f64,
    pub g1: ForcingSpec,
    pub g2: ForcingSpec,
    pub c1: f64,
    pub c2: f64,
    /// Concentration scale used to size the P4/P5 sample box.
    #[serde(default = "default_scale")]
    pub natural_scale: f64,
    /// Homogeneous steady state `(u*, v*)`, when known.
    #[serde(default)]
    pub steady_state: Option<[f64; 2]>,
}

impl ModelParams {
    /// `d = min(d1, d2)`.
    pub fn min_diffusion(&self) -> f64 {
        self.d1.min(self.d2)
    }

    /// `Σ_j (|a_j| + |b_j|)`, the coefficient aggregate without area factors.
    pub fn coefficient_sum(&self) -> f64 {
        self.a1.abs() + self.b1.abs() + self.a2.abs() + self.b2.abs()
    }

    /// Copy with different forcing, as used for the perturbed twin.
    pub fn with_forcing(&self, g1: ForcingSpec, g2: ForcingSpec) -> Self {
        Self {
            g1,
            g2,
            ..self.clone()
        }
    }

    /// `[0, 10 s] × [0, 10 s]` with `s` the natural scale.
    pub fn default_sample_box(&self) -> (f64, f64) {
        let s = 10.0 * self.natural_scale;
        (s, s)
    }
}

/// Pointwise reaction terms with the transfer `γ u v²` stored once.
///
/// `ru = linear_u - transfer`, `rv = linear_v + transfer`.
#[derive(Clone, Debug)]
pub struct ReactionTerms {
    pub linear_u: GridField,
    pub linear_v: GridField,
    pub transfer: GridField,
}

impl ReactionTerms {
    pub fn ru(&self) -> GridField {
        combine(&self.linear_u, &self.transfer, |a, b| a - b)
    }

    pub fn rv(&self) -> GridField {
        combine(&self.linear_v, &self.transfer, |a, b| a + b)
    }

    /// `ru + rv` with the shared transfer entering once with each sign.
    pub fn species_sum(&self) -> GridField {
        let linear = combine(&self.linear_u, &self.linear_v, |a, b| a + b);
        let net_transfer = combine(&self.transfer, &self.transfer, |t_in, t_out| t_in - t_out);
        combine(&linear, &net_transfer, |a, b| a + b)
    }

    /// `linear_u + linear_v`.
    pub fn linear_sum(&self) -> GridField {
        combine(&self.linear_u, &self.linear_v, |a, b| a + b)
    }
}

fn combine(a: &GridField, b: &GridField, op: impl Fn(f64, f64) -> f64) -> GridField {
    let mut out = a.clone();
    ndarray::Zip::from(out.values_mut())
        .and(b.values())
        .for_each(|x, &y| *x = op(*x, y));
    out
}

/// Pointwise reaction right-hand side on a common grid.
pub fn reaction_rhs(
    u: &GridField,
    v: &GridField,
    params: &ModelParams,
    t: f64,
) -> Result<ReactionTerms> {
    if u.size() != v.size() {
        return Err(Error::GridMismatch {
            expected: u.size(),
            found: v.size(),
        });
    }
    let n = u.size();
    let g1 = params.g1.grid_at(t, n);
    let g2 = params.g2.grid_at(t, n);
    Ok(reaction_with_forcing(u, v, &g1, &g2, params))
}

pub(crate) fn reaction_with_forcing(
    u: &GridField,
    v: &GridField,
    g1: &GridField,
    g2: &GridField,
    params: &ModelParams,
) -> ReactionTerms {
    let n = u.size();
    let mut linear_u = GridField::zeros(n);
    let mut linear_v = GridField::zeros(n);
    let mut transfer = GridField::zeros(n);
    ndarray::Zip::from(linear_u.values_mut())
        .and(linear_v.values_mut())
        .and(transfer.values_mut())
        .and(u.values())
        .and(v.values())
        .and(g1.values())
        .for_each(|lu, lv, tr, &uu, &vv, &gg1| {
            *lu = params.a1 * uu + params.b1 * vv + gg1;
            *lv = params.a2 * uu + params.b2 * vv;
            *tr = params.gamma * uu * vv * vv;
        });
    ndarray::Zip::from(linear_v.values_mut())
        .and(g2.values())
        .for_each(|lv, &gg2| *lv += gg2);
    ReactionTerms {
        linear_u,
        linear_v,
        transfer,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

/// A point at which a property was observed to fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub t: f64,
    /// Amount by which the inequality is violated.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub note: String,
}

impl PropertyCheck {
    fn new(property: Property, verdict: Verdict, note: impl Into<String>) -> Self {
        Self {
            property,
            verdict,
            witness: None,
            note: note.into(),
        }
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
    pub c1: f64,
    pub c2: f64,
}

impl PropertyReport {
    pub fn check(&self, property: Property) -> &PropertyCheck {
        self.checks
            .iter()
            .find(|c| c.property == property)
            .expect("report covers every property")
    }

    pub fn verdict(&self, property: Property) -> Verdict {
        self.check(property).verdict
    }

    /// No property was shown to fail.
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fails)
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Holds)
    }

    pub fn failures(&self) -> Vec<Property> {
        self.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fails)
            .map(|c| c.property)
            .collect()
    }
}

/// Default number of stratified samples for the P5 falsifier.
pub const DEFAULT_P5_SAMPLES: usize = 10_000;

/// Checks P1-P6. P1, P3, P6 are exact; P2 and P4 use the closed-form
/// forcing bounds; P5 is falsified by sampling `[0, u_max] × [0, v_max]`
/// unless the analytic certificate for `b1 ≤ 0` applies.
pub fn validate_properties(
    params: &ModelParams,
    sample_box: (f64, f64),
    samples: usize,
) -> PropertyReport {
    let p1 = if params.d1 > 0.0 && params.d2 > 0.0 {
        PropertyCheck::new(Property::P1, Verdict::Holds, "d1, d2 > 0")
    } else {
        PropertyCheck::new(
            Property::P1,
            Verdict::Fails,
            format!("d1 = {}, d2 = {}", params.d1, params.d2),
        )
    };

    let p2 = check_p2(params);

    let p3 = if params.gamma >= 0.0 {
        PropertyCheck::new(Property::P3, Verdict::Holds, "gamma >= 0")
    } else {
        PropertyCheck::new(
            Property::P3,
            Verdict::Fails,
            format!("gamma = {}", params.gamma),
        )
    };

    let p4 = check_p4(params);
    let p5 = check_p5(params, sample_box, samples);

    let sums = (params.a1 + params.a2, params.b1 + params.b2);
    let p6 = if sums.0 <= 0.0 && sums.1 <= 0.0 {
        PropertyCheck::new(
            Property::P6,
            Verdict::Holds,
            "a1 + a2 <= 0 and b1 + b2 <= 0",
        )
    } else {
        PropertyCheck::new(
            Property::P6,
            Verdict::Fails,
            format!("a1 + a2 = {}, b1 + b2 = {}", sums.0, sums.1),
        )
    };

    PropertyReport {
        checks: vec![p1, p2, p3, p4, p5, p6],
        c1: params.c1,
        c2: params.c2,
    }
}

fn check_p2(params: &ModelParams) -> PropertyCheck {
    for (name, g) in [("g1", &params.g1), ("g2", &params.g2)] {
        if !g.is_finite() {
            return PropertyCheck::new(
                Property::P2,
                Verdict::Fails,
                format!("{name} has non-finite coefficients"),
            );
        }
        if g.decay_rate < 0.0 && g.perturbation.iter().any(|t| t.amplitude != 0.0) {
            return PropertyCheck::new(
                Property::P2,
                Verdict::Fails,
                format!("{name} perturbation grows like exp({} t)", -g.decay_rate),
            );
        }
    }
    PropertyCheck::new(
        Property::P2,
        Verdict::Holds,
        format!(
            "sup_t |g1|_L2 <= {:.6e}, sup_t |g2|_L2 <= {:.6e}",
            params.g1.sup_l2(),
            params.g2.sup_l2()
        ),
    )
}

/// `coef · s + g ≥ 0` for all `s ≥ 0` iff `coef ≥ 0` and `inf g ≥ 0`.
fn check_p4(params: &ModelParams) -> PropertyCheck {
    let parts = [
        ("b1 v + g1", params.b1, &params.g1, false),
        ("a2 u + g2", params.a2, &params.g2, true),
    ];
    let mut undetermined = Vec::new();
    for (label, coef, g, on_u) in parts {
        let range = g.range();
        let witness_at = |s: f64, at: SamplePoint, excess: f64| {
            let (u, v) = if on_u { (s, 0.0) } else { (0.0, s) };
            Witness {
                u,
                v,
                x: at.x,
                y: at.y,
                t: at.t,
                excess,
            }
        };
        if coef < 0.0 {
            // at the forcing's maximum, s = max(1, 2 sup g / |coef|) is negative
            let (gmax, at) = range.sampled_max;
            let s = (2.0 * gmax / coef.abs()).max(1.0);
            let value = coef * s + gmax;
            let upper_value = coef * s + range.upper;
            if value < 0.0 || upper_value < 0.0 {
                let excess = -(value.max(upper_value));
                return PropertyCheck::new(
                    Property::P4,
                    Verdict::Fails,
                    format!("{label} < 0: coefficient {coef} is negative"),
                )
                .with_witness(witness_at(s, at, excess));
            }
        }
        let (gmin, at) = range.sampled_min;
        if gmin < 0.0 {
            return PropertyCheck::new(
                Property::P4,
                Verdict::Fails,
                format!("{label} < 0 at s = 0: forcing reaches {gmin}"),
            )
            .with_witness(witness_at(0.0, at, -gmin));
        }
        if range.lower < 0.0 {
            undetermined.push(label);
        }
    }
    if undetermined.is_empty() {
        PropertyCheck::new(
            Property::P4,
            Verdict::Holds,
            "b1, a2 >= 0 and inf g1, inf g2 >= 0",
        )
    } else {
        PropertyCheck::new(
            Property::P4,
            Verdict::Undetermined,
            format!(
                "no negative sample found but the analytic lower bound of {} is negative",
                undetermined.join(", ")
            ),
        )
    }
}

fn check_p5(params: &ModelParams, sample_box: (f64, f64), samples: usize) -> PropertyCheck {
    let (c1, c2) = (params.c1, params.c2);
    if !(c1 >= 0.0 && c2 > 0.0) {
        return PropertyCheck::new(
            Property::P5,
            Verdict::Fails,
            format!("witness constants must satisfy c1 >= 0, c2 > 0 (got c1 = {c1}, c2 = {c2})"),
        );
    }
    let range = params.g1.range();

    // With b1 ≤ 0 and γ ≥ 0 the left side is largest at v = 0, leaving a
    // linear inequality in u: sup g1 ≤ c1 and a1 ≤ -c1 c2.
    let reduces_to_v0 = params.b1 <= 0.0 && params.gamma >= 0.0;
    if reduces_to_v0 && range.upper <= c1 && params.a1 <= -c1 * c2 {
        return PropertyCheck::new(
            Property::P5,
            Verdict::Holds,
            "certified: b1 <= 0, gamma >= 0, sup g1 <= c1, a1 <= -c1 c2",
        );
    }

    let (gmax, at) = range.sampled_max;
    let excess = |u: f64, v: f64| {
        params.a1 * u + params.b1 * v - params.gamma * u * v * v + gmax - c1 * (1.0 - c2 * u)
    };
    let (u_max, v_max) = sample_box;
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut probe = |u: f64, v: f64| {
        let e = excess(u, v);
        if e > worst.0 {
            worst = (e, u, v);
        }
    };
    for &(u, v) in &[(0.0, 0.0), (u_max, 0.0), (0.0, v_max), (u_max, v_max)] {
        probe(u, v);
    }
    for i in 1..=samples {
        probe(u_max * halton(i, 2), v_max * halton(i, 3));
    }
    if worst.0 > 0.0 {
        return PropertyCheck::new(
            Property::P5,
            Verdict::Fails,
            format!(
                "a1 u + b1 v - gamma u v^2 + g1 exceeds c1 (1 - c2 u) at u = {}, v = {}",
                worst.1, worst.2
            ),
        )
        .with_witness(Witness {
            u: worst.1,
            v: worst.2,
            x: at.x,
            y: at.y,
            t: at.t,
            excess: worst.0,
        });
    }
    let note = if reduces_to_v0 {
        let u_cross = (c1 - gmax) / (c1 * c2 + params.a1);
        format!(
            "no counterexample on [0, {u_max}] x [0, {v_max}]; the v = 0 reduction fails for u > {u_cross}"
        )
    } else {
        format!("no counterexample in {samples} samples on [0, {u_max}] x [0, {v_max}]")
    };
    PropertyCheck::new(Property::P5, Verdict::Undetermined, note)
}

/// Radical-inverse (Halton) sequence element.
fn halton(mut index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn require_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be a nonnegative number, got {value}"),
        })
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {value}"),
        })
    }
}

/// Gray–Scott `u_t = d1Δu - uv² + f(1 - u)`, `v_t = d2Δv + uv² - (f + k)v`.
///
/// P5 holds with `c1 = f`, `c2 = 1` since `f(1 - u) - uv² ≤ f(1 - u)`.
pub fn preset_gray_scott(f: f64, k: f64, d1: f64, d2: f64) -> Result<ModelParams> {
    require_nonnegative("f", f)?;
    require_nonnegative("k", k)?;
    Ok(ModelParams {
        d1,
        d2,
        a1: -f,
        a2: 0.0,
        b1: 0.0,
        b2: -(f + k),
        gamma: 1.0,
        g1: ForcingSpec::constant(f),
        g2: ForcingSpec::zero(),
        c1: f,
        c2: 1.0,
        natural_scale: 1.0,
        steady_state: Some([1.0, 0.0]),
    })
}

/// Brusselator with `u` the inhibitor and `v` the activator:
/// `u_t = d1Δu + B v - u v²`, `v_t = d2Δv + A - (B + 1) v + u v²`.
///
/// The sign of `b2` is `-(B + 1)`. Writing `b2 = b1 + 1` would violate P6 for
/// every `B > 0`.
///
/// P5 has no global witness here (`B v` is unbounded in `v`). The constants
/// `c1 = 2 B v_max`, `c2 = 1/(4 u_max)` on the default sample box make the
/// inequality hold throughout the box, so validation reports P5 as
/// undetermined rather than failed.
pub fn preset_brusselator(a: f64, b: f64, d1: f64, d2: f64) -> Result<ModelParams> {
    require_positive("A", a)?;
    require_positive("B", b)?;
    let steady = [b / a, a];
    let scale = steady[0].max(steady[1]);
    let (u_max, v_max) = (10.0 * scale, 10.0 * scale);
    Ok(ModelParams {
        d1,
        d2,
        a1: 0.0,
        a2: 0.0,
        b1: b,
        b2: -(b + 1.0),
        gamma: 1.0,
        g1: ForcingSpec::zero(),
        g2: ForcingSpec::constant(a),
        c1: 2.0 * b * v_max,
        c2: 1.0 / (4.0 * u_max),
        natural_scale: scale,
        steady_state: Some(steady),
    })
}

/// Sel'kov-type glycolysis `u_t = d1Δu - uv² + κ`, `v_t = d2Δv + uv² - δv`.
///
/// With `a1 = 0` no `c2 > 0` satisfies P5 for all `u ≥ 0`; the constants
/// `c1 = 2κ`, `c2 = 1/(4 u_max)` cover the default sample box only.
pub fn preset_glycolysis(kappa: f64, delta: f64, d1: f64, d2: f64) -> Result<ModelParams> {
    require_positive("kappa", kappa)?;
    require_positive("delta", delta)?;
    let v_star = kappa / delta;
    let u_star = kappa / (v_star * v_star);
    let scale = u_star.max(v_star);
    let u_max = 10.0 * scale;
    let params = ModelParams {
        d1,
        d2,
        a1: 0.0,
        a2: 0.0,
        b1: 0.0,
        b2: -delta,
        gamma: 1.0,
        g1: ForcingSpec::constant(kappa),
        g2: ForcingSpec::zero(),
        c1: 2.0 * kappa,
        c2: 1.0 / (4.0 * u_max),
        natural_scale: scale,
        steady_state: Some([u_star, v_star]),
    };
    let report = validate_properties(&params, params.default_sample_box(), DEFAULT_P5_SAMPLES);
    for p in [Property::P4, Property::P5] {
        if report.verdict(p) == Verdict::Fails {
            return Err(Error::PropertyViolation(format!(
                "glycolysis preset fails {p:?}: {}",
                report.check(p).note
            )));
        }
    }
    Ok(params)
}
