//! Time stepping: exact exponential integrating factor for diffusion,
//! explicit midpoint rule for the reaction, and a dealiased pseudospectral
//! evaluation of the cubic transfer term.

use std::io::{Read, Write};

use ndarray::{Array2, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{reaction_with_forcing, ModelParams, ReactionTerms};
use crate::spectral::{eigenvalue, CosineTransform, GridField, SpectralField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Retained modes per dimension.
    pub modes: usize,
    /// Collocation grid for the nonlinearity, at least `2 * modes`.
    pub n_eval: usize,
    pub tol_pos: f64,
    pub record_every: u64,
}

impl IntegratorConfig {
    pub fn new(dt: f64, modes: usize) -> Self {
        Self {
            dt,
            modes,
            n_eval: 2 * modes,
            tol_pos: 1e-6,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if self.modes == 0 {
            return Err(Error::InvalidParameter {
                name: "modes",
                reason: "must be at least 1".into(),
            });
        }
        if self.n_eval < 2 * self.modes {
            return Err(Error::InvalidParameter {
                name: "n_eval",
                reason: format!(
                    "must be at least 2 * modes = {} for dealiasing, got {}",
                    2 * self.modes,
                    self.n_eval
                ),
            });
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "record_every",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationState {
    pub t: f64,
    pub step: u64,
    pub u: SpectralField,
    pub v: SpectralField,
}

impl SimulationState {
    pub fn new(u: SpectralField, v: SpectralField) -> Self {
        Self {
            t: 0.0,
            step: 0,
            u,
            v,
        }
    }

    pub fn modes(&self) -> usize {
        self.u.modes()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.v.is_finite()
    }
}

/// Physical-space minimum below `-tol_pos`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityWarning {
    pub step: u64,
    pub t: f64,
    pub min_u: f64,
    pub min_v: f64,
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: SimulationState,
    pub warning: Option<PositivityWarning>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: SimulationState,
    pub warnings: Vec<PositivityWarning>,
}

struct SpeciesRates {
    u: SpectralField,
    v: SpectralField,
}

pub struct Integrator {
    params: ModelParams,
    cfg: IntegratorConfig,
    transform: CosineTransform,
    decay_half: [Array2<f64>; 2],
    decay_full: [Array2<f64>; 2],
    g_base: [SpectralField; 2],
    g_pert: [SpectralField; 2],
}

impl Integrator {
    pub fn new(params: &ModelParams, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let k = cfg.modes;
        let factors = |d: f64, h: f64| {
            Array2::from_shape_fn((k, k), |(i, j)| (-d * eigenvalue(i, j) * h).exp())
        };
        Ok(Self {
            transform: CosineTransform::new(k, cfg.n_eval)?,
            decay_half: [
                factors(params.d1, cfg.dt / 2.0),
                factors(params.d2, cfg.dt / 2.0),
            ],
            decay_full: [factors(params.d1, cfg.dt), factors(params.d2, cfg.dt)],
            g_base: [params.g1.base_field(k)?, params.g2.base_field(k)?],
            g_pert: [
                params.g1.perturbation_field(k)?,
                params.g2.perturbation_field(k)?,
            ],
            params: params.clone(),
            cfg: cfg.clone(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn transform(&self) -> &CosineTransform {
        &self.transform
    }

    pub fn forcing_at(&self, t: f64) -> [SpectralField; 2] {
        let f1 = self.params.g1.decay_factor(t);
        let f2 = self.params.g2.decay_factor(t);
        [
            &self.g_base[0] + &self.g_pert[0].scaled(f1),
            &self.g_base[1] + &self.g_pert[1].scaled(f2),
        ]
    }

    /// Spectral reaction rates. The transfer `P_K(γ u v²)` is projected once
    /// and enters the two species with opposite signs. Returns the grid
    /// minima of `u` and `v` when the grid was formed.
    fn rates(
        &self,
        u: &SpectralField,
        v: &SpectralField,
        t: f64,
    ) -> Result<(SpeciesRates, Option<(f64, f64)>)> {
        let [g1, g2] = self.forcing_at(t);
        let p = &self.params;
        let mut ru = g1;
        let mut rv = g2;
        Zip::from(ru.coeffs_mut())
            .and(rv.coeffs_mut())
            .and(u.coeffs())
            .and(v.coeffs())
            .for_each(|ru, rv, &uc, &vc| {
                *ru += p.a1 * uc + p.b1 * vc;
                *rv += p.a2 * uc + p.b2 * vc;
            });
        let mut minima = None;
        if p.gamma != 0.0 {
            let ug = self.transform.to_physical(u)?;
            let vg = self.transform.to_physical(v)?;
            minima = Some((ug.min(), vg.min()));
            let mut product = ug;
            Zip::from(product.values_mut())
                .and(vg.values())
                .for_each(|x, &y| *x = p.gamma * *x * y * y);
            let transfer = self.transform.to_spectral(&product)?;
            Zip::from(ru.coeffs_mut())
                .and(rv.coeffs_mut())
                .and(transfer.coeffs())
                .for_each(|ru, rv, &tr| {
                    *ru -= tr;
                    *rv += tr;
                });
        }
        Ok((SpeciesRates { u: ru, v: rv }, minima))
    }

    /// One Lawson midpoint step:
    /// `w_half = E(dt/2)(w_n + dt/2 R(w_n))`,
    /// `w_{n+1} = E(dt) w_n + dt E(dt/2) R(w_half)`.
    pub fn step(&self, state: &SimulationState) -> Result<StepOutcome> {
        let dt = self.cfg.dt;
        let (r0, minima) = self.rates(&state.u, &state.v, state.t)?;
        let half = |w: &SpectralField, r: &SpectralField, s: usize| {
            let mut out = w.clone();
            Zip::from(out.coeffs_mut())
                .and(r.coeffs())
                .and(&self.decay_half[s])
                .for_each(|o, &rr, &e| *o = e * (*o + 0.5 * dt * rr));
            out
        };
        let u_half = half(&state.u, &r0.u, 0);
        let v_half = half(&state.v, &r0.v, 1);
        let (r1, _) = self.rates(&u_half, &v_half, state.t + 0.5 * dt)?;
        let full = |w: &SpectralField, r: &SpectralField, s: usize| {
            let mut out = w.clone();
            Zip::from(out.coeffs_mut())
                .and(r.coeffs())
                .and(&self.decay_full[s])
                .and(&self.decay_half[s])
                .for_each(|o, &rr, &ef, &eh| *o = ef * *o + dt * eh * rr);
            out
        };
        let next = SimulationState {
            t: state.t + dt,
            step: state.step + 1,
            u: full(&state.u, &r1.u, 0),
            v: full(&state.v, &r1.v, 1),
        };
        if !next.is_finite() {
            return Err(Error::Divergence {
                step: next.step,
                t: next.t,
            });
        }
        let warning = minima.and_then(|(min_u, min_v)| self.positivity(state, min_u, min_v));
        Ok(StepOutcome {
            state: next,
            warning,
        })
    }

    fn positivity(
        &self,
        state: &SimulationState,
        min_u: f64,
        min_v: f64,
    ) -> Option<PositivityWarning> {
        (min_u < -self.cfg.tol_pos || min_v < -self.cfg.tol_pos).then_some(PositivityWarning {
            step: state.step,
            t: state.t,
            min_u,
            min_v,
        })
    }

    /// Physical minima of a state on the collocation grid.
    pub fn minima(&self, state: &SimulationState) -> Result<(f64, f64)> {
        Ok((
            self.transform.to_physical(&state.u)?.min(),
            self.transform.to_physical(&state.v)?.min(),
        ))
    }

    /// Number of steps from `t` to `t_end`.
    pub fn steps_until(&self, t: f64, t_end: f64) -> u64 {
        if t_end <= t {
            0
        } else {
            ((t_end - t) / self.cfg.dt).round() as u64
        }
    }

    /// Steps to `t_end`, calling `observer` after every step whose global
    /// step index is a multiple of `record_every`.
    pub fn run(
        &self,
        state: SimulationState,
        t_end: f64,
        mut observer: impl FnMut(&SimulationState) -> Result<()>,
    ) -> Result<RunOutcome> {
        let n = self.steps_until(state.t, t_end);
        let mut state = state;
        let mut warnings = Vec::new();
        for _ in 0..n {
            let outcome = self.step(&state)?;
            state = outcome.state;
            warnings.extend(outcome.warning);
            if state.step.is_multiple_of(self.cfg.record_every) {
                if self.params.gamma == 0.0 {
                    let (min_u, min_v) = self.minima(&state)?;
                    warnings.extend(self.positivity(&state, min_u, min_v));
                }
                observer(&state)?;
            }
        }
        Ok(RunOutcome { state, warnings })
    }

    /// Grid reaction terms of a state, for checking the telescoping identity.
    pub fn grid_reaction(&self, state: &SimulationState) -> Result<ReactionTerms> {
        let ug = self.transform.to_physical(&state.u)?;
        let vg = self.transform.to_physical(&state.v)?;
        let [g1, g2] = self.forcing_at(state.t);
        let g1 = self.transform.to_physical(&g1)?;
        let g2 = self.transform.to_physical(&g2)?;
        Ok(reaction_with_forcing(&ug, &vg, &g1, &g2, &self.params))
    }
}

/// Single step with a freshly built integrator.
pub fn step(
    state: &SimulationState,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<StepOutcome> {
    Integrator::new(params, cfg)?.step(state)
}

/// Initial data, specified in physical space where applicable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    Homogeneous {
        u: f64,
        v: f64,
    },
    /// Homogeneous background with a square patch of different
    /// concentrations; the patch edges are smoothed over `edge_width`.
    Square {
        background: [f64; 2],
        inside: [f64; 2],
        center: [f64; 2],
        half_width: f64,
        edge_width: f64,
    },
    /// Homogeneous background plus seeded Gaussian noise on the modes with
    /// `k, l < noise_modes`, constant mode excluded.
    Noise {
        background: [f64; 2],
        amplitude: f64,
        noise_modes: usize,
        seed: u64,
    },
}

impl InitialCondition {
    pub fn build(&self, modes: usize, n_eval: usize) -> Result<SimulationState> {
        let (u, v) = match self {
            Self::Homogeneous { u, v } => (
                SpectralField::constant(modes, *u),
                SpectralField::constant(modes, *v),
            ),
            Self::Square {
                background,
                inside,
                center,
                half_width,
                edge_width,
            } => {
                let transform = CosineTransform::new(modes, n_eval)?;
                let w = edge_width.max(1e-12);
                let mask = |x: f64, y: f64| {
                    let edge = |d: f64| 0.5 * (1.0 - ((d.abs() - half_width) / w).tanh());
                    edge(x - center[0]) * edge(y - center[1])
                };
                let field = |s: usize| {
                    GridField::from_fn(n_eval, |x, y| {
                        background[s] + (inside[s] - background[s]) * mask(x, y)
                    })
                };
                (
                    transform.to_spectral(&field(0))?,
                    transform.to_spectral(&field(1))?,
                )
            }
            Self::Noise {
                background,
                amplitude,
                noise_modes,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut fields = [
                    SpectralField::constant(modes, background[0]),
                    SpectralField::constant(modes, background[1]),
                ];
                let cut = (*noise_modes).min(modes);
                for f in &mut fields {
                    let noise = SpectralField::random(cut, *amplitude, &mut rng).resized(modes);
                    let mut noise = noise;
                    noise.coeffs_mut()[[0, 0]] = 0.0;
                    *f = &*f + &noise;
                }
                let [u, v] = fields;
                (u, v)
            }
        };
        Ok(SimulationState::new(u, v))
    }
}

const CHECKPOINT_MAGIC: &[u8; 9] = b"DETMODES1";

/// Writes `DETMODES1`, then little-endian `K`, `N_eval`, `t`, `step`, and
/// the `u` then `v` coefficients in row-major order.
pub fn save_checkpoint<W: Write>(
    mut writer: W,
    state: &SimulationState,
    n_eval: usize,
) -> Result<()> {
    let k = state.modes();
    writer.write_all(CHECKPOINT_MAGIC)?;
    writer.write_all(&(k as u64).to_le_bytes())?;
    writer.write_all(&(n_eval as u64).to_le_bytes())?;
    writer.write_all(&state.t.to_le_bytes())?;
    writer.write_all(&state.step.to_le_bytes())?;
    for field in [&state.u, &state.v] {
        for c in field.coeffs().iter() {
            writer.write_all(&c.to_le_bytes())?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads a checkpoint, returning the state and its `N_eval`.
pub fn load_checkpoint<R: Read>(mut reader: R) -> Result<(SimulationState, usize)> {
    let mut magic = [0u8; 9];
    reader
        .read_exact(&mut magic)
        .map_err(|e| Error::Checkpoint(format!("missing header: {e}")))?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut word)
            .map_err(|e| Error::Checkpoint(format!("truncated: {e}")))?;
        Ok(word)
    };
    let k = u64::from_le_bytes(next(&mut reader)?) as usize;
    let n_eval = u64::from_le_bytes(next(&mut reader)?) as usize;
    let t = f64::from_le_bytes(next(&mut reader)?);
    let step = u64::from_le_bytes(next(&mut reader)?);
    if k == 0 || k > 1 << 14 {
        return Err(Error::Checkpoint(format!("implausible mode count {k}")));
    }
    let mut read_field = |r: &mut R| -> Result<SpectralField> {
        let mut data = Vec::with_capacity(k * k);
        for _ in 0..k * k {
            data.push(f64::from_le_bytes(next(r)?));
        }
        let coeffs =
            Array2::from_shape_vec((k, k), data).map_err(|e| Error::Checkpoint(e.to_string()))?;
        SpectralField::from_coeffs(coeffs)
    };
    let u = read_field(&mut reader)?;
    let v = read_field(&mut reader)?;
    let mut rest = [0u8; 1];
    if reader.read(&mut rest)? != 0 {
        return Err(Error::Checkpoint("trailing bytes".into()));
    }
    Ok((SimulationState { t, step, u, v }, n_eval))
}
