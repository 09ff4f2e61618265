//! Neumann cosine eigenbasis on the unit square.
//!
//! Fields are expanded in the L²-orthonormal functions
//! `ψ_kl(x, y) = n_k n_l cos(kπx) cos(lπy)` with `n_0 = 1`, `n_k = √2`, so that
//! Parseval is coefficientwise and `-Δψ_kl = π²(k² + l²) ψ_kl`. Physical
//! values live on the midpoint grid `x_i = (i + ½)/N`, on which the cosine
//! pair is a scaled DCT-II/DCT-III and the midpoint rule integrates every
//! cosine of wavenumber below `2N` exactly.

use std::f64::consts::{PI, SQRT_2};
use std::ops::{Add, Mul, Sub};

use ndarray::{Array2, Zip};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Area of the unit square.
pub const DOMAIN_AREA: f64 = 1.0;

/// Laplacian eigenvalue of the `(k, l)` cosine mode.
pub fn eigenvalue(k: usize, l: usize) -> f64 {
    PI * PI * (k * k + l * l) as f64
}

fn normalisation(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        SQRT_2
    }
}

/// Value of the orthonormal basis function `ψ_kl` at `(x, y)`.
pub fn basis_value(k: usize, l: usize, x: f64, y: f64) -> f64 {
    normalisation(k) * normalisation(l) * (k as f64 * PI * x).cos() * (l as f64 * PI * y).cos()
}

/// Supremum of `|ψ_kl|` over the square.
pub fn basis_sup(k: usize, l: usize) -> f64 {
    normalisation(k) * normalisation(l)
}

/// Whether the constant mode is part of the ranked basis.
///
/// Neumann conditions put the constant mode at eigenvalue zero. The default
/// keeps it at rank 1; `ExcludeConstant` ranks only the nonconstant modes so
/// that the first ranked eigenvalue is positive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisConvention {
    #[default]
    IncludeConstant,
    ExcludeConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wavenumber {
    pub k: usize,
    pub l: usize,
}

impl Wavenumber {
    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }

    /// Integer level `k² + l²`; eigenvalues compare exactly through it.
    pub fn level(&self) -> usize {
        self.k * self.k + self.l * self.l
    }

    pub fn eigenvalue(&self) -> f64 {
        eigenvalue(self.k, self.l)
    }
}

/// Modes sorted by eigenvalue, ties broken lexicographically on `(k, l)`.
///
/// Only modes with `k² + l² < cutoff²` are ranked. Every mode below that
/// level fits inside the `cutoff × cutoff` coefficient box, so the ranks
/// agree with the ordering of the full infinite basis.
#[derive(Clone, Debug)]
pub struct ModeOrdering {
    cutoff: usize,
    convention: BasisConvention,
    modes: Vec<Wavenumber>,
    ranks: Array2<usize>,
}

impl ModeOrdering {
    pub fn new(cutoff: usize) -> Self {
        Self::with_convention(cutoff, BasisConvention::IncludeConstant)
    }

    pub fn with_convention(cutoff: usize, convention: BasisConvention) -> Self {
        let mut modes: Vec<Wavenumber> = (0..cutoff)
            .flat_map(|k| (0..cutoff).map(move |l| Wavenumber::new(k, l)))
            .filter(|w| w.level() < cutoff * cutoff)
            .filter(|w| convention == BasisConvention::IncludeConstant || w.level() > 0)
            .collect();
        modes.sort_by_key(|w| (w.level(), w.k, w.l));

        let mut ranks = Array2::zeros((cutoff, cutoff));
        for (i, w) in modes.iter().enumerate() {
            ranks[[w.k, w.l]] = i + 1;
        }
        Self {
            cutoff,
            convention,
            modes,
            ranks,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn convention(&self) -> BasisConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Mode at a 1-based rank.
    pub fn mode(&self, rank: usize) -> Result<Wavenumber> {
        if rank == 0 || rank > self.modes.len() {
            return Err(Error::RankOutOfRange {
                rank,
                len: self.modes.len(),
            });
        }
        Ok(self.modes[rank - 1])
    }

    /// `λ_rank`.
    pub fn eigenvalue(&self, rank: usize) -> Result<f64> {
        self.mode(rank).map(|w| w.eigenvalue())
    }

    /// 1-based rank of `(k, l)`, if it lies below the cutoff.
    pub fn rank(&self, k: usize, l: usize) -> Option<usize> {
        if k >= self.cutoff || l >= self.cutoff {
            return None;
        }
        match self.ranks[[k, l]] {
            0 => None,
            r => Some(r),
        }
    }

    /// First nonzero eigenvalue. Both conventions give π² here.
    pub fn lambda1(&self) -> f64 {
        self.modes
            .iter()
            .map(Wavenumber::eigenvalue)
            .find(|&lambda| lambda > 0.0)
            .unwrap_or(PI * PI)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Wavenumber> {
        self.modes.iter()
    }

    pub fn max_eigenvalue(&self) -> Option<f64> {
        self.modes.last().map(Wavenumber::eigenvalue)
    }
}

/// Coefficients `c_kl`, `0 ≤ k, l < K`, in the orthonormal cosine basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    coeffs: Array2<f64>,
}

impl SpectralField {
    pub fn zeros(modes: usize) -> Self {
        Self {
            coeffs: Array2::zeros((modes, modes)),
        }
    }

    pub fn from_coeffs(coeffs: Array2<f64>) -> Result<Self> {
        let (rows, cols) = coeffs.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if let Some(((i, j), _)) = coeffs.indexed_iter().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite(i, j));
        }
        Ok(Self { coeffs })
    }

    /// Spatially constant field. `ψ_00 ≡ 1`, so the value is the coefficient.
    pub fn constant(modes: usize, value: f64) -> Self {
        let mut f = Self::zeros(modes);
        f.coeffs[[0, 0]] = value;
        f
    }

    pub fn single_mode(modes: usize, k: usize, l: usize, amplitude: f64) -> Result<Self> {
        if k >= modes || l >= modes {
            return Err(Error::ForcingOutOfRange { k, l, modes });
        }
        let mut f = Self::zeros(modes);
        f.coeffs[[k, l]] = amplitude;
        Ok(f)
    }

    /// Gaussian coefficients with standard deviation `amplitude / (1 + k² + l²)`.
    pub fn random<R: Rng + ?Sized>(modes: usize, amplitude: f64, rng: &mut R) -> Self {
        let coeffs = Array2::from_shape_fn((modes, modes), |(k, l)| {
            let z: f64 = rng.sample(StandardNormal);
            amplitude * z / (1 + k * k + l * l) as f64
        });
        Self { coeffs }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<f64> {
        self.coeffs
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.coeffs[[k, l]]
    }

    /// Coefficient of the constant mode, which equals the spatial mean.
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `‖∇f‖²_{L²} = Σ λ_kl c²_kl`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.coeffs
            .indexed_iter()
            .map(|((k, l), c)| eigenvalue(k, l) * c * c)
            .sum()
    }

    pub fn grad_norm_l2(&self) -> f64 {
        self.grad_norm_sq().sqrt()
    }

    /// L² inner product via Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.modes(), other.modes(), "mode count mismatch");
        Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .fold(0.0, |acc, a, b| acc + a * b)
    }

    /// `P_M f`: keeps the modes ranked `1..=m`.
    pub fn project_low(&self, m: usize, ordering: &ModeOrdering) -> Result<Self> {
        check_rank(m, ordering)?;
        let mut out = Self::zeros(self.modes());
        for w in ordering.iter().take(m) {
            if w.k < self.modes() && w.l < self.modes() {
                out.coeffs[[w.k, w.l]] = self.coeffs[[w.k, w.l]];
            }
        }
        Ok(out)
    }

    /// `Q_M f = f - P_M f`, formed by zeroing so the split is exact.
    pub fn project_high(&self, m: usize, ordering: &ModeOrdering) -> Result<Self> {
        check_rank(m, ordering)?;
        let mut out = self.clone();
        for w in ordering.iter().take(m) {
            if w.k < self.modes() && w.l < self.modes() {
                out.coeffs[[w.k, w.l]] = 0.0;
            }
        }
        Ok(out)
    }

    pub fn split(&self, m: usize, ordering: &ModeOrdering) -> Result<(Self, Self)> {
        Ok((
            self.project_low(m, ordering)?,
            self.project_high(m, ordering)?,
        ))
    }

    /// Truncates or zero-pads to `modes` per dimension.
    pub fn resized(&self, modes: usize) -> Self {
        let keep = modes.min(self.modes());
        let mut out = Self::zeros(modes);
        out.coeffs
            .slice_mut(ndarray::s![..keep, ..keep])
            .assign(&self.coeffs.slice(ndarray::s![..keep, ..keep]));
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: &self.coeffs * factor,
        }
    }
}

fn check_rank(m: usize, ordering: &ModeOrdering) -> Result<()> {
    if m == 0 || m > ordering.len() {
        return Err(Error::RankOutOfRange {
            rank: m,
            len: ordering.len(),
        });
    }
    Ok(())
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: Self) -> SpectralField {
        assert_eq!(self.modes(), rhs.modes(), "mode count mismatch");
        SpectralField {
            coeffs: &self.coeffs + &rhs.coeffs,
        }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: Self) -> SpectralField {
        assert_eq!(self.modes(), rhs.modes(), "mode count mismatch");
        SpectralField {
            coeffs: &self.coeffs - &rhs.coeffs,
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

/// Values at the midpoint nodes `((i + ½)/N, (j + ½)/N)`; row index is x.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    values: Array2<f64>,
}

impl GridField {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::GridTooSmall(rows));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: Array2::zeros((n, n)),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn((n, n), |(i, j)| f(node(i, n), node(j, n)));
        Self { values }
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// Midpoint-rule integral over the unit square.
    pub fn integral(&self) -> f64 {
        let n = self.size() as f64;
        self.values.sum() * DOMAIN_AREA / (n * n)
    }

    pub fn mean(&self) -> f64 {
        self.integral() / DOMAIN_AREA
    }

    /// `(∫ |f|^p)^{1/p}` by the midpoint rule.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let n = self.size() as f64;
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (sum * DOMAIN_AREA / (n * n)).powf(1.0 / p)
    }

    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.size(), other.size(), "grid size mismatch");
        let n = self.size() as f64;
        Zip::from(&self.values)
            .and(&other.values)
            .fold(0.0, |acc, a, b| acc + a * b)
            * DOMAIN_AREA
            / (n * n)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Midpoint node `(i + ½)/n`.
pub fn node(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// Cosine transform pair between `K × K` coefficients and an `N × N` grid.
#[derive(Clone, Debug)]
pub struct CosineTransform {
    modes: usize,
    grid: usize,
    // basis[i, k] = n_k cos(kπ x_i)
    basis: Array2<f64>,
    basis_t: Array2<f64>,
}

impl CosineTransform {
    pub fn new(modes: usize, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::GridTooSmall(grid));
        }
        if modes > grid {
            return Err(Error::GridBelowModes { modes, grid });
        }
        let basis = Array2::from_shape_fn((grid, modes), |(i, k)| {
            normalisation(k) * (k as f64 * PI * node(i, grid)).cos()
        });
        let basis_t = basis.t().to_owned();
        Ok(Self {
            modes,
            grid,
            basis,
            basis_t,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn to_physical(&self, f: &SpectralField) -> Result<GridField> {
        if f.modes() != self.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: f.modes(),
            });
        }
        let values = self.basis.dot(&f.coeffs).dot(&self.basis_t);
        Ok(GridField { values })
    }

    /// Discrete projection onto the retained modes; exact for any field whose
    /// product with a retained mode has wavenumbers below `2N`.
    pub fn to_spectral(&self, g: &GridField) -> Result<SpectralField> {
        if g.size() != self.grid {
            return Err(Error::GridMismatch {
                expected: self.grid,
                found: g.size(),
            });
        }
        let n = self.grid as f64;
        let mut coeffs = self.basis_t.dot(&g.values).dot(&self.basis);
        coeffs.mapv_inplace(|c| c / (n * n));
        Ok(SpectralField { coeffs })
    }
}

/// Evaluates `f` on an `n × n` grid.
pub fn to_physical(f: &SpectralField, n: usize) -> Result<GridField> {
    CosineTransform::new(f.modes(), n)?.to_physical(f)
}

/// Projects a grid field onto `modes × modes` coefficients.
pub fn to_spectral(g: &GridField, modes: usize) -> Result<SpectralField> {
    CosineTransform::new(modes, g.size())?.to_spectral(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormOrder {
    L2,
    L4,
    L8,
}

impl NormOrder {
    pub fn exponent(self) -> u32 {
        match self {
            Self::L2 => 2,
            Self::L4 => 4,
            Self::L8 => 8,
        }
    }

    /// Smallest grid on which the midpoint rule integrates `|f|^p` exactly for
    /// a `modes`-mode field.
    pub fn required_grid(self, modes: usize) -> usize {
        match self {
            Self::L2 => modes.max(2),
            Self::L4 => 2 * modes,
            Self::L8 => 4 * modes,
        }
    }
}

impl TryFrom<u32> for NormOrder {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            2 => Ok(Self::L2),
            4 => Ok(Self::L4),
            8 => Ok(Self::L8),
            other => Err(Error::UnsupportedNorm(other)),
        }
    }
}

/// Norm evaluation with a cached quadrature grid.
#[derive(Clone, Debug)]
pub struct NormEvaluator {
    transform: CosineTransform,
}

impl NormEvaluator {
    /// Default evaluation grid of `2K` points, enough for L² and L⁴.
    pub fn new(modes: usize) -> Result<Self> {
        Self::with_grid(modes, 2 * modes.max(1))
    }

    pub fn with_grid(modes: usize, grid: usize) -> Result<Self> {
        Ok(Self {
            transform: CosineTransform::new(modes, grid)?,
        })
    }

    pub fn transform(&self) -> &CosineTransform {
        &self.transform
    }

    pub fn norm(&self, f: &SpectralField, order: NormOrder) -> Result<f64> {
        match order {
            NormOrder::L2 => Ok(f.l2_norm()),
            _ => {
                let grid = self.transform.to_physical(f)?;
                self.grid_norm(&grid, order, f.modes())
            }
        }
    }

    /// Lp norm of an already transformed field, with the aliasing check.
    pub fn grid_norm(&self, grid: &GridField, order: NormOrder, modes: usize) -> Result<f64> {
        let required = order.required_grid(modes);
        if grid.size() < required {
            return Err(Error::Aliasing {
                order: order.exponent(),
                modes,
                grid: grid.size(),
                required,
            });
        }
        Ok(grid.lp_norm(order.exponent() as f64))
    }
}

/// `‖f‖_{L^p}` for `p ∈ {2, 4, 8}`, using an `n_eval`-point quadrature grid.
pub fn norm(f: &SpectralField, p: u32, n_eval: usize) -> Result<f64> {
    let order = NormOrder::try_from(p)?;
    NormEvaluator::with_grid(f.modes(), n_eval)?.norm(f, order)
}

/// `‖∇f‖_{L²}`.
pub fn grad_norm_l2(f: &SpectralField) -> f64 {
    f.grad_norm_l2()
}
