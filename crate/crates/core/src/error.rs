use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is too small (need at least 2 points per dimension)")]
    GridTooSmall(usize),

    #[error("transform maps {modes} modes onto {grid} points; the grid must hold at least as many points as modes")]
    GridBelowModes { modes: usize, grid: usize },

    #[error("field has {found} modes per dimension, expected {expected}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("grid has {found} points per dimension, expected {expected}")]
    GridMismatch { expected: usize, found: usize },

    #[error("coefficient array must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value at index ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("rank {rank} is outside 1..={len} of the mode ordering")]
    RankOutOfRange { rank: usize, len: usize },

    #[error("unsupported norm order L{0}; supported orders are 2, 4 and 8")]
    UnsupportedNorm(u32),

    #[error("L{order} quadrature of a {modes}-mode field needs a grid of at least {required} points, got {grid}")]
    Aliasing {
        order: u32,
        modes: usize,
        grid: usize,
        required: usize,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("forcing term ({k}, {l}) lies outside the {modes} retained modes")]
    ForcingOutOfRange { k: usize, l: usize, modes: usize },

    #[error("property validation failed: {0}")]
    PropertyViolation(String),

    #[error("simulation diverged at step {step} (t = {t})")]
    Divergence { step: u64, t: f64 },

    #[error("insufficient horizon: need {needed} time units after burn-in, have {available}")]
    InsufficientHorizon { needed: f64, available: f64 },

    #[error("series is empty")]
    EmptySeries,

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
