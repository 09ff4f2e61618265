//! Spectral simulation of two-species reaction-diffusion systems on the unit
//! square with homogeneous Neumann boundaries, together with the tools used
//! to check that finitely many low modes determine long-time behaviour.

pub mod diagnostics;
pub mod error;
pub mod grashof;
pub mod integrator;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
pub use integrator::{
    load_checkpoint, save_checkpoint, InitialCondition, Integrator, IntegratorConfig,
    PositivityWarning, SimulationState,
};
pub use model::{validate_properties, ForcingSpec, ModelParams, PropertyReport, Verdict};
pub use spectral::{
    BasisConvention, CosineTransform, GridField, ModeOrdering, NormEvaluator, NormOrder,
    SpectralField,
};
