//! Front end for the `detmodes` binary: configuration, the experiment
//! commands and their file outputs.

pub mod commands;
pub mod config;
pub mod svg;
pub mod sweep;

use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// A structural property of the model fails.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Runtime(#[from] detmodes::Error),

    #[error("{0}")]
    Io(String),

    #[error("config error: {0}")]
    Parse(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Runtime(detmodes::Error::PropertyViolation(_)) => 1,
            Self::Runtime(_) | Self::Io(_) => 2,
            Self::Parse(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}
