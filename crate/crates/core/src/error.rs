use std::path::PathBuf;

use thiserror::Error;

/// Every failure the solver can report.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-positive depth or buoyancy ({quantity} = {value:e}) at {location}")]
    NonPositiveDepth {
        quantity: &'static str,
        value: f64,
        location: String,
    },

    #[error("negative radicand {value:e} in wave-speed estimate at {location}")]
    NegativeRadicand { value: f64, location: String },

    #[error("elliptic solve did not converge after {iterations} iterations (residual {residual:e})")]
    EllipticNoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {field} at cell ({j}, {k}), t = {t}, {stage}")]
    NonFinite {
        field: &'static str,
        j: usize,
        k: usize,
        t: f64,
        stage: &'static str,
    },

    #[error("run broke down: {0}")]
    BlowUp(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed file: {reason}")]
    Parse { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, SolverError>;

impl SolverError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SolverError::Io {
            path: path.into(),
            source,
        }
    }
}
