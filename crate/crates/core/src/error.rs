use std::path::PathBuf;

use thiserror::Error;

use crate::network::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Domain(String),

    #[error("invalid network:\n{0}")]
    InvalidNetwork(ValidationReport),

    #[error("cross-section table for {key}: {reason}")]
    CrossSection { key: String, reason: String },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("model emission failed: {0}")]
    Emission(String),

    #[error("convexity violation: {0}")]
    Convexity(String),

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("solver: {0}")]
    Solver(String),

    #[error("enumeration cap exceeded: {combinations} combinations > cap {cap}")]
    CapExceeded { combinations: u128, cap: u128 },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
