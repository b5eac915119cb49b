use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = GprError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GprError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("insufficient tail data: {found} qualifying rows, need at least {needed}")]
    InsufficientTailData { needed: usize, found: usize },

    #[error("fit failed after {restarts} starts: {reason}")]
    FitFailure { restarts: usize, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GprError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GprError::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        GprError::InvalidConfig(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GprError::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GprError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(GprError::invalid(format!("{name} must be finite, got {value}")))
    }
}
