use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the grid, norm, solver and harness layers.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value in norm cell (j = {j}, k = {k}): {what}")]
    Overflow { j: usize, k: i64, what: String },

    #[error("step size violates stability limit at t = {t}: {detail}")]
    StepSize { t: f64, detail: String },

    #[error("solution diverged at t = {t}: {detail}")]
    Divergence { t: f64, detail: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config error in {path}: {detail}")]
    Config { path: PathBuf, detail: String },
}

impl LabError {
    pub fn param(msg: impl Into<String>) -> Self {
        LabError::Parameter(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
