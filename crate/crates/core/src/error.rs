use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} nodes, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid model specification: {0}")]
    Spec(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sampler unsupported for {0} model")]
    UnsupportedSampler(&'static str),

    #[error("{operation} unsupported for {model} model")]
    Unsupported {
        operation: &'static str,
        model: &'static str,
    },

    #[error("normalization error: observed graph has total weight {observed}, model has {model}")]
    Normalization { observed: f64, model: f64 },

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from user input (bad spec, bad file, bad
    /// arguments) as opposed to a runtime failure.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_) | Error::Undefined(_))
    }
}
