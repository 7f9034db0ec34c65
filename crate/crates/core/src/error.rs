use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported profile: {0}")]
    Unsupported(String),

    #[error("invalid mechanism `{input}`: {reason}")]
    InvalidMechanism { input: String, reason: String },

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File { path: path.into(), source }
    }
}
