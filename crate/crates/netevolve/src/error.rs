use std::path::PathBuf;

use crate::graph::ActorId;

/// Errors raised by the analysis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("actor not found: {0}")]
    NotFound(ActorId),

    /// The metric has no meaningful value on this input (zero variance,
    /// too few nodes, no edges).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn undefined(what: impl Into<String>) -> Self {
        Error::UndefinedMetric(what.into())
    }

    pub(crate) fn invalid(what: impl Into<String>) -> Self {
        Error::InvalidArgument(what.into())
    }
}
