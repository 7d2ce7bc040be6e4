use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator, the learner and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of a formula (non-positive distance, empty vector, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration field holds an invalid value.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// Tensor or vector shapes disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An operation was called in the wrong lifecycle state (e.g. `step` after `done`).
    #[error("invalid state: {0}")]
    State(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
