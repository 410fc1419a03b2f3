use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("integrity: {0}")]
    Integrity(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown {kind} '{id}'")]
    NotFound { kind: &'static str, id: String },

    #[error("users share no co-rated item")]
    NoOverlap,

    #[error("user '{0}' has no profile in the selected mode")]
    NoProfile(String),

    #[error("dataset has no users")]
    EmptyDataset,

    #[error("experiment: {0}")]
    Experiment(String),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
