use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: unknown entity id {id}")]
    UnknownEntity { path: PathBuf, line: usize, id: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("seed pair list is empty")]
    EmptySeeds,

    #[error("test pair list is empty")]
    EmptyTestSet,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("entity index {index} out of range for a graph with {count} entities")]
    EntityOutOfRange { index: usize, count: usize },

    #[error("embedding file {path} has no vector for entity id {id}")]
    MissingEmbedding { path: PathBuf, id: u64 },

    #[error("{0}")]
    Trace(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, line: usize, reason: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    /// Usage-level errors (bad flags or config values) as opposed to data errors.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }
}
