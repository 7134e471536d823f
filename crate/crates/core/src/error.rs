//! Crate-wide error type.
//!
//! Each module reports its own failure enum; [`Error`] wraps them so that
//! pipelines (bench, CLI) can use a single `Result` and still map every
//! failure onto an exit code.

use std::path::PathBuf;

use thiserror::Error;

use crate::entropy::EntropyError;
use crate::kmeans::KMeansError;
use crate::seeding::SeedingError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("invalid pixel grid: {0}")]
    InvalidGrid(String),

    #[error(transparent)]
    Entropy(#[from] EntropyError),

    #[error(transparent)]
    Seeding(#[from] SeedingError),

    #[error(transparent)]
    KMeans(#[from] KMeansError),

    #[error("elbow: {0}")]
    Elbow(String),

    #[error("manifest {path}, line {line}: {message}")]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("report: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by the filesystem or by undecodable files.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Format { .. })
    }
}
