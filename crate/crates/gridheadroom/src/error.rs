//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Broad class of a failure, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unreadable, malformed or unacceptable input data.
    Data,
    /// Invalid configuration: flags, mappings, scenario values.
    Config,
    /// An internal invariant did not hold.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("input stream is empty")]
    EmptyInput,
    #[error("column '{0}' not found in input header")]
    MissingColumn(String),
    #[error("malformed mapping file: {0}")]
    Mapping(String),
    #[error(
        "data quality: {synthesized_fraction:.4} of intervals were synthesized (limit {limit})"
    )]
    DataQuality {
        synthesized_fraction: f64,
        limit: f64,
    },
    #[error("dataset is not canonical: {0}")]
    InvalidDataset(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid analysis request: {0}")]
    Analysis(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Csv(_)
            | Error::EmptyInput
            | Error::DataQuality { .. }
            | Error::InvalidDataset(_) => ErrorKind::Data,
            Error::MissingColumn(_)
            | Error::Mapping(_)
            | Error::InvalidScenario(_)
            | Error::Config(_)
            | Error::Analysis(_) => ErrorKind::Config,
            Error::Internal(_) => ErrorKind::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
