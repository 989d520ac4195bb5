//! Error type shared across the toolkit.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// File is structurally not the expected format (wrong magic, bad header).
    #[error("format error: {0}")]
    Format(String),

    /// File has the right structure but inconsistent or out-of-range content.
    #[error("corrupt data: {0}")]
    Corrupt(String),

    /// Caller violated an argument contract (shape/batch mismatch, bad size).
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// Training produced a non-finite loss; `term` names the offending scalar.
    #[error("non-finite loss in term `{term}` at step {step}")]
    NonFinite { term: &'static str, step: u64 },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
