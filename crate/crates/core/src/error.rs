//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by feature extraction, tracking, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its legal range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input data violates a precondition (empty map, dimension mismatch, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A text file does not match its expected layout.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// Filesystem or image decode failure, with the offending path.
    #[error("i/o error on {path}: {message}")]
    Io { path: PathBuf, message: String },

    /// A computation became singular or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
