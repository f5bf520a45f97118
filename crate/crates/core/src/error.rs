use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0} is not available for this problem family")]
    Unsupported(&'static str),

    #[error("iteration diverged at k = {k} (norm = {norm})")]
    Divergence { k: u64, norm: f64 },

    #[error("parameter selection failed in {row}: {constraint}")]
    Selection { row: String, constraint: String },

    #[error("certification failed up to k = {k_max}: condition {condition} last violated at k = {last_k}")]
    Certification { condition: String, last_k: u64, k_max: u64 },

    #[error("no admissible Tikhonov constant: {0}")]
    NoAdmissibleConstant(String),

    #[error("inner solve stopped after {iterations} iterations with residual {residual}")]
    IncompleteSolve { iterations: usize, residual: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("cost matrix is not aligned: missing {0:?}")]
    Alignment(Vec<String>),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
