//! Crate-wide error type and exit-code mapping.

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

    /// Malformed or inconsistent input data (files, cohorts, meshes, labels).
    #[error("invalid data: {0}")]
    Data(String),

    /// A numerical routine failed (non-convergence, singular system, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Invalid configuration or usage.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// SVM optimizer hit its iteration cap. The best iterate reached so far
    /// is attached so callers can inspect or accept it explicitly.
    #[error("svm did not converge after {iterations} pair updates (kkt violation {violation:.3e} > tol)")]
    SvmNonConvergence {
        iterations: usize,
        violation: f64,
        best: Box<crate::classifiers::BinaryScorer>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage/config, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Numeric(_) | Error::SvmNonConvergence { .. } => 3,
            _ => 2,
        }
    }
}
