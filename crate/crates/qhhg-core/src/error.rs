//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by parameter validation, numerics, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violates a physical or structural invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Argument outside the supported numerical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result was requested outside the regime in which it is meaningful;
    /// never silently accepted.
    #[error("numerical regime rejected: {0}")]
    Regime(String),

    /// The iterative eigensolver did not converge.
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    /// Configuration document is malformed or violates the schema.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure, with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// CLI exit code class: 2 for config/input problems, 3 for numerical
    /// regime rejections.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Domain(_) | Error::Config(_) | Error::Io { .. } => 2,
            Error::Regime(_) | Error::Eigensolver(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
