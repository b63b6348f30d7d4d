use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    /// A caller broke a documented precondition (length mismatch, bad counts).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A state that cannot be evaluated in floating point (e.g. `exp(-h)` overflow).
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A leapfrog trajectory left the finite domain.
    #[error("trajectory diverged: {0}")]
    Divergence(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
