use thiserror::Error;

/// Errors raised by operator construction, solvers and instance I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operator is not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("non-finite value encountered at iteration {iter}")]
    NonFinite { iter: usize },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("dense oracle limited to {limit} total dimensions, got {dims}")]
    OracleScale { dims: usize, limit: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: context.to_string(),
            expected,
            found,
        })
    }
}
