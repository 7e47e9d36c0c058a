use thiserror::Error;

/// Errors raised by distribution queries, fitting, and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EwpsError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment does not exist: {0}")]
    NonExistence(String),

    #[error("integral or series diverges: {0}")]
    Divergence(String),

    #[error("mixture truncation needs {needed} terms, more than the cap of {cap}")]
    TruncationCap { needed: usize, cap: usize },

    #[error("quadrature failed to reach tolerance: estimate {estimate:.3e}, error {error:.3e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root not bracketed on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, EwpsError>;

impl From<std::io::Error> for EwpsError {
    fn from(e: std::io::Error) -> Self {
        EwpsError::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(EwpsError::Domain(msg.into()))
}
