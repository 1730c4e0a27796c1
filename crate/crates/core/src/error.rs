use thiserror::Error;

/// Failure categories shared by every module.
///
/// The split mirrors the CLI exit-code taxonomy: `Precondition` maps to 3,
/// `Numerical` to 4 and `Verification` to 5.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("format error: {0}")]
    Format(String),
}

impl GeomError {
    pub fn param(msg: impl Into<String>) -> Self {
        GeomError::InvalidParameter(msg.into())
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        GeomError::Precondition(msg.into())
    }

    pub fn num(msg: impl Into<String>) -> Self {
        GeomError::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
