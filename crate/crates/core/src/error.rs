use thiserror::Error;

/// Errors raised by constructors, compilers and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structurally or semantically invalid object.
    #[error("validation error: {0}")]
    Validation(String),
    /// An enumeration or simulation that would exceed its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// Operator and register dimensions disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn budget(msg: impl Into<String>) -> Error {
    Error::Budget(msg.into())
}
