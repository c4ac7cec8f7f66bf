use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands live on different spaces, or an argument is outside the
    /// operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size guard was exceeded.
    #[error("capacity exceeded: {what} = {requested}, limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid structure: {0}")]
    Invalid(String),

    #[error("unsupported sequence: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
