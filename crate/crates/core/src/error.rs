use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A word set violates suffix-incomparability.
    #[error("integrity error: word {shorter:?} is a suffix of {longer:?}")]
    SuffixComparable { shorter: String, longer: String },

    /// An internal cross-check failed (e.g. a moment with non-zero imaginary part).
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// A value could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
