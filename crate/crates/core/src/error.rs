use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An index or parameter outside the domain of an operation.
    #[error("out of range: {0}")]
    Range(String),

    /// A checked cancellation (`u^{-1}w` or `wv^{-1}`) whose argument was not a prefix/suffix.
    #[error("cancellation failed: {0}")]
    Cancellation(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency check failed. Never expected on valid input.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// The block-level or word-length guard would be exceeded.
    #[error("resource guard exceeded: {0}")]
    Resource(String),

    /// A length has several closed-form representations whose predictions disagree.
    #[error("ambiguous length {m}: {candidates:?}")]
    Ambiguity { m: usize, candidates: Vec<String> },

    #[error("not a factor: {0}")]
    NotAFactor(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Scan results on a prefix and its extension differed even after escalation.
    #[error("prefix certification unstable: {0}")]
    Unstable(String),
}

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Range(msg.into()))
}
