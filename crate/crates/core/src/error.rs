use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("complexity bound {0} exceeded")]
    ComplexityExceeded(usize),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(usize),
    #[error("gamma value gives alpha = {0}, which is not below 1")]
    InvalidGamma(f64),
    #[error("enumeration bound exceeded: max tree size {0} > 16")]
    EnumerationTooLarge(usize),
    #[error("no matching multiset of entries for a degenerate component")]
    MatchFailure,
    #[error("entries disagree on the adjacency of two good vertices")]
    InconsistentAdjacency,
    #[error("certificate does not match graph: {0}")]
    InvalidCertificate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
