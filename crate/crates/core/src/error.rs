use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid element {0}")]
    InvalidElement(String),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
