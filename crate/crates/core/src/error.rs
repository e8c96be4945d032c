use thiserror::Error;

/// Errors shared by every module of the lab.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size cap exceeded: {dimension} has size {size}, cap is {cap}")]
    CapExceeded {
        dimension: String,
        size: String,
        cap: u128,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("event has zero probability mass")]
    ZeroMass,
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no failure certificate: the function looks pseudorandom at the tested parameters")]
    NoCertificate,
    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(dimension: impl Into<String>, size: impl ToString, cap: u128) -> Self {
        Error::CapExceeded {
            dimension: dimension.into(),
            size: size.to_string(),
            cap,
        }
    }
}
