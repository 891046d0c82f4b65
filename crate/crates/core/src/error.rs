use thiserror::Error;

/// Errors raised by model construction, enumeration and sampling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("graph file line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("state space of size {states} exceeds the configured cap of {cap}")]
    CapExceeded { states: u128, cap: u128 },

    #[error("transformed signature is not symmetric (max deviation {deviation:e})")]
    NonSymmetricSignature { deviation: f64 },

    #[error("transform matrix is singular (det = {det:e})")]
    SingularTransform { det: f64 },

    #[error("chain is not reversible (detailed-balance residual {residual:e})")]
    NotReversible { residual: f64 },

    #[error("coupling from the past did not coalesce within {max_steps} steps")]
    NonCoalescence { max_steps: u64 },

    #[error("bounding chains lost their order at time {time}")]
    OrderViolation { time: i64 },

    #[error("mismatched support: {left} states vs {right} states")]
    MismatchedSupport { left: usize, right: usize },

    #[error("chain {chain} cannot run on a {state} state")]
    StateKindMismatch { chain: &'static str, state: &'static str },

    #[error("malformed trace: {0}")]
    Trace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
