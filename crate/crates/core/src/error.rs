use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input at line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("orbital index {index} out of range (declared {declared}) at line {line}")]
    IndexOutOfBounds {
        index: usize,
        declared: usize,
        line: usize,
    },

    #[error("schema error (expected version {expected}): {msg}")]
    Schema { expected: u32, msg: String },

    #[error("validation failed: {0:?}")]
    Validation(Vec<String>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "{what}: {got} exceeds the configured cap of {cap}; project onto a symmetry sector instead"
    )]
    ResourceLimit {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("iterative eigensolver did not converge (residual norm {residual:.3e})")]
    NonConvergence { residual: f64 },

    #[error("symmetry sector is empty: {0}")]
    EmptySector(String),

    #[error("inconsistent sector labels: {0}")]
    InvalidLabels(String),

    #[error("no feasible error split: {0}")]
    InfeasibleSplit(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
