use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid sparse vector: {0}")]
    InvalidSparseVector(String),

    #[error("label must be -1 or +1, got {0}")]
    InvalidLabel(f64),

    #[error("dataset must contain at least one example")]
    EmptyDataset,

    #[error("dual variable alpha[{index}] = {value} outside [0, 1]")]
    InfeasibleDual { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("svrg inner step requested before a snapshot was taken")]
    MissingSnapshot,

    #[error("suboptimality recording requested without a reference optimum")]
    MissingReference,

    #[error("iteration cap of {cap} reached with duality gap {gap:e} > tol {tol:e}")]
    IterationCap { cap: u64, gap: f64, tol: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),

    #[error("pool of {available} examples too small: need {needed}")]
    InsufficientPool { available: usize, needed: usize },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
