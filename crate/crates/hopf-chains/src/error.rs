use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("split {split} out of range for degree {degree}")]
    SplitOutOfRange { split: usize, degree: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("state {to} reached from {from} is outside the state list; image was {image}")]
    StateEscape { from: String, to: String, image: String },
    #[error("negative entry {value} at ({from}, {to})")]
    NegativeEntry { from: String, to: String, value: String },
    #[error("state cap exceeded: more than {cap} states")]
    CapExceeded { cap: usize },
    #[error("not a state space basis: {0}")]
    InvalidBasis(String),
    #[error("kernel condition fails: {0}")]
    KernelCondition(String),
    #[error("eigen-equation fails: {0}")]
    EigenEquation(String),
    #[error("inconsistent dimension series: {0}")]
    InconsistentDimensions(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
