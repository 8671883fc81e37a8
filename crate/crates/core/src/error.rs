use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("point set is empty")]
    Empty,
    #[error("point {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error("duplicate point id {0}")]
    DuplicateId(usize),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("points {0} and {1} have identical height and weight")]
    IdenticalPoints(usize, usize),
    #[error("x = {0} lies outside the step function's domain")]
    OutOfDomain(f64),
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),
    #[error("partition scheme: {0}")]
    InvalidPartition(String),
    #[error("anchor {0} is not finite or cannot be met")]
    InvalidAnchor(f64),
}
