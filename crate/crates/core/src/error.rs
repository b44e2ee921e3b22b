use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("ambiguous model specification: {0}")]
    Ambiguity(String),
    #[error("moment order {n} is below the threshold n* = {threshold}")]
    MomentOutOfRange { n: f64, threshold: f64 },
    #[error("input is not convex: slope decreases by {drop:e} at sample {index}")]
    Convexity { index: usize, drop: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("cluster touches the field edge")]
    OpenCluster,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
