use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid Cartan type {family}{rank}")]
    InvalidCartanType { family: String, rank: usize },
    #[error("the zero vector is not a root")]
    ZeroRoot,
    #[error("node {node} of {cartan} is not cominuscule")]
    NotCominuscule { cartan: String, node: usize },
    #[error("unknown pair label `{0}`")]
    UnknownPair(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("structural check failed: {0}")]
    Structural(String),
    #[error("point lies outside the open cell P+ K P-")]
    OutsideOpenCell,
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("invalid decimal `{0}`")]
    InvalidDecimal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
