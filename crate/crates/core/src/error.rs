use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero charge or zero direction where a nonzero one is required")]
    ZeroCharge,
    #[error("degenerate central charge configuration: {0}")]
    DegenerateConfig(String),
    #[error("ring or lattice mismatch: {0}")]
    Mismatch(String),
    #[error("element has a constant term: {0}")]
    NotNilpotent(String),
    #[error("inversion produced a non-integral value: {0}")]
    NonIntegral(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not primitive: ({0}, {1})")]
    NotPrimitive(i64, i64),
    #[error("tropical ends are not generic: {0}")]
    NonGeneric(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
