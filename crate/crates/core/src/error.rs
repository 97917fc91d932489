//! Shared error type for the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("grading mismatch: {0} vs {1}")]
    GradingMismatch(String, String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a complex: composite differential is nonzero at degree {degree}")]
    NotAComplex { degree: i64 },

    #[error("window required: {0}")]
    WindowRequired(String),

    #[error("use inverse_limit semantics in surgery::finite_type for backward systems")]
    BackwardSystem,

    #[error("degenerate slope: {0}")]
    DegenerateSlope(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("not subcritical: handle index {k} must be < {n}")]
    NotSubcritical { k: u32, n: u32 },

    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
