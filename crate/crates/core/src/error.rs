//! Crate-wide error type.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} rejects zero")]
    ZeroArgument(&'static str),

    #[error("{0} is not an odd prime")]
    NotAnOddPrime(BigInt),

    #[error("form is degenerate (zero determinant)")]
    DegenerateForm,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("form must have at least one coefficient")]
    EmptyForm,

    #[error("ranks differ: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("expected signature ({expected_pos},{expected_neg}), found ({found_pos},{found_neg})")]
    SignatureMismatch {
        expected_pos: usize,
        expected_neg: usize,
        found_pos: usize,
        found_neg: usize,
    },

    #[error("rank of the form ({rank}) does not match the presentation dimension ({dimension})")]
    DimensionMismatch { rank: usize, dimension: usize },

    #[error("requires m >= {minimum}, got {found}")]
    BelowMinimum { minimum: usize, found: usize },

    #[error("target profile is infeasible; violated conditions {violated:?}")]
    Infeasible { violated: Vec<u8> },

    #[error("generators do not close into a crystallographic group: {0}")]
    NotCrystallographic(String),

    #[error("search exhausted after {examined} candidates (bound {bound})")]
    SearchExhausted { examined: u64, bound: u64 },

    #[error("dimension must be odd and >= 3, got {0}")]
    BadGhwDimension(usize),

    #[error("n must be >= 1, got {0}")]
    BadImKimIndex(usize),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid certificate: {0}")]
    BadCertificate(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
