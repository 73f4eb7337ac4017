use thiserror::Error;

use crate::scalar::HalfInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid identity element: {0}")]
    InvalidIdentity(String),

    #[error("degenerate pivot: f(x^{0}) must be nonzero")]
    DegeneratePivot(usize),

    #[error("datum has no identity element")]
    NoIdentity,

    #[error("basis index out of range for the datum: {0}")]
    DatumMismatch(String),

    #[error("element is not Z2-homogeneous")]
    NonHomogeneous,

    #[error("degree {degree} outside 0..={max}")]
    DegreeOutOfRange { degree: HalfInt, max: HalfInt },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(HalfInt, HalfInt),

    #[error("output degree {requested} exceeds the truncation degree {max}")]
    TruncationUncertain { requested: HalfInt, max: HalfInt },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid module configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
