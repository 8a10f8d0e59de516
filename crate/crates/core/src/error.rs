use thiserror::Error;

use crate::interval::KInterval;

/// Errors produced by the arithmetic, linear algebra and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval endpoints must be finite, got [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },

    #[error("arithmetic overflow: result has a non-finite endpoint")]
    Overflow,

    #[error("division by {0}, whose proper projection contains zero")]
    DivisionByZeroContaining(KInterval),

    #[error("{0} has no multiplicative inverse: zero lies in its proper projection")]
    ZeroInProjection(KInterval),

    #[error("shape mismatch in {op}: expected {expected}, found {found}")]
    ShapeMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("immersed vector must have even length, got {0}")]
    OddLength(usize),

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("matrix is not absolutely regular ({0})")]
    NotAbsolutelyRegular(String),

    #[error("cannot build an absolutely regular point splitting: {0}")]
    SplittingFailure(String),

    #[error("no row with a zero-free diagonal candidate for column {column}")]
    NoValidDiagonal { column: usize },

    #[error("error bound unavailable: spectral radius {0} is not below one")]
    BoundUnavailable(f64),

    #[error("midpoint system for the starting vector is singular")]
    StartFailure,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_mismatch(
    op: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> Error {
    Error::ShapeMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
