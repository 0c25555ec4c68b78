use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series does not terminate: no numerator parameter is a non-positive integer (or q^-i)")]
    NonTerminating,

    #[error("denominator parameter vanishes at summation index {index}")]
    DenominatorPole { index: usize },

    #[error("degree {degree} outside 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("tridiagonal eigensolver did not converge for row {row}")]
    NoConvergence { row: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quadratic form is not positive definite (smallest eigenvalue {min_eigenvalue:.6e}, max coupling {})", describe_bound(.bound))]
    NotPositiveDefinite { min_eigenvalue: f64, bound: Option<f64> },

    #[error("no closed form is available for a custom interaction")]
    ClosedFormUnavailable,

    #[error("coupling bound is not defined for a custom interaction")]
    UnsupportedFamily,

    #[error("{count} Fock states exceed the configured cap of {cap}")]
    CombinatorialLimit { count: u128, cap: usize },

    #[error("spacing analysis needs at least 3 levels, got {0}")]
    TooFewLevels(usize),

    #[error("cannot rescale: all levels coincide")]
    DegenerateRange,
}

fn describe_bound(bound: &Option<f64>) -> String {
    match bound {
        Some(c) => format!("{c:.6}"),
        None => "unbounded".to_string(),
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
