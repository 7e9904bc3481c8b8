//! Error types shared across the crate.
//!
//! State and row/column indices in error payloads are 1-based, matching the
//! convention used by instance files and reports.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A transition-matrix row does not sum to 1 within tolerance.
    /// Rows are reported 1-based; `deviation` is `|sum - 1|`.
    #[error("row {row} of the transition matrix deviates from sum 1 by {deviation:.3e}")]
    NonStochasticRow { row: usize, deviation: f64 },

    /// A transition probability is negative (1-based indices).
    #[error("negative transition probability at ({row}, {col})")]
    NegativeProbability { row: usize, col: usize },

    /// The discount factor violates the stated requirement.
    #[error("discount factor {beta} is invalid: {detail}")]
    BadDiscount { beta: f64, detail: String },

    /// Inconsistent dimensions between matrices, vectors, or state counts.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A reward, terminal reward, or charge is NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFiniteValue(String),

    /// An instance file does not match the expected schema.
    #[error("parse error: {0}")]
    ParseError(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Gaussian elimination found no usable pivot in the given column
    /// (0-based within the solved system).
    #[error("singular matrix: no usable pivot in column {col}")]
    SingularMatrix { col: usize },

    /// A pivoting step hit a near-zero denominator. At discount 1 this
    /// signals a recurrent class inside the continuation set.
    #[error("degenerate pivot at step {step}: denominator {value:e}")]
    DegeneratePivot { step: usize, value: f64 },

    /// The brute-force oracle only handles small state counts.
    #[error("instance too large for exhaustive enumeration: n = {n} > {max}")]
    InstanceTooLarge { n: usize, max: usize },
}

impl Error {
    pub(crate) fn bad_discount(beta: f64, detail: impl Into<String>) -> Self {
        Error::BadDiscount {
            beta,
            detail: detail.into(),
        }
    }

    pub(crate) fn dims(detail: impl Into<String>) -> Self {
        Error::DimensionMismatch(detail.into())
    }
}
