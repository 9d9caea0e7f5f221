use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input failed structural validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// An exponential oracle routine was asked to enumerate a family that is too large.
    #[error("oracle scale only: family of size {size} exceeds the limit of {limit}")]
    OracleScale { size: usize, limit: usize },

    /// A calibrated critical-value table does not cover the requested size.
    #[error(
        "no calibrated constant for size {requested} (table covers up to {covered}); \
         run the calibration routine to extend the table"
    )]
    MissingCalibration { requested: usize, covered: usize },

    /// Bisection could not bracket the calibrated constant.
    #[error("bisection bracket failure on [{lo}, {hi}]: {reason}")]
    Bracket { lo: f64, hi: f64, reason: String },

    /// A verification suite found an instance violating an expected identity.
    #[error("counterexample in {suite}: {detail}")]
    Counterexample { suite: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
