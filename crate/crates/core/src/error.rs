use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("coefficient fields differ: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("series precisions differ: {0} vs {1}")]
    PrecisionMismatch(usize, usize),
    #[error("{0} has a denominator divisible by the characteristic")]
    NotIntegral(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is not a unit (zero constant term)")]
    NotAUnit,
    #[error("{0} is not a square in the coefficient field")]
    NotASquare(String),
    #[error("square roots of series are not supported in characteristic 2")]
    CharacteristicTwo,
    #[error("insufficient precision: need more than {needed}, have {have}")]
    InsufficientPrecision { needed: usize, have: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("assumption not satisfied: {0}")]
    AssumptionViolated(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("numerical evaluation did not converge: {0}")]
    NonConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
