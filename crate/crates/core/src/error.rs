use thiserror::Error;

/// Errors raised by the verification engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-p-integral value: {p} divides the denominator")]
    NonPIntegral { p: u64 },

    #[error("non-unit series: constant term is zero")]
    NonUnitSeries,

    #[error("division by zero polynomial at (n, k) = ({n}, {k})")]
    DivisionByZero { n: i64, k: i64 },

    #[error("division by zero polynomial")]
    ZeroDenominator,

    #[error("non-unit denominator at (n, k) = ({n}, {k})")]
    NonUnitDenominator { n: i64, k: i64 },

    #[error("negative valuation {valuation} at (n, k) = ({n}, {k}); multiply through by a power of q first")]
    NegativeValuation { n: i64, k: i64, valuation: i64 },

    #[error("non-integral q-exponent at (n, k) = ({n}, {k})")]
    FractionalExponent { n: i64, k: i64 },

    #[error("ill-posed specialization: {0}")]
    IllPosed(String),

    #[error("no convergence within a budget of {budget} terms")]
    NoConvergence { budget: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
