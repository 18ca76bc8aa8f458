use thiserror::Error;

/// Errors raised by the mixture-bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("x = {x} lies outside the support [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("family mismatch: {0} vs {1}")]
    FamilyMismatch(String, String),

    #[error("mixture weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },

    #[error("natural parameter outside the domain of the log-normalizer: {0}")]
    NaturalDomain(String),

    #[error(
        "quadrature on [{a}, {b}] did not converge: estimate {estimate} with error {error} after {intervals} subintervals"
    )]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("monte-carlo estimator hit a non-finite log-density ratio at x = {x}")]
    NonFiniteSample { x: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
