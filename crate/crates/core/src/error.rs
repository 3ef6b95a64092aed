use thiserror::Error;

/// Errors raised by the family, series, quadrature and checking routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("n must be positive, got {n}")]
    NonPositiveN { n: f64 },
    #[error("for c >= 0 the rate n must exceed c (c = {c}, n = {n})")]
    NLeqC { c: f64, n: f64 },
    #[error("for c < 0, -n/c must be a positive integer (c = {c}, n = {n}, -n/c = {ratio})")]
    NonIntegerL { c: f64, n: f64, ratio: f64 },
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    DomainViolation { x: f64, lo: f64, hi: f64 },
    #[error("series did not reach tail bound {abs_tol:e} within {max_terms} terms (last bound {last_bound:e})")]
    MaxTermsExceeded {
        abs_tol: f64,
        max_terms: usize,
        last_bound: f64,
    },
    #[error("log of sum of squares is undefined: S = {value} with error bound {error_bound}")]
    DegenerateLog { value: f64, error_bound: f64 },
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("finite-difference stencil [{lo}, {hi}] leaves the domain")]
    StencilOutsideDomain { lo: f64, hi: f64 },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("quadrature estimate {estimate:e} above tolerance {abs_tol:e} after {subdivisions} subdivisions")]
    ToleranceNotReached {
        estimate: f64,
        abs_tol: f64,
        subdivisions: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
