//! Derivatives of `H` and `S` and the numerical checks built on them.

mod checks;
mod derivatives;
mod finite_diff;

pub use checks::{
    cm_check, conjecture33_scan, corollary1_check, corollary1_middle, section3_suite, theorem1_sign_check, CheckConfig,
    CheckReport, Finding, FindingKind, Section3Options,
};
pub use derivatives::{
    shannon_derivative_exact, shannon_derivative_parts, shannon_prime, sum_squares_prime, DerivativeMethod,
    DerivativeParts, DerivativeRequest, DEFAULT_MAX_ORDER, FD_SAMPLE_TAIL,
};
pub use finite_diff::{auto_step, finite_difference_derivative, FdEstimate};
