//! Exact derivatives of `H_{n,c}` by repeated use of the basis recurrence
//! `p' = n (p_{n+c,k-1} - p_{n+c,k})`.
//!
//! With `L(x) = ln((1+cx)/x)` and `g(k) = ln((k+1)/(n+ck))`,
//!
//! ```text
//! H'(x)       = n (L(x) + Σ_k p_{n+c,k}(x) g(k))
//! H^(j+1)(x)  = n L^(j)(x) + n (n+c)(n+2c)...(n+jc) Σ_k p_{n+(j+1)c,k}(x) Δ^j g(k)
//! ```
//!
//! where `Δ` is the forward difference in `k`. For `c < 0` the product
//! vanishes once `j >= l`, leaving only the closed part.

use serde::{Deserialize, Serialize};

use crate::basis::expectation;
use crate::calculus::finite_diff::{auto_step, finite_difference_derivative};
use crate::entropies::shannon;
use crate::error::{Error, Result};
use crate::params::FamilyParams;
use crate::series::{sum_over_support, Envelope, Tail, TruncationPolicy};

pub const DEFAULT_MAX_ORDER: usize = 10;

/// Series tail for the samples of a finite-difference estimate. A tail at
/// the general default would be amplified by `h^{-m}` into the estimate.
pub const FD_SAMPLE_TAIL: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeRequest {
    pub params: FamilyParams,
    pub x: f64,
    pub order: usize,
    pub method: DerivativeMethod,
}

impl DerivativeRequest {
    pub fn evaluate(&self, policy: &TruncationPolicy) -> Result<f64> {
        match self.method {
            DerivativeMethod::Exact => shannon_derivative_exact(&self.params, self.x, self.order, policy),
            DerivativeMethod::FiniteDifference => {
                if self.order == 0 || self.order > DEFAULT_MAX_ORDER {
                    return Err(Error::OrderTooHigh {
                        order: self.order,
                        max: DEFAULT_MAX_ORDER,
                    });
                }
                self.params.check_interior(self.x)?;
                let domain = self.params.domain();
                let h = auto_step(self.x, self.order, domain);
                let sample = TruncationPolicy::new(policy.abs_tol.min(FD_SAMPLE_TAIL), policy.max_terms)?;
                let f = |t: f64| shannon(&self.params, t, &sample).map(|v| v.value);
                finite_difference_derivative(f, self.x, self.order, h, domain).map(|e| e.value)
            }
        }
    }
}

/// A derivative split into the closed-form part and the series part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeParts {
    pub value: f64,
    pub closed: f64,
    pub series: f64,
    /// Tail and rounding bound on `series`.
    pub error_bound: f64,
    /// Sum of the absolute values of every term entering `value`.
    pub magnitude: f64,
}

impl DerivativeParts {
    /// Size of the terms that cancel to give `value`; rounding error in
    /// `value` is a small multiple of `EPSILON * scale()`.
    pub fn scale(&self) -> f64 {
        self.magnitude
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// `L^{(j)}(x)` for `L(x) = ln(1 + cx) - ln x`, with the sum of the
/// magnitudes of its two terms.
fn log_ratio_derivative(c: f64, x: f64, j: usize) -> (f64, f64) {
    if j == 0 {
        let (a, b) = ((c * x).ln_1p(), x.ln());
        return (a - b, a.abs() + b.abs());
    }
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    let ji = j as i32;
    let shifted = if c == 0.0 { 0.0 } else { (c / (1.0 + c * x)).powi(ji) };
    let inverse = x.powi(-ji);
    let fact = factorial(j - 1);
    (sign * fact * (shifted - inverse), fact * (shifted.abs() + inverse))
}

fn binomials(j: usize) -> Vec<f64> {
    let mut row = vec![1.0; j + 1];
    for i in 1..j {
        row[i] = row[i - 1] * (j - i + 1) as f64 / i as f64;
    }
    row
}

/// `H^{(order)}(x)` split into parts; `order >= 1`.
pub fn shannon_derivative_parts(
    params: &FamilyParams,
    x: f64,
    order: usize,
    policy: &TruncationPolicy,
) -> Result<DerivativeParts> {
    if order == 0 || order > DEFAULT_MAX_ORDER {
        return Err(Error::OrderTooHigh {
            order,
            max: DEFAULT_MAX_ORDER,
        });
    }
    params.check_interior(x)?;
    let (c, n) = (params.c(), params.n());
    let j = order - 1;
    let (closed, closed_magnitude) = log_ratio_derivative(c, x, j);
    let (closed, closed_magnitude) = (n * closed, n * closed_magnitude);
    let closed_only = DerivativeParts {
        value: closed,
        closed,
        series: 0.0,
        error_bound: 0.0,
        magnitude: closed_magnitude,
    };
    let Some(shifted) = params.shifted(j as u64 + 1) else {
        return Ok(closed_only);
    };
    let factor: f64 = n * (1..=j).map(|i| n + i as f64 * c).product::<f64>();
    if factor == 0.0 {
        return Ok(closed_only);
    }
    let g = |k: u64| ((k as f64 + 1.0) / (n + c * k as f64)).ln();
    let weights = binomials(j);
    // Δ^j g(k) together with Σ_i C(j,i) |g(k+i)|
    let delta = |k: u64| -> (f64, f64) {
        weights.iter().enumerate().fold((0.0, 0.0), |(v, m), (i, w)| {
            let sign = if (j - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            let gi = g(k + i as u64);
            (v + sign * w * gi, m + w * gi.abs())
        })
    };
    let envelope = if j == 0 {
        Envelope::polynomial(n.ln().abs() + 2.0, 1)
    } else {
        Envelope::polynomial(2.0 * factorial(j - 1), 0)
    };
    let mut term_magnitude = 0.0;
    let raw = sum_over_support(&shifted, x, policy, Tail::Weighted(envelope), |k, p, _| {
        let (d, m) = delta(k);
        term_magnitude += p * m;
        p * d
    })?;
    let series = factor * raw.value.value;
    let magnitude = closed_magnitude + factor.abs() * term_magnitude;
    let error_bound =
        factor.abs() * raw.error_bound() + (j as f64 + 4.0) * f64::EPSILON * factor.abs() * term_magnitude;
    Ok(DerivativeParts {
        value: closed + series,
        closed,
        series,
        error_bound,
        magnitude,
    })
}

/// `H^{(order)}(x)`, `1 <= order <= 10`.
pub fn shannon_derivative_exact(params: &FamilyParams, x: f64, order: usize, policy: &TruncationPolicy) -> Result<f64> {
    shannon_derivative_parts(params, x, order, policy).map(|p| p.value)
}

/// `H'(x) = n (ln((1+cx)/x) + Σ_k p_{n+c,k}(x) ln((k+1)/(n+ck)))`.
pub fn shannon_prime(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<f64> {
    shannon_derivative_exact(params, x, 1, policy)
}

/// `S'(x) = 2n Σ_k p_{n,k}(x) (p_{n+c,k-1}(x) - p_{n+c,k}(x))`.
pub fn sum_squares_prime(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<f64> {
    params.check_interior(x)?;
    let shifted = params
        .shifted(1)
        .expect("support size is at least one for validated parameters");
    let diff = |k: u64| {
        let lower = if k == 0 {
            0.0
        } else {
            crate::basis::log_basis_unchecked(&shifted, k - 1, x).exp()
        };
        lower - crate::basis::log_basis_unchecked(&shifted, k, x).exp()
    };
    let s = expectation(params, x, diff, Envelope::polynomial(1.0, 0), policy)?;
    Ok(2.0 * params.n() * s.value)
}
