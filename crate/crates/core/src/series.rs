//! Truncated summation over the support with a certified bound on the
//! discarded tail.
//!
//! For unbounded support the ratio `p_{k+1}/p_k` is non-increasing in `k`
//! (`n x/(k+1)` for `c = 0`, `(n/c + k)/(k+1) * cx/(1+cx)` for `c > 0`), so
//! once it drops below one at index `K` every later term is dominated by a
//! geometric sequence started at `p_K`.

use serde::{Deserialize, Serialize};

use crate::basis::log_basis_unchecked;
use crate::error::{Error, Result};
use crate::params::{FamilyParams, Support};

/// Absolute tolerance on the tail and cap on the number of summed terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "truncation policy needs abs_tol > 0 and max_terms >= 1 (got {abs_tol}, {max_terms})"
            )));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 100_000,
        }
    }
}

/// A truncated sum together with the bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Growth envelope `|f(k)| <= scale * (1 + k)^degree` promised by the caller
/// of [`crate::basis::expectation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub scale: f64,
    pub degree: u32,
}

impl Envelope {
    pub const fn polynomial(scale: f64, degree: u32) -> Self {
        Self { scale, degree }
    }
}

/// Shape of the summand, which determines how the tail is bounded.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Tail {
    /// `|s_k| <= p_k * E(k)`.
    Weighted(Envelope),
    /// `s_k = -p_k log p_k`.
    Entropy,
    /// `s_k = p_k^2`.
    Square,
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
        self.abs += v.abs();
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of absolute values, used to size rounding error.
    pub(crate) fn abs_sum(&self) -> f64 {
        self.abs
    }
}

/// Output of [`sum_over_support`], carrying the absolute-value sum as well.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawSum {
    pub value: SeriesValue,
    pub abs_sum: f64,
}

impl RawSum {
    /// Tail bound plus a conservative rounding allowance.
    pub(crate) fn error_bound(&self) -> f64 {
        self.value.tail_bound + 4.0 * f64::EPSILON * self.abs_sum
    }
}

/// Upper bound on `p_{k+1}/p_k` valid for every index `>= k`. Unbounded
/// support only.
pub(crate) fn ratio_bound(params: &FamilyParams, k: u64, x: f64) -> f64 {
    let c = params.c();
    let n = params.n();
    let k = k as f64;
    if c == 0.0 {
        n * x / (k + 1.0)
    } else {
        let a = n / c;
        let q = c * x / (1.0 + c * x);
        (a + k) / (k + 1.0) * q
    }
}

pub(crate) fn tail_bound(tail: Tail, k: u64, log_p: f64, rho: f64) -> Option<f64> {
    if !(rho < 1.0) {
        return None;
    }
    let p = log_p.exp();
    if p == 0.0 || rho == 0.0 {
        return Some(0.0);
    }
    match tail {
        Tail::Weighted(env) => {
            let d = env.degree as i32;
            let kf = k as f64;
            let r = rho * ((kf + 2.0) / (kf + 1.0)).powi(d);
            (r < 1.0).then(|| p * env.scale * (1.0 + kf).powi(d) * r / (1.0 - r))
        }
        Tail::Entropy => {
            // -p log p is increasing on [0, 1/e].
            if p > (-1.0f64).exp() {
                return None;
            }
            let beta = -rho.ln();
            let g = rho / (1.0 - rho);
            Some(p * (-log_p * g + beta * g / (1.0 - rho)))
        }
        Tail::Square => Some(p * p * rho * rho / (1.0 - rho * rho)),
    }
}

/// Below this `ln p_0` the unbounded recurrence would start from an
/// underflowed value, so terms are formed in log space instead.
const LINEAR_START_MIN: f64 = -700.0;

/// Sums `summand(k, p_k(x), ln p_k(x))` over the support of `params`,
/// skipping zero terms.
///
/// Unbounded support walks `p_{k+1} = ρ_k p_k` from `p_0`, which keeps the
/// relative error of each term near machine precision; forming `ln p_k`
/// directly loses `~k ln(nx)` ulps to cancellation.
pub(crate) fn sum_over_support<F>(
    params: &FamilyParams,
    x: f64,
    policy: &TruncationPolicy,
    tail: Tail,
    mut summand: F,
) -> Result<RawSum>
where
    F: FnMut(u64, f64, f64) -> f64,
{
    let mut acc = Accumulator::default();
    let done = |acc: &Accumulator, tail_bound: f64, terms_used: usize| RawSum {
        value: SeriesValue {
            value: acc.value(),
            tail_bound,
            terms_used,
        },
        abs_sum: acc.abs_sum(),
    };
    match params.support() {
        Support::Finite(l) => {
            for k in 0..=l {
                let lp = log_basis_unchecked(params, k, x);
                if lp > f64::NEG_INFINITY {
                    acc.add(summand(k, lp.exp(), lp));
                }
            }
            Ok(done(&acc, 0.0, l as usize + 1))
        }
        Support::Unbounded => {
            let lp0 = log_basis_unchecked(params, 0, x);
            if x == 0.0 {
                // point mass at k = 0
                acc.add(summand(0, 1.0, 0.0));
                return Ok(done(&acc, 0.0, 1));
            }
            let linear = lp0 > LINEAR_START_MIN;
            let mut p = lp0.exp();
            let mut last_bound = f64::INFINITY;
            for k in 0..policy.max_terms as u64 {
                let (pk, lp) = if linear {
                    (p, p.ln())
                } else {
                    let lp = log_basis_unchecked(params, k, x);
                    (lp.exp(), lp)
                };
                if pk > 0.0 {
                    acc.add(summand(k, pk, lp));
                }
                let rho = ratio_bound(params, k, x);
                p *= rho;
                if let Some(bound) = tail_bound(tail, k, lp, rho) {
                    last_bound = bound;
                    if bound <= policy.abs_tol {
                        return Ok(done(&acc, bound, k as usize + 1));
                    }
                }
            }
            Err(Error::MaxTermsExceeded {
                abs_tol: policy.abs_tol,
                max_terms: policy.max_terms,
                last_bound,
            })
        }
    }
}
