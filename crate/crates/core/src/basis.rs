//! The basis functions `p_{n,k}^{[c]}(x)`, their derivative and weighted
//! sums over `k`.
//!
//! Values are formed in log space and exponentiated last:
//!
//! - `c < 0`: `C(l, k) y^k (1 - y)^(l - k)` with `y = -c x`, `l = -n/c`
//! - `c = 0`: `(n x)^k e^(-n x) / k!`
//! - `c > 0`: `Γ(a + k) / (Γ(a) k!) (c x)^k (1 + c x)^(-a - k)` with `a = n/c`

use crate::error::Result;
use crate::params::{FamilyParams, Support};
use crate::series::{sum_over_support, Envelope, SeriesValue, Tail, TruncationPolicy};

/// Supports up to this size use exact integer binomial coefficients.
const EXACT_BINOMIAL_MAX: u64 = 60;

pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `a * ln(y)` with `0 * ln 0 = 0`.
fn xlny(a: f64, y: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * y.ln()
    }
}

fn ln_choose(l: u64, k: u64) -> f64 {
    let k = k.min(l - k);
    if l <= EXACT_BINOMIAL_MAX {
        let mut c: u64 = 1;
        for i in 0..k {
            // exact: c * (l - i) is divisible by (i + 1)
            c = c * (l - i) / (i + 1);
        }
        (c as f64).ln()
    } else {
        ln_gamma(l as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((l - k) as f64 + 1.0)
    }
}

/// `ln Γ(a + k) - ln Γ(a)`.
fn ln_rising(a: f64, k: u64) -> f64 {
    if a > 1e4 && k <= 256 {
        (0..k).map(|i| (a + i as f64).ln()).sum()
    } else {
        ln_gamma(a + k as f64) - ln_gamma(a)
    }
}

/// `ln p_{n,k}(x)` without domain checks; `x` is assumed to lie in `I_c`.
pub(crate) fn log_basis_unchecked(params: &FamilyParams, k: u64, x: f64) -> f64 {
    let c = params.c();
    match params.support() {
        Support::Finite(l) => {
            if k > l {
                return f64::NEG_INFINITY;
            }
            let y = (-c * x).clamp(0.0, 1.0);
            let kf = k as f64;
            let rest = (l - k) as f64;
            let ln_one_minus_y = if y == 1.0 {
                f64::NEG_INFINITY
            } else {
                (c * x).max(-1.0).ln_1p()
            };
            let tail = if rest == 0.0 { 0.0 } else { rest * ln_one_minus_y };
            ln_choose(l, k) + xlny(kf, y) + tail
        }
        Support::Unbounded => {
            let n = params.n();
            let kf = k as f64;
            if x == 0.0 {
                return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
            }
            if c == 0.0 {
                kf * (n * x).ln() - n * x - ln_gamma(kf + 1.0)
            } else {
                let a = n / c;
                ln_rising(a, k) - ln_gamma(kf + 1.0) + kf * (c * x).ln() - (a + kf) * (c * x).ln_1p()
            }
        }
    }
}

/// Natural log of `p_{n,k}^{[c]}(x)`; `-inf` where the value is zero,
/// including `k > l` when `c < 0`.
pub fn log_basis(params: &FamilyParams, k: u64, x: f64) -> Result<f64> {
    params.check_domain(x)?;
    Ok(log_basis_unchecked(params, k, x))
}

pub fn basis(params: &FamilyParams, k: u64, x: f64) -> Result<f64> {
    log_basis(params, k, x).map(f64::exp)
}

/// `d/dx p_{n,k}(x) = n (p_{n+c,k-1}(x) - p_{n+c,k}(x))`, with `p_{., -1} = 0`.
pub fn basis_derivative(params: &FamilyParams, k: u64, x: f64) -> Result<f64> {
    params.check_interior(x)?;
    let shifted = params
        .shifted(1)
        .expect("support size is at least one for validated parameters");
    let lower = if k == 0 {
        0.0
    } else {
        log_basis_unchecked(&shifted, k - 1, x).exp()
    };
    let upper = log_basis_unchecked(&shifted, k, x).exp();
    Ok(params.n() * (lower - upper))
}

/// `Σ_k p_{n,k}(x) f(k)`.
///
/// `envelope` must dominate `|f(k)|`; it is used only to certify the
/// discarded tail when the support is unbounded.
pub fn expectation<F>(
    params: &FamilyParams,
    x: f64,
    f: F,
    envelope: Envelope,
    policy: &TruncationPolicy,
) -> Result<SeriesValue>
where
    F: Fn(u64) -> f64,
{
    params.check_domain(x)?;
    let raw = sum_over_support(params, x, policy, Tail::Weighted(envelope), |k, p, _| p * f(k))?;
    Ok(raw.value)
}

/// The first `count` basis values at `x`.
pub fn basis_head(params: &FamilyParams, x: f64, count: usize) -> Result<Vec<f64>> {
    params.check_domain(x)?;
    Ok((0..count as u64)
        .map(|k| log_basis_unchecked(params, k, x).exp())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use approx::assert_relative_eq;

    fn fp(c: f64, n: f64) -> FamilyParams {
        FamilyParams::new(c, n).unwrap()
    }

    #[test]
    fn log_basis_examples() {
        assert_relative_eq!(log_basis(&fp(-1.0, 2.0), 1, 0.5).unwrap(), 0.5f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(log_basis(&fp(0.0, 1.0), 0, 1.0).unwrap(), -1.0, epsilon = 1e-15);
        // n = c = 1 is the geometric law x^k / (1+x)^{k+1}; validation rejects
        // n <= c, so build it directly
        let geometric = FamilyParams::unbounded_unchecked(1.0, 1.0);
        assert_relative_eq!(log_basis(&geometric, 1, 1.0).unwrap(), 0.25f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn basis_examples() {
        assert_relative_eq!(basis(&fp(-1.0, 1.0), 0, 0.3).unwrap(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(basis(&fp(0.0, 2.0), 1, 0.5).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(basis(&fp(1.0, 2.0), 0, 1.0).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn zero_values_and_out_of_support() {
        assert_eq!(log_basis(&fp(0.0, 1.0), 3, 0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_basis(&fp(-1.0, 2.0), 3, 0.4).unwrap(), f64::NEG_INFINITY);
        assert_eq!(basis(&fp(-1.0, 2.0), 2, 1.0).unwrap(), 1.0);
        assert_eq!(basis(&fp(-1.0, 2.0), 0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            basis(&fp(-1.0, 2.0), 0, 1.5),
            Err(Error::DomainViolation { .. })
        ));
        assert!(basis(&fp(0.0, 2.0), 0, -0.1).is_err());
    }

    #[test]
    fn derivative_examples() {
        for x in [0.1, 0.5, 0.9] {
            assert_relative_eq!(basis_derivative(&fp(-1.0, 1.0), 1, x).unwrap(), 1.0, epsilon = 1e-15);
        }
        assert_relative_eq!(
            basis_derivative(&fp(0.0, 1.0), 0, 1.0).unwrap(),
            -(-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert!(basis_derivative(&fp(-1.0, 1.0), 1, 0.0).is_err());
    }

    #[test]
    fn derivative_matches_richardson_difference() {
        let p = fp(-1.0, 5.0);
        let f = |x: f64| basis(&p, 2, x).unwrap();
        let x = 0.3;
        let central = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        let (d1, d2) = (central(1e-3), central(5e-4));
        let fd = (4.0 * d2 - d1) / 3.0;
        assert!((basis_derivative(&p, 2, x).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn expectation_examples() {
        let pol = TruncationPolicy::default();
        let one = Envelope::polynomial(1.0, 0);
        let lin = Envelope::polynomial(1.0, 1);
        let s = expectation(&fp(0.0, 3.0), 2.0, |k| k as f64, lin, &pol).unwrap();
        assert!((s.value - 6.0).abs() <= s.tail_bound + 1e-12);
        let s = expectation(&fp(1.5, 2.0), 0.7, |_| 1.0, one, &pol).unwrap();
        assert!((s.value - 1.0).abs() <= s.tail_bound + 1e-12);
        let s = expectation(
            &fp(-1.0, 2.0),
            0.5,
            |k| (k * k) as f64,
            Envelope::polynomial(1.0, 2),
            &pol,
        )
        .unwrap();
        assert_eq!(s.tail_bound, 0.0);
        assert_relative_eq!(s.value, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn exact_and_lgamma_binomials_agree() {
        for (l, k) in [(20u64, 7u64), (60, 30), (45, 1)] {
            let lg = ln_gamma(l as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((l - k) as f64 + 1.0);
            assert_relative_eq!(ln_choose(l, k), lg, max_relative = 1e-13);
        }
    }
}
