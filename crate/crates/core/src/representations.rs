//! Integral representations of `ln(l!)`, of `H` for `c = -1, 0, 1` and of
//! several of its derivatives, evaluated by adaptive quadrature. They share
//! no code path with the series in [`crate::entropies`] and
//! [`crate::calculus`] and serve as independent oracles.
//!
//! Most integrands carry the kernel `w(t) = -t / ln(1 - t)`, which lies in
//! `(0, 1)` on the open unit interval, tends to 1 as `t -> 0` and to 0 as
//! `t -> 1`.

use crate::basis::ln_gamma;
use crate::error::{Error, Result};
use crate::params::FamilyParams;
use crate::quadrature::{integrate, EndpointGuard, QuadratureResult, QuadratureSpec};

/// Which of the two integrals for `ln(l!)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFactorialForm {
    /// Over `s ∈ [0, ∞)`, truncated with a certified tail.
    Exponential,
    /// Over `t ∈ [0, 1]`.
    Logarithmic,
}

/// `-t / ln(1 - t)`.
pub fn kernel(t: f64, guard: &EndpointGuard) -> f64 {
    if t < guard.near_zero {
        return 1.0 - 0.5 * t;
    }
    let l = (-t).ln_1p();
    if l == f64::NEG_INFINITY {
        return if guard.zero_at_one { 0.0 } else { f64::NAN };
    }
    -t / l
}

/// `1 / ln(1 - t)` times `t`, i.e. `-w(t)`; split out so integrands read as
/// written.
fn t_over_log(t: f64, guard: &EndpointGuard) -> f64 {
    -kernel(t, guard)
}

/// Cut-off of the exponential form.
pub fn exponential_cutoff(l: u64) -> f64 {
    40.0 + (l as f64).ln()
}

pub fn log_factorial_integral(l: u64, form: LogFactorialForm, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if l == 0 {
        return Err(Error::InvalidArgument("log_factorial_integral needs l >= 1".into()));
    }
    let guard = spec.endpoint;
    let pairs = l as f64 * (l as f64 - 1.0) / 2.0;
    match form {
        LogFactorialForm::Exponential => {
            // l - (1 - e^{-ls})/(1 - e^{-s}) = -Σ_{i<l} expm1(-i s)
            let f = |s: f64| {
                if s < guard.near_zero {
                    return pairs * (-s).exp();
                }
                let sum: f64 = (1..l).map(|i| -(-(i as f64) * s).exp_m1()).sum();
                sum / s * (-s).exp()
            };
            let s_max = exponential_cutoff(l);
            let tail = l as f64 * (-s_max).exp() / s_max;
            let inner = QuadratureSpec {
                abs_tol: (spec.abs_tol - tail).max(0.5 * spec.abs_tol),
                ..*spec
            };
            let mut r = integrate(f, 0.0, s_max, &inner)?;
            r.error_estimate += tail;
            Ok(r)
        }
        LogFactorialForm::Logarithmic => {
            // (1 - (1-t)^l)/t - l = Σ_{i<l} ((1-t)^i - 1)
            let f = |t: f64| {
                if t < guard.near_zero {
                    return pairs;
                }
                let lt = (-t).ln_1p();
                if lt == f64::NEG_INFINITY {
                    return 0.0;
                }
                let sum: f64 = (1..l).map(|i| (i as f64 * lt).exp_m1()).sum();
                sum / lt
            };
            integrate(f, 0.0, 1.0, spec)
        }
    }
}

/// `ln(l!)` via log-gamma, for comparison.
pub fn log_factorial(l: u64) -> f64 {
    ln_gamma(l as f64 + 1.0)
}

fn require_open(x: f64, hi: f64) -> Result<()> {
    if x > 0.0 && x < hi {
        Ok(())
    } else {
        Err(Error::DomainViolation { x, lo: 0.0, hi })
    }
}

fn require_negative_c(params: &FamilyParams) -> Result<u64> {
    params
        .support_size()
        .ok_or_else(|| Error::InvalidArgument(format!("representation needs c < 0, got c = {}", params.c())))
}

/// `(1 - y t)^l + (1 - (1 - y) t)^l - 1 - (1 - t)^l`, which is `O(t^2)`.
fn binomial_numerator(l: u64, y: f64, t: f64) -> f64 {
    if t < 0.1 {
        // Σ_{m>=2} C(l, m) (-t)^m (y^m + (1-y)^m - 1)
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut tm = 1.0;
        let (mut ym, mut zm) = (1.0, 1.0);
        for m in 1..=l {
            binom *= (l - m + 1) as f64 / m as f64;
            tm *= -t;
            ym *= y;
            zm *= 1.0 - y;
            if m >= 2 {
                let term = binom * tm * (ym + zm - 1.0);
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
        }
        sum
    } else {
        let lf = l as f64;
        let pow = |a: f64| (lf * (-a * t).ln_1p()).exp_m1();
        pow(y) + pow(1.0 - y) - pow(1.0)
    }
}

/// `H_{n,c}(x)` for `c < 0`, written through `y = -c x`:
/// `-l [y ln y + (1-y) ln(1-y)] + ∫_0^1 w(t) N(t) / t^2 dt`.
pub fn shannon_binomial_integral(params: &FamilyParams, x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let l = require_negative_c(params)?;
    require_open(x, -1.0 / params.c())?;
    let y = -params.c() * x;
    let guard = spec.endpoint;
    let lf = l as f64;
    let closed = -lf * (y * y.ln() + (1.0 - y) * (-y).ln_1p());
    let f = |t: f64| {
        if t < guard.near_zero {
            // N(t)/t^2 -> C(l,2)(y^2 + (1-y)^2 - 1) = -l(l-1) y(1-y)
            return -lf * (lf - 1.0) * y * (1.0 - y);
        }
        kernel(t, &guard) * binomial_numerator(l, y, t) / (t * t)
    };
    let mut r = integrate(f, 0.0, 1.0, spec)?;
    r.value += closed;
    Ok(r)
}

/// `H_{n,c}^{(2k+2)}(x)` for `c < 0`:
/// `c l (2k)! (x^{-2k-1} - (c/(1+cx))^{2k+1})
///  + l(l-1)...(l-2k-1) c^{2k+2} ∫_0^1 w(t) [(1+cxt)^{l-2k-2} + (1-t-cxt)^{l-2k-2}] t^{2k} dt`.
pub fn binomial_even_derivative_integral(
    params: &FamilyParams,
    k: u32,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let l = require_negative_c(params)?;
    let c = params.c();
    require_open(x, -1.0 / c)?;
    let lf = l as f64;
    let odd = 2 * k as i32 + 1;
    let fact: f64 = (1..=2 * k as u64).map(|i| i as f64).product();
    let closed = c * lf * fact * (x.powi(-odd) - (c / (1.0 + c * x)).powi(odd));
    let falling: f64 = (0..2 * k as u64 + 2).map(|i| lf - i as f64).product();
    if falling == 0.0 {
        return Ok(QuadratureResult {
            value: closed,
            error_estimate: 0.0,
            subdivisions_used: 0,
        });
    }
    let e = l as i32 - 2 * k as i32 - 2;
    let guard = spec.endpoint;
    let f = |t: f64| {
        let a = (1.0 + c * x * t).powi(e);
        let b = (1.0 - t - c * x * t).powi(e);
        kernel(t, &guard) * (a + b) * t.powi(2 * k as i32)
    };
    let mut r = integrate(f, 0.0, 1.0, spec)?;
    let scale = falling * c.powi(2 * k as i32 + 2);
    r.value = closed + scale * r.value;
    r.error_estimate *= scale.abs();
    Ok(r)
}

/// `H_{1,0}(x) = x - x ln x - ∫_0^1 (x - (1 - e^{-sx})/s) ds / ln(1-s)`.
pub fn shannon_poisson_integral(x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    require_open(x, f64::INFINITY)?;
    let guard = spec.endpoint;
    let f = |s: f64| {
        let sx = s * x;
        let numer = if sx < 1e-4 {
            x * sx * (0.5 - sx / 6.0 + sx * sx / 24.0)
        } else {
            x + (-sx).exp_m1() / s
        };
        if s < guard.near_zero {
            // ln(1-s) ~ -s
            return -x * x * 0.5;
        }
        let ls = (-s).ln_1p();
        if ls == f64::NEG_INFINITY {
            return 0.0;
        }
        numer / ls
    };
    let mut r = integrate(f, 0.0, 1.0, spec)?;
    r.value = x - x * x.ln() - r.value;
    Ok(r)
}

/// `H_{1,0}^{(k+1)}(x) = (-1)^k ((k-1)!/x^k + ∫_0^1 s^k e^{-sx} ds / ln(1-s))`, `k >= 1`.
pub fn poisson_derivative_integral(k: u32, x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "poisson_derivative_integral needs k >= 1".into(),
        ));
    }
    require_open(x, f64::INFINITY)?;
    let guard = spec.endpoint;
    let f = |s: f64| t_over_log(s, &guard) * s.powi(k as i32 - 1) * (-s * x).exp();
    let mut r = integrate(f, 0.0, 1.0, spec)?;
    let fact: f64 = (1..k as u64).map(|i| i as f64).product();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    r.value = sign * (fact / x.powi(k as i32) + r.value);
    Ok(r)
}

fn require_negbin_rate(n: f64) -> Result<()> {
    if n > 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::NLeqC { c: 1.0, n })
    }
}

/// `H_{n,1}(x) = n((1+x) ln(1+x) - x ln x)
///  + ∫_0^1 (1 - (1-t)^{n-1}) / (t ln(1-t)) (1 - (1+tx)^{-n}) dt`.
pub fn shannon_negbin_integral(n: f64, x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    require_negbin_rate(n)?;
    require_open(x, f64::INFINITY)?;
    let guard = spec.endpoint;
    let f = |t: f64| {
        if t < guard.near_zero {
            return -(n - 1.0) * n * x;
        }
        let lt = (-t).ln_1p();
        if lt == f64::NEG_INFINITY {
            return 0.0;
        }
        let a = -((n - 1.0) * lt).exp_m1();
        let b = -(-n * (t * x).ln_1p()).exp_m1();
        a * b / (t * lt)
    };
    let mut r = integrate(f, 0.0, 1.0, spec)?;
    r.value += n * ((1.0 + x) * x.ln_1p() - x * x.ln());
    Ok(r)
}

/// `H_{n,1}^{(j+1)}(x)`, `j >= 1`, from
/// `H^{(j+1)}/n = (-1)^{j-1}(j-1)!((x+1)^{-j} - x^{-j})
///  + (-1)^{j-1}(n+1)...(n+j) ∫_0^1 w(t)(1 - (1-t)^{n-1})(1+xt)^{-n-j-1} t^{j-1} dt`.
pub fn negbin_derivative_integral(n: f64, j: u32, x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if j == 0 {
        return Err(Error::InvalidArgument("negbin_derivative_integral needs j >= 1".into()));
    }
    require_negbin_rate(n)?;
    require_open(x, f64::INFINITY)?;
    let guard = spec.endpoint;
    let f = |t: f64| {
        let a = -((n - 1.0) * (-t).ln_1p()).exp_m1();
        kernel(t, &guard) * a * (-(n + j as f64 + 1.0) * (x * t).ln_1p()).exp() * t.powi(j as i32 - 1)
    };
    let r = integrate(f, 0.0, 1.0, spec)?;
    let rising: f64 = (1..=j).map(|i| n + i as f64).product();
    let fact: f64 = (1..j as u64).map(|i| i as f64).product();
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    let closed = fact * ((x + 1.0).powi(-(j as i32)) - x.powi(-(j as i32)));
    Ok(QuadratureResult {
        value: n * sign * (closed + rising * r.value),
        error_estimate: n * rising * r.error_estimate,
        subdivisions_used: r.subdivisions_used,
    })
}

/// `∫_0^1 t^{j-1} (1-t)^n (1+xt)^{-n-j-1} dt` by quadrature.
pub fn beta_identity_fixture(j: u32, n: f64, x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if j == 0 || !(n > 0.0) || !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta identity needs j >= 1, n > 0, x >= 0 (j = {j}, n = {n}, x = {x})"
        )));
    }
    let f = |t: f64| t.powi(j as i32 - 1) * (n * (-t).ln_1p() - (n + j as f64 + 1.0) * (x * t).ln_1p()).exp();
    integrate(f, 0.0, 1.0, spec)
}

/// Closed form `(j-1)! / ((n+1)...(n+j)) (x+1)^{-j}` of the same integral.
pub fn beta_identity_closed_form(j: u32, n: f64, x: f64) -> f64 {
    let fact: f64 = (1..j as u64).map(|i| i as f64).product();
    let rising: f64 = (1..=j).map(|i| n + i as f64).product();
    fact / rising * (x + 1.0).powi(-(j as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropies::shannon;
    use crate::series::TruncationPolicy;
    use std::f64::consts::LN_2;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::with_tol(1e-12)
    }

    #[test]
    fn kernel_stays_in_unit_interval() {
        let g = EndpointGuard::default();
        for i in 1..2000 {
            let t = i as f64 / 2000.0;
            let w = kernel(t, &g);
            assert!(w > 0.0 && w < 1.0, "w({t}) = {w}");
        }
        assert_eq!(kernel(1.0, &g), 0.0);
        assert!((kernel(1e-9, &g) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn log_factorial_examples() {
        for form in [LogFactorialForm::Exponential, LogFactorialForm::Logarithmic] {
            let r = log_factorial_integral(1, form, &tight()).unwrap();
            assert!(r.value.abs() < 1e-12);
            let r = log_factorial_integral(5, form, &tight()).unwrap();
            assert!((r.value - 120f64.ln()).abs() < 1e-10, "{form:?} {}", r.value);
            let r = log_factorial_integral(20, form, &tight()).unwrap();
            assert!((r.value - 42.335_616_460_753_485).abs() < 1e-9, "{form:?} {}", r.value);
        }
        assert!(log_factorial_integral(0, LogFactorialForm::Logarithmic, &tight()).is_err());
    }

    #[test]
    fn binomial_representation() {
        let p = FamilyParams::new(-1.0, 1.0).unwrap();
        let r = shannon_binomial_integral(&p, 0.5, &tight()).unwrap();
        assert!((r.value - LN_2).abs() < 1e-10);
        let pol = TruncationPolicy::default();
        let p = FamilyParams::new(-1.0, 6.0).unwrap();
        let r = shannon_binomial_integral(&p, 0.3, &tight()).unwrap();
        assert!((r.value - shannon(&p, 0.3, &pol).unwrap().value).abs() < 1e-8);
        let p = FamilyParams::new(-2.0, 4.0).unwrap();
        let q = FamilyParams::new(-1.0, 2.0).unwrap();
        let r = shannon_binomial_integral(&p, 0.2, &tight()).unwrap();
        assert!((r.value - shannon(&q, 0.4, &pol).unwrap().value).abs() < 1e-8);
        assert!(shannon_binomial_integral(&p, 0.5, &tight()).is_err());
    }

    #[test]
    fn poisson_representation() {
        let r = shannon_poisson_integral(1.0, &tight()).unwrap();
        assert!((r.value - 1.304_842_242_256_251_5).abs() < 1e-9);
        let p = FamilyParams::new(0.0, 1.0).unwrap();
        // H(x) ~ x (1 - ln x) as x -> 0
        let r = shannon_poisson_integral(1e-4, &tight()).unwrap();
        let s = shannon(&p, 1e-4, &TruncationPolicy::default()).unwrap();
        assert!((r.value - s.value).abs() < 1e-10 && r.value < 1.1e-3);
        let r = shannon_poisson_integral(5.0, &tight()).unwrap();
        let s = shannon(&p, 5.0, &TruncationPolicy::default()).unwrap();
        assert!((r.value - s.value).abs() < 1e-8);
    }

    #[test]
    fn poisson_derivative_signs() {
        for k in 1..=6 {
            for x in [0.2, 1.0, 3.0, 8.0] {
                let r = poisson_derivative_integral(k, x, &tight()).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert!(sign * r.value >= 0.0, "k={k} x={x} {}", r.value);
            }
        }
    }

    #[test]
    fn negbin_representation() {
        let p = FamilyParams::new(1.0, 2.0).unwrap();
        let r = shannon_negbin_integral(2.0, 1.0, &tight()).unwrap();
        let s = shannon(&p, 1.0, &TruncationPolicy::default()).unwrap();
        assert!((r.value - s.value).abs() < 1e-8);
        // (-1)^{j-1} H^{(j+1)} <= 0
        let r = negbin_derivative_integral(3.0, 2, 0.5, &tight()).unwrap();
        assert!(-r.value <= 0.0);
        assert!(shannon_negbin_integral(1.0, 1.0, &tight()).is_err());
    }

    #[test]
    fn beta_identity_examples() {
        let r = beta_identity_fixture(1, 1.0, 1.0, &tight()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        assert!((beta_identity_closed_form(1, 1.0, 1.0) - 0.25).abs() < 1e-16);
        let r = beta_identity_fixture(2, 1.0, 0.0, &tight()).unwrap();
        assert!((r.value - 1.0 / 6.0).abs() < 1e-12);
        let r = beta_identity_fixture(3, 2.0, 2.0, &tight()).unwrap();
        assert!((r.value - 1.0 / 810.0).abs() < 1e-12);
        assert!((beta_identity_closed_form(3, 2.0, 2.0) - 1.0 / 810.0).abs() < 1e-17);
    }
}
