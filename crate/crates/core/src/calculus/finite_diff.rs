//! Central finite differences with one Richardson step, used as an
//! independent check of the exact derivative engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: f64,
    /// `|D(h/2) - D(h)| / 3`.
    pub error_estimate: f64,
    pub step: f64,
}

/// `h^{-m} Σ_i (-1)^i C(m, i) f(x + (m/2 - i) h)`, accurate to `O(h^2)`.
fn central<F>(f: &F, x: f64, order: usize, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut binom = 1.0;
    let mut acc = 0.0;
    for i in 0..=order {
        if i > 0 {
            binom = binom * (order - i + 1) as f64 / i as f64;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let offset = (order as f64 / 2.0 - i as f64) * h;
        acc += sign * binom * f(x + offset)?;
    }
    Ok(acc / h.powi(order as i32))
}

/// Step size balancing truncation (`h^4` after extrapolation) against
/// rounding (`eps / h^m`), scaled by the distance to the nearest endpoint,
/// or by `max(|x|, 1)` on an unbounded domain.
pub fn auto_step(x: f64, order: usize, domain: (f64, f64)) -> f64 {
    let mut reach = (x - domain.0).min(domain.1 - x);
    if !reach.is_finite() {
        reach = x.abs().max(1.0);
    }
    reach * f64::EPSILON.powf(1.0 / (order as f64 + 4.0))
}

/// Estimates `f^{(order)}(x)` from steps `h` and `h/2`.
pub fn finite_difference_derivative<F>(f: F, x: f64, order: usize, h: f64, domain: (f64, f64)) -> Result<FdEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if order == 0 || !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "finite difference needs order >= 1 and h > 0 (order = {order}, h = {h})"
        )));
    }
    let half_width = order as f64 * h / 2.0;
    let (lo, hi) = (x - half_width, x + half_width);
    if lo < domain.0 || hi > domain.1 {
        return Err(Error::StencilOutsideDomain { lo, hi });
    }
    let coarse = central(&f, x, order, h)?;
    let fine = central(&f, x, order, h / 2.0)?;
    Ok(FdEstimate {
        value: (4.0 * fine - coarse) / 3.0,
        error_estimate: (fine - coarse).abs() / 3.0,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::shannon_derivative_exact;
    use crate::entropies::shannon;
    use crate::params::FamilyParams;
    use crate::series::TruncationPolicy;

    const R: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

    #[test]
    fn polynomial_exact() {
        let d = finite_difference_derivative(|x| Ok(x * x), 1.0, 2, 0.1, R).unwrap();
        assert!((d.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_third_derivative() {
        let h = auto_step(0.0, 3, R);
        let d = finite_difference_derivative(|x: f64| Ok(x.exp()), 0.0, 3, h, R).unwrap();
        assert!((d.value - 1.0).abs() < 1e-6, "{d:?}");
    }

    #[test]
    fn binomial_entropy_second_derivative() {
        let p = FamilyParams::new(-1.0, 10.0).unwrap();
        let pol = TruncationPolicy::default();
        let x = 0.25;
        let h = auto_step(x, 2, p.domain());
        let d = finite_difference_derivative(|t| shannon(&p, t, &pol).map(|v| v.value), x, 2, h, p.domain()).unwrap();
        let exact = shannon_derivative_exact(&p, x, 2, &pol).unwrap();
        assert!((d.value - exact).abs() < 1e-6, "{} vs {exact}", d.value);
    }

    #[test]
    fn stencil_must_fit() {
        let r = finite_difference_derivative(Ok, 0.05, 2, 0.1, (0.0, 1.0));
        assert!(matches!(r, Err(Error::StencilOutsideDomain { .. })));
    }
}
