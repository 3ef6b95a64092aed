//! Shannon entropy `H`, the collision sum `S = Σ p_k^2`, and the order-2
//! Rényi (`R = -ln S`) and Tsallis (`T = 1 - S`) entropies, in nats.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::params::{FamilyParams, Support};
use crate::series::{ratio_bound, sum_over_support, tail_bound, Accumulator, Tail, TruncationPolicy};

/// An entropy-like quantity with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub error_bound: f64,
    pub terms_used: usize,
}

/// `H_{n,c}(x) = -Σ p_k ln p_k`.
pub fn shannon(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<EntropyValue> {
    params.check_domain(x)?;
    let raw = sum_over_support(params, x, policy, Tail::Entropy, |_, p, lp| -lp * p)?;
    Ok(EntropyValue {
        value: raw.value.value,
        error_bound: raw.error_bound(),
        terms_used: raw.value.terms_used,
    })
}

/// `S_{n,c}(x) = Σ p_k^2`.
pub fn sum_squares(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<EntropyValue> {
    params.check_domain(x)?;
    if let Some(v) = sum_squares_unbounded(params, x, policy)? {
        return Ok(v);
    }
    let raw = sum_over_support(params, x, policy, Tail::Square, |_, p, _| p * p)?;
    Ok(EntropyValue {
        value: raw.value.value,
        error_bound: raw.error_bound(),
        terms_used: raw.value.terms_used,
    })
}

/// Exponent beyond which `Σ q_k^2` below could overflow.
const DD_MAX_EXPONENT: f64 = 600.0;

/// Unbounded support as `S = e^{-2a} Σ q_k^2` with `p_k = e^{-a} q_k`, all in
/// double-double. High-order differences of `S` sit about `1e-7` below its
/// value, which plain `f64` rounding of each term cannot resolve.
fn sum_squares_unbounded(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<Option<EntropyValue>> {
    if params.support() != Support::Unbounded || x == 0.0 {
        return Ok(None);
    }
    let (c, n) = (params.c(), params.n());
    let xd = Dd::from_f64(x);
    // p_{k+1} / p_k = (m + k) / (k + 1) * q, or a / (k + 1) when c = 0
    let (a, m, q) = if c == 0.0 {
        (Dd::from_f64(n) * xd, None, None)
    } else {
        let u = Dd::from_f64(c) * xd;
        let m = Dd::from_f64(n) / Dd::from_f64(c);
        (m * u.ln_1p(), Some(m), Some(u / (Dd::ONE + u)))
    };
    if 2.0 * a.hi > DD_MAX_EXPONENT {
        return Ok(None);
    }
    let mut term = Dd::ONE;
    let mut total = Dd::ZERO;
    let mut last_bound = f64::INFINITY;
    for k in 0..policy.max_terms as u64 {
        total = total + term.square();
        let kf = k as f64;
        let step = match (m, q) {
            (Some(m), Some(q)) => (m + Dd::from_f64(kf)) / Dd::from_f64(kf + 1.0) * q,
            _ => a / Dd::from_f64(kf + 1.0),
        };
        let lp = term.hi.ln() - a.hi;
        if let Some(bound) = tail_bound(Tail::Square, k, lp, ratio_bound(params, k, x)) {
            last_bound = bound;
            if bound <= policy.abs_tol {
                let value = ((-a).exp().square() * total).to_f64();
                return Ok(Some(EntropyValue {
                    value,
                    error_bound: bound + 4.0 * f64::EPSILON * value,
                    terms_used: k as usize + 1,
                }));
            }
        }
        term = term * step;
    }
    Err(Error::MaxTermsExceeded {
        abs_tol: policy.abs_tol,
        max_terms: policy.max_terms,
        last_bound,
    })
}

/// `R = -ln S` with first-order error propagation.
pub fn renyi2(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<EntropyValue> {
    renyi_from_sum(sum_squares(params, x, policy)?)
}

pub fn tsallis2(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<EntropyValue> {
    Ok(tsallis_from_sum(sum_squares(params, x, policy)?))
}

pub fn renyi_from_sum(s: EntropyValue) -> Result<EntropyValue> {
    let lower = s.value - s.error_bound;
    if !(lower > 0.0) {
        return Err(Error::DegenerateLog {
            value: s.value,
            error_bound: s.error_bound,
        });
    }
    Ok(EntropyValue {
        value: -s.value.ln(),
        error_bound: s.error_bound / lower,
        terms_used: s.terms_used,
    })
}

pub fn tsallis_from_sum(s: EntropyValue) -> EntropyValue {
    EntropyValue {
        value: 1.0 - s.value,
        error_bound: s.error_bound,
        terms_used: s.terms_used,
    }
}

/// All four quantities at one point, sharing a single evaluation of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySet {
    pub shannon: EntropyValue,
    pub sum_squares: EntropyValue,
    pub renyi2: EntropyValue,
    pub tsallis2: EntropyValue,
}

pub fn entropy_set(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<EntropySet> {
    let sum_squares = sum_squares(params, x, policy)?;
    Ok(EntropySet {
        shannon: shannon(params, x, policy)?,
        sum_squares,
        renyi2: renyi_from_sum(sum_squares)?,
        tsallis2: tsallis_from_sum(sum_squares),
    })
}

fn bessel_series(z: f64, order: u32) -> f64 {
    // Σ_m (z/2)^(2m + ν) / (m! (m + ν)!)
    let q = 0.25 * z * z;
    let mut term = (0..order).fold(1.0, |t, i| t * 0.5 * z / (i + 1) as f64);
    let mut acc = Accumulator::default();
    let mut m = 0u32;
    loop {
        acc.add(term);
        m += 1;
        term *= q / (m as f64 * (m + order) as f64);
        if term <= 1e-17 * acc.value() || term == 0.0 {
            break;
        }
    }
    acc.value()
}

/// Modified Bessel function `I_0(z)` by its power series, for `0 <= z <= 50`.
///
/// Gives the independent check `S_{n,0}(x) = e^{-2nx} I_0(2nx)`.
pub fn bessel_i0_oracle(z: f64) -> f64 {
    bessel_series(z, 0)
}

/// `I_1(z)` by its power series; `d/dz I_0 = I_1`.
pub fn bessel_i1_oracle(z: f64) -> f64 {
    bessel_series(z, 1)
}
