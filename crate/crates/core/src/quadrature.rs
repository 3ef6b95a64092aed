//! Globally adaptive Gauss–Kronrod (7, 15) quadrature on finite intervals.
//!
//! The interval with the largest local error estimate is bisected until
//! the summed estimate drops below `abs_tol`. Nodes never touch the
//! endpoints, but integrands are still expected to return finite limits
//! there (see [`EndpointGuard`]).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Where an integrand switches from its raw expression to a series limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointGuard {
    /// Below this distance from the left endpoint the series limit is used.
    pub near_zero: f64,
    /// Return the continuous extension `0` when `1 - t` rounds to zero.
    pub zero_at_one: bool,
}

impl Default for EndpointGuard {
    fn default() -> Self {
        Self {
            near_zero: 1e-8,
            zero_at_one: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub endpoint: EndpointGuard,
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_subdivisions: 2000,
            endpoint: EndpointGuard::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&node, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * node;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += wk * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(spec.abs_tol > 0.0) || !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integrate needs a finite interval a <= b and abs_tol > 0 (a = {a}, b = {b}, tol = {})",
            spec.abs_tol
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
        });
    }
    let first = kronrod(&f, a, b);
    let mut total_value = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::from([first]);
    let mut subdivisions = 0;
    while total_error > spec.abs_tol {
        if !total_error.is_finite() || !total_value.is_finite() {
            return Err(Error::ToleranceNotReached {
                estimate: total_error,
                abs_tol: spec.abs_tol,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::ToleranceNotReached {
                estimate: total_error,
                abs_tol: spec.abs_tol,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further in floating point
            return Err(Error::ToleranceNotReached {
                estimate: total_error,
                abs_tol: spec.abs_tol,
                subdivisions,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // refresh the running totals to stop drift
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error_estimate = heap.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate,
        subdivisions_used: subdivisions,
    })
}
