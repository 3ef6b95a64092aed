//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a flat `Float64Array`; the layouts are documented on
//! the functions. The pure helpers behind them are ordinary Rust and are
//! tested natively.

use wasm_bindgen::prelude::*;

use cm_entropy::calculus::shannon_derivative_exact;
use cm_entropy::grid::{interior_points, GridSpec};
use cm_entropy::{basis_head, entropy_set, FamilyParams, Support, TruncationPolicy};

/// Largest number of grid points a single call evaluates.
pub const MAX_POINTS: usize = 2000;

fn family(c: f64, n: f64) -> Result<FamilyParams, String> {
    FamilyParams::new(c, n).map_err(|e| e.to_string())
}

fn right_end(p: &FamilyParams, x_max: f64) -> Result<f64, String> {
    match p.support() {
        Support::Finite(_) => Ok(p.domain().1),
        Support::Unbounded if x_max > 0.0 && x_max.is_finite() => Ok(x_max),
        Support::Unbounded => Err(format!("x_max must be positive, got {x_max}")),
    }
}

fn check_points(points: usize, min: usize) -> Result<(), String> {
    if (min..=MAX_POINTS).contains(&points) {
        Ok(())
    } else {
        Err(format!("points must lie in {min}..={MAX_POINTS}, got {points}"))
    }
}

/// `[x.., H.., S.., R.., T..]`, each block `points` long, over `[0, -1/c]`
/// for `c < 0` and `[0, x_max]` otherwise.
pub fn entropy_curves_impl(c: f64, n: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = family(c, n)?;
    check_points(points, 2)?;
    let xs = GridSpec::linear(0.0, right_end(&p, x_max)?, points)
        .map_err(|e| e.to_string())?
        .values();
    let pol = TruncationPolicy::default();
    let mut out = vec![0.0; 5 * points];
    for (i, &x) in xs.iter().enumerate() {
        let set = entropy_set(&p, x, &pol).map_err(|e| e.to_string())?;
        out[i] = x;
        out[points + i] = set.shannon.value;
        out[2 * points + i] = set.sum_squares.value;
        out[3 * points + i] = set.renyi2.value;
        out[4 * points + i] = set.tsallis2.value;
    }
    Ok(out)
}

/// `p_0(x) .. p_{count-1}(x)`; entries beyond a finite support are zero.
pub fn basis_distribution_impl(c: f64, n: f64, x: f64, count: usize) -> Result<Vec<f64>, String> {
    let p = family(c, n)?;
    check_points(count, 1)?;
    basis_head(&p, x, count).map_err(|e| e.to_string())
}

/// `[x.., H^(order)(x)..]` on interior points of the domain (`(0, x_max)`
/// for `c >= 0`).
pub fn derivative_curve_impl(c: f64, n: f64, order: usize, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = family(c, n)?;
    check_points(points, 1)?;
    if !(1..=10).contains(&order) {
        return Err(format!("order must lie in 1..=10, got {order}"));
    }
    let xs = interior_points(0.0, right_end(&p, x_max)?, points);
    let pol = TruncationPolicy::default();
    let mut out = xs.clone();
    for &x in &xs {
        out.push(shannon_derivative_exact(&p, x, order, &pol).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn to_js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn entropy_curves(c: f64, n: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    to_js(entropy_curves_impl(c, n, x_max, points))
}

#[wasm_bindgen]
pub fn basis_distribution(c: f64, n: f64, x: f64, count: usize) -> Result<Vec<f64>, JsError> {
    to_js(basis_distribution_impl(c, n, x, count))
}

#[wasm_bindgen]
pub fn derivative_curve(c: f64, n: f64, order: usize, x_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    to_js(derivative_curve_impl(c, n, order, x_max, points))
}
