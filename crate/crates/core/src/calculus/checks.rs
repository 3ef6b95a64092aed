//! Grid-based checks of sign patterns, complete monotonicity, convexity and
//! the entropy sandwich inequality.
//!
//! Every check produces one [`Finding`] per (point, order) with a signed
//! margin: non-negative when the asserted inequality holds. A finding
//! passes when `margin / scale >= -tolerance`.

use serde::{Deserialize, Serialize};

use crate::basis::expectation;
use crate::calculus::derivatives::shannon_derivative_parts;
use crate::entropies::{renyi2, sum_squares, tsallis2};
use crate::error::{Error, Result};
use crate::grid::{map_points, GridSpec};
use crate::params::FamilyParams;
use crate::series::{Envelope, SeriesValue, TruncationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    EvenDerivative,
    OddDerivative,
    Midpoint,
    AlternatingDifference,
    LowerBound,
    UpperBound,
    Convexity,
    Concavity,
    Decreasing,
    Increasing,
    Argmin,
    LogConvexity,
    Agreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub x: f64,
    pub order: usize,
    pub margin: f64,
    pub scale: f64,
}

impl Finding {
    pub fn new(kind: FindingKind, x: f64, order: usize, margin: f64, scale: f64) -> Self {
        Self {
            kind,
            x,
            order,
            margin,
            scale: if scale > 0.0 { scale } else { f64::MIN_POSITIVE },
        }
    }

    /// Margin in units of `scale`.
    pub fn relative(&self) -> f64 {
        if self.margin == 0.0 {
            0.0
        } else {
            self.margin / self.scale
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub grid: String,
    pub tolerance: f64,
    pub findings: Vec<Finding>,
    /// Smallest relative margin over all findings.
    pub worst_margin: f64,
    pub worst_at: Option<Finding>,
    pub passed: bool,
    /// Scans of open statements never fail.
    pub report_only: bool,
}

impl CheckReport {
    pub fn from_findings(
        suite: impl Into<String>,
        grid: impl Into<String>,
        tolerance: f64,
        findings: Vec<Finding>,
        report_only: bool,
    ) -> Self {
        let worst_at = findings
            .iter()
            .copied()
            .min_by(|a, b| a.relative().total_cmp(&b.relative()));
        let worst_margin = worst_at.map_or(f64::INFINITY, |f| f.relative());
        Self {
            suite: suite.into(),
            grid: grid.into(),
            tolerance,
            passed: report_only || worst_margin >= -tolerance,
            findings,
            worst_margin,
            worst_at,
            report_only,
        }
    }

    pub fn violations(&self) -> impl Iterator<Item = &Finding> {
        let tol = self.tolerance;
        self.findings.iter().filter(move |f| f.relative() < -tol)
    }
}

/// Settings shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub tol: f64,
    pub policy: TruncationPolicy,
    /// Flip every asserted sign. A run with this set must report
    /// violations; used to confirm the checks can fail.
    pub invert_signs: bool,
}

impl CheckConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn sign(&self) -> f64 {
        if self.invert_signs {
            -1.0
        } else {
            1.0
        }
    }
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            policy: TruncationPolicy::default(),
            invert_signs: false,
        }
    }
}

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0; m + 1];
    for i in 1..m {
        row[i] = row[i - 1] * (m - i + 1) as f64 / i as f64;
    }
    row
}

/// `Δ^m v_0 = Σ_i (-1)^{m-i} C(m,i) v_i`.
fn forward_difference(values: &[f64], m: usize) -> f64 {
    binomial_row(m)
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (w, v))| if (m - i).is_multiple_of(2) { w * v } else { -w * v })
        .sum()
}

/// Complete-monotonicity test by alternating forward differences:
/// `(-1)^m Δ_h^m f(x) >= 0` for `m = 0..=max_order` at `grid_points` points
/// of `[a, b - max_order h]`. The tolerance is relative to the largest
/// `|Δ_h^m f|` seen for each `m`.
pub fn cm_check<F>(
    f: F,
    interval: (f64, f64),
    grid_points: usize,
    h: f64,
    max_order: usize,
    tol: f64,
) -> Result<CheckReport>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    cm_check_signed(f, interval, grid_points, h, max_order, tol, 1.0, "cm")
}

#[allow(clippy::too_many_arguments)]
fn cm_check_signed<F>(
    f: F,
    interval: (f64, f64),
    grid_points: usize,
    h: f64,
    max_order: usize,
    tol: f64,
    sign: f64,
    name: &str,
) -> Result<CheckReport>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let (a, b) = interval;
    let last = b - max_order as f64 * h;
    if !(h > 0.0) || grid_points == 0 || !(last >= a) {
        return Err(Error::GridTooCoarse(format!(
            "need h > 0, at least one point and {max_order} * h = {} within [{a}, {b}]",
            max_order as f64 * h
        )));
    }
    let xs: Vec<f64> = if grid_points == 1 || last == a {
        vec![a]
    } else {
        GridSpec::linear(a, last, grid_points)?.values()
    };
    let rows = map_points(&xs, |x| -> Result<Vec<f64>> {
        let samples = (0..=max_order)
            .map(|i| f(x + i as f64 * h))
            .collect::<Result<Vec<f64>>>()?;
        Ok((0..=max_order).map(|m| forward_difference(&samples, m)).collect())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let scales: Vec<f64> = (0..=max_order)
        .map(|m| rows.iter().map(|r| r[m].abs()).fold(0.0, f64::max))
        .collect();
    let mut findings = Vec::with_capacity(xs.len() * (max_order + 1));
    for (x, row) in xs.iter().zip(&rows) {
        for (m, d) in row.iter().enumerate() {
            let alt = if m % 2 == 0 { *d } else { -*d };
            findings.push(Finding::new(
                FindingKind::AlternatingDifference,
                *x,
                m,
                sign * alt,
                scales[m],
            ));
        }
    }
    Ok(CheckReport::from_findings(
        name,
        format!("[{a}, {b}] x {grid_points}, h = {h}, orders 0..={max_order}"),
        tol,
        findings,
        false,
    ))
}

/// Sign pattern of `H_{n,c}` for `c < 0`: even derivatives `<= 0` on the
/// open domain, odd derivatives `>= 0` left of `-1/(2c)`, `<= 0` right of
/// it and zero there. Orders `1..=2 max_k + 2`.
pub fn theorem1_sign_check(
    params: &FamilyParams,
    grid: &[f64],
    max_k: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let mid = params
        .midpoint()
        .ok_or_else(|| Error::InvalidArgument(format!("theorem1 check needs c < 0, got c = {}", params.c())))?;
    let sign = cfg.sign();
    let max_order = 2 * max_k + 2;
    let rows = map_points(grid, |x| -> Result<Vec<Finding>> {
        let at_mid = (x - mid).abs() <= 1e-12 * mid;
        (1..=max_order)
            .map(|order| {
                let parts = shannon_derivative_parts(params, x, order, &cfg.policy)?;
                let (v, scale) = (parts.value, parts.scale());
                Ok(if order % 2 == 0 {
                    Finding::new(FindingKind::EvenDerivative, x, order, -sign * v, scale)
                } else if at_mid {
                    Finding::new(FindingKind::Midpoint, x, order, -v.abs(), scale)
                } else if x < mid {
                    Finding::new(FindingKind::OddDerivative, x, order, sign * v, scale)
                } else {
                    Finding::new(FindingKind::OddDerivative, x, order, -sign * v, scale)
                })
            })
            .collect()
    });
    let findings = rows
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(CheckReport::from_findings(
        format!("theorem1 c={} n={}", params.c(), params.n()),
        format!(
            "{} points in (0, {}), orders 1..={max_order}",
            grid.len(),
            -1.0 / params.c()
        ),
        cfg.tol,
        findings,
        false,
    ))
}

/// `Σ_k p_{n+c,k}(x) ln((k+1)/(ck+n))`, the middle of the sandwich.
pub fn corollary1_middle(params: &FamilyParams, x: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let (c, n) = (params.c(), params.n());
    let shifted = params
        .shifted(1)
        .expect("support size is at least one for validated parameters");
    let f = |k: u64| ((k as f64 + 1.0) / (c * k as f64 + n)).ln();
    expectation(&shifted, x, f, Envelope::polynomial(n.ln().abs() + 2.0, 1), policy)
}

/// `ln(x/(cx+1)) <= middle <= ln((nx+1)/(ncx+n))` for `c >= 0`, `x > 0`.
/// Absolute tolerance; the series tail bound is credited to both margins.
pub fn corollary1_check(params: &FamilyParams, grid: &[f64], cfg: &CheckConfig) -> Result<CheckReport> {
    let (c, n) = (params.c(), params.n());
    if c < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "corollary1 check needs c >= 0, got c = {c}"
        )));
    }
    let sign = cfg.sign();
    let rows = map_points(grid, |x| -> Result<[Finding; 2]> {
        if !(x > 0.0) {
            return Err(Error::DomainViolation {
                x,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let mid = corollary1_middle(params, x, &cfg.policy)?;
        let lower = (x / (c * x + 1.0)).ln();
        let upper = ((n * x + 1.0) / (n * c * x + n)).ln();
        Ok([
            Finding::new(
                FindingKind::LowerBound,
                x,
                0,
                sign * (mid.value - lower) + mid.tail_bound,
                1.0,
            ),
            Finding::new(
                FindingKind::UpperBound,
                x,
                0,
                sign * (upper - mid.value) + mid.tail_bound,
                1.0,
            ),
        ])
    });
    let findings = rows
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(CheckReport::from_findings(
        format!("corollary1 c={c} n={n}"),
        format!("{} points", grid.len()),
        cfg.tol,
        findings,
        false,
    ))
}

/// Grids and steps for [`section3_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section3Options {
    /// Points of the closed grid on `[0, -1/c]` when `c < 0`.
    pub points: usize,
    /// Interval, point count and steps of the complete-monotonicity tests
    /// when `c >= 0`.
    pub cm_interval: (f64, f64),
    pub cm_points: usize,
    pub cm_steps: Vec<f64>,
    pub cm_max_order: usize,
    /// Series tail used for the complete-monotonicity samples. An eighth
    /// difference at `h = 0.05` is about `1e-7` of the sampled values, so
    /// the tail has to sit well below the general default.
    pub cm_tail_tol: f64,
    /// Grid for the monotonicity and concavity checks of `R`, `S`, `T` when
    /// `c >= 0`.
    pub shape_grid: GridSpec,
}

impl Default for Section3Options {
    fn default() -> Self {
        Self {
            points: 101,
            cm_interval: (0.0, 10.0),
            cm_points: 100,
            cm_steps: vec![0.05, 0.1],
            cm_max_order: 8,
            cm_tail_tol: 1e-17,
            shape_grid: GridSpec::linear(0.0, 20.0, 201).expect("static grid"),
        }
    }
}

fn values_on<F>(xs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    map_points(xs, f).into_iter().collect()
}

/// Findings for `sign * Δ^m v_i >= 0`, relative to the largest `|Δ^m v|`.
fn difference_findings(xs: &[f64], values: &[f64], m: usize, sign: f64, kind: FindingKind) -> Vec<Finding> {
    let diffs: Vec<(f64, f64)> = (0..values.len().saturating_sub(m))
        .map(|i| (xs[i + m / 2], forward_difference(&values[i..=i + m], m)))
        .collect();
    let scale = diffs.iter().map(|d| d.1.abs()).fold(0.0, f64::max);
    diffs
        .into_iter()
        .map(|(x, d)| Finding::new(kind, x, m, sign * d, scale))
        .collect()
}

/// Convexity, monotonicity and complete-monotonicity checks on `S`, `R`,
/// `T`, chosen by the sign of `c`. One report per sub-check.
pub fn section3_suite(params: &FamilyParams, opts: &Section3Options, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let (c, n) = (params.c(), params.n());
    let sign = cfg.sign();
    let pol = cfg.policy;
    let tag = |name: &str| format!("section3/{name} c={c} n={n}");
    let s_of = |x: f64| sum_squares(params, x, &pol).map(|v| v.value);
    let t_of = |x: f64| tsallis2(params, x, &pol).map(|v| v.value);
    let mut reports = Vec::new();

    if let Some(mid) = params.midpoint() {
        let xs = GridSpec::linear(0.0, 2.0 * mid, opts.points)?.values();
        let desc = format!("[0, {}] x {}", 2.0 * mid, opts.points);
        let s = values_on(&xs, s_of)?;
        let t = values_on(&xs, t_of)?;

        let convex = difference_findings(&xs, &s, 2, sign, FindingKind::Convexity);
        reports.push(CheckReport::from_findings(
            tag("convex-S"),
            &desc,
            cfg.tol,
            convex,
            false,
        ));

        let steps = difference_findings(&xs, &s, 1, 1.0, FindingKind::Decreasing);
        let slack = 1e-12 * mid;
        let mut split = Vec::new();
        for (i, f) in steps.into_iter().enumerate() {
            if xs[i + 1] <= mid + slack {
                split.push(Finding {
                    margin: -sign * f.margin,
                    ..f
                });
            } else if xs[i] >= mid - slack {
                split.push(Finding {
                    kind: FindingKind::Increasing,
                    margin: sign * f.margin,
                    ..f
                });
            }
        }
        let argmin = (0..s.len()).min_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap_or(0);
        let nearest = (0..xs.len())
            .min_by(|&a, &b| (xs[a] - mid).abs().total_cmp(&(xs[b] - mid).abs()))
            .unwrap_or(0);
        // ties between symmetric grid points count as a match
        split.push(Finding::new(
            FindingKind::Argmin,
            xs[argmin],
            0,
            s[argmin] - s[nearest],
            1.0,
        ));
        reports.push(CheckReport::from_findings(
            tag("monotone-split-S"),
            &desc,
            cfg.tol,
            split,
            false,
        ));

        let concave = difference_findings(&xs, &t, 2, -sign, FindingKind::Concavity);
        reports.push(CheckReport::from_findings(
            tag("concave-T"),
            &desc,
            cfg.tol,
            concave,
            false,
        ));
        return Ok(reports);
    }

    let cm_pol = TruncationPolicy::new(pol.abs_tol.min(opts.cm_tail_tol), pol.max_terms)?;
    let s_cm = |x: f64| sum_squares(params, x, &cm_pol).map(|v| v.value);
    for &h in &opts.cm_steps {
        let mut r = cm_check_signed(
            s_cm,
            opts.cm_interval,
            opts.cm_points,
            h,
            opts.cm_max_order,
            cfg.tol,
            sign,
            "cm",
        )?;
        r.suite = tag(&format!("cm-S h={h}"));
        reports.push(r);

        // T(x+h) - T(x) written as S(x) - S(x+h) to skip the rounding of 1 - S
        let t_prime = |x: f64| Ok((s_cm(x)? - s_cm(x + h)?) / h);
        let (a, b) = opts.cm_interval;
        let mut r = cm_check_signed(
            t_prime,
            (a, b - h),
            opts.cm_points,
            h,
            opts.cm_max_order,
            cfg.tol,
            sign,
            "cm",
        )?;
        r.suite = tag(&format!("cm-T' h={h}"));
        reports.push(r);
    }

    let xs = opts.shape_grid.values();
    let desc = opts.shape_grid.describe();
    let s = values_on(&xs, s_of)?;
    let t = values_on(&xs, t_of)?;
    let r = values_on(&xs, |x| renyi2(params, x, &pol).map(|v| v.value))?;
    let findings = difference_findings(&xs, &r, 1, sign, FindingKind::Increasing);
    reports.push(CheckReport::from_findings(
        tag("increasing-R"),
        &desc,
        cfg.tol,
        findings,
        false,
    ));
    let findings = difference_findings(&xs, &r, 2, -sign, FindingKind::Concavity);
    reports.push(CheckReport::from_findings(
        tag("concave-R"),
        &desc,
        cfg.tol,
        findings,
        false,
    ));
    let findings = difference_findings(&xs, &s, 2, sign, FindingKind::Convexity);
    reports.push(CheckReport::from_findings(
        tag("convex-S"),
        &desc,
        cfg.tol,
        findings,
        false,
    ));
    let findings = difference_findings(&xs, &t, 2, -sign, FindingKind::Concavity);
    reports.push(CheckReport::from_findings(
        tag("concave-T"),
        &desc,
        cfg.tol,
        findings,
        false,
    ));
    Ok(reports)
}

/// Second differences of `ln S` over a closed grid on `[0, -1/c]`, divided
/// by `h^2`. Always passes: the minimum is reported, not asserted.
pub fn conjecture33_scan(params: &FamilyParams, points: usize, cfg: &CheckConfig) -> Result<CheckReport> {
    let mid = params
        .midpoint()
        .ok_or_else(|| Error::InvalidArgument(format!("conjecture scan needs c < 0, got c = {}", params.c())))?;
    let grid = GridSpec::linear(0.0, 2.0 * mid, points)?;
    if points < 3 {
        return Err(Error::GridTooCoarse(
            "log-convexity scan needs at least 3 points".into(),
        ));
    }
    let xs = grid.values();
    let h = xs[1] - xs[0];
    let log_s = values_on(&xs, |x| sum_squares(params, x, &cfg.policy).map(|v| v.value.ln()))?;
    let findings = (1..xs.len() - 1)
        .map(|i| {
            let d2 = (log_s[i - 1] - 2.0 * log_s[i] + log_s[i + 1]) / (h * h);
            Finding::new(FindingKind::LogConvexity, xs[i], 2, d2, 1.0)
        })
        .collect();
    Ok(CheckReport::from_findings(
        format!("conjecture33 c={} n={}", params.c(), params.n()),
        grid.describe(),
        cfg.tol,
        findings,
        true,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::shannon_prime;
    use crate::grid::interior_points;

    fn fp(c: f64, n: f64) -> FamilyParams {
        FamilyParams::new(c, n).unwrap()
    }

    #[test]
    fn cm_on_canonical_functions() {
        for h in [0.05, 0.1, 0.2] {
            let r = cm_check(|x: f64| Ok((-x).exp()), (0.0, 5.0), 40, h, 8, 1e-7).unwrap();
            assert!(r.passed && r.worst_margin >= 0.0, "{h}: {}", r.worst_margin);
            let r = cm_check(|x: f64| Ok(1.0 / (1.0 + x)), (0.0, 5.0), 40, h, 8, 1e-7).unwrap();
            assert!(r.passed, "{h}: {}", r.worst_margin);
            let r = cm_check(|x: f64| Ok(x.sin() + 2.0), (0.0, 5.0), 40, h, 8, 1e-7).unwrap();
            assert!(!r.passed);
        }
        let r = cm_check(|x: f64| Ok(x * x), (0.0, 5.0), 40, 0.1, 4, 1e-7).unwrap();
        assert!(!r.passed);
        let first_bad = r.violations().map(|f| f.order).min().unwrap();
        assert_eq!(first_bad, 1);
    }

    #[test]
    fn cm_rejects_coarse_grid() {
        let r = cm_check(|x: f64| Ok(x), (0.0, 1.0), 10, 0.2, 8, 1e-7);
        assert!(matches!(r, Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn poisson_entropy_derivative_is_cm() {
        let p = fp(0.0, 1.0);
        let pol = TruncationPolicy::default();
        let r = cm_check(|x| shannon_prime(&p, x, &pol), (0.1, 10.0), 60, 0.1, 8, 1e-7).unwrap();
        assert!(r.passed, "{:?}", r.worst_at);
    }

    #[test]
    fn theorem1_passes_and_inverted_fails() {
        let p = fp(-1.0, 5.0);
        let grid = interior_points(0.0, 1.0, 99);
        let cfg = CheckConfig::default();
        let r = theorem1_sign_check(&p, &grid, 3, &cfg).unwrap();
        assert!(r.passed, "{:?}", r.worst_at);
        assert_eq!(r.findings.iter().filter(|f| f.kind == FindingKind::Midpoint).count(), 4);
        let bad = CheckConfig {
            invert_signs: true,
            ..cfg
        };
        assert!(!theorem1_sign_check(&p, &grid, 3, &bad).unwrap().passed);
        assert!(theorem1_sign_check(&fp(0.0, 1.0), &grid, 1, &cfg).is_err());
    }

    #[test]
    fn theorem1_binary_second_derivative() {
        let p = fp(-1.0, 1.0);
        let grid = interior_points(0.0, 1.0, 19);
        let r = theorem1_sign_check(&p, &grid, 0, &CheckConfig::default()).unwrap();
        for f in r.findings.iter().filter(|f| f.order == 2) {
            let exact = -1.0 / (f.x * (1.0 - f.x));
            assert!((f.margin + exact).abs() < 1e-12 * exact.abs());
        }
    }

    #[test]
    fn corollary1_spot_values() {
        let pol = TruncationPolicy::default();
        let mid = corollary1_middle(&fp(0.0, 1.0), 1.0, &pol).unwrap();
        assert!((mid.value - 0.573_402_809_122_620_2).abs() < 1e-13);
        let r = corollary1_check(&fp(1.0, 2.0), &[1.0], &CheckConfig::with_tol(1e-9)).unwrap();
        assert!(r.passed && r.worst_margin > 0.0);
        let r = corollary1_check(&fp(0.0, 1.0), &[1e-8, 1e-3], &CheckConfig::with_tol(1e-9)).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn section3_binary() {
        let r = section3_suite(&fp(-1.0, 1.0), &Section3Options::default(), &CheckConfig::default()).unwrap();
        assert!(r.iter().all(|r| r.passed));
        // S = 1 - 2x + 2x^2 has second difference 4 h^2
        let h = 0.01;
        for f in &r[0].findings {
            assert!((f.margin - 4.0 * h * h).abs() < 1e-14);
        }
    }

    #[test]
    fn conjecture_scan_binary() {
        let r = conjecture33_scan(&fp(-1.0, 1.0), 201, &CheckConfig::default()).unwrap();
        assert!(r.passed && r.report_only);
        let at_mid = r.findings.iter().find(|f| (f.x - 0.5).abs() < 1e-12).unwrap();
        // (ln S)'' = S''/S - (S'/S)^2 = 4 / (1/2) at x = 1/2
        assert!((at_mid.margin - 8.0).abs() < 1e-3);
    }
}
