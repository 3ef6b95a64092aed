//! Named verification suites with their default parameter matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calculus::{
    cm_check, corollary1_check, section3_suite, shannon_derivative_exact, shannon_prime, theorem1_sign_check,
    CheckConfig, CheckReport, Finding, FindingKind, Section3Options,
};
use crate::entropies::shannon;
use crate::error::{Error, Result};
use crate::grid::{interior_points, GridSpec};
use crate::params::FamilyParams;
use crate::quadrature::QuadratureSpec;
use crate::representations::{
    beta_identity_closed_form, beta_identity_fixture, binomial_even_derivative_integral, log_factorial,
    log_factorial_integral, negbin_derivative_integral, poisson_derivative_integral, shannon_binomial_integral,
    shannon_negbin_integral, shannon_poisson_integral, LogFactorialForm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteId {
    Theorem1,
    Theorem2,
    Theorem3,
    Corollary1,
    Section3,
    Representations,
}

impl SuiteId {
    pub const ALL: [SuiteId; 6] = [
        SuiteId::Theorem1,
        SuiteId::Theorem2,
        SuiteId::Theorem3,
        SuiteId::Corollary1,
        SuiteId::Section3,
        SuiteId::Representations,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::Theorem1 => "theorem1",
            SuiteId::Theorem2 => "theorem2",
            SuiteId::Theorem3 => "theorem3",
            SuiteId::Corollary1 => "corollary1",
            SuiteId::Section3 => "section3",
            SuiteId::Representations => "representations",
        }
    }

    /// Whether `params` belongs to the family region the suite covers.
    pub fn accepts(&self, params: &FamilyParams) -> bool {
        let c = params.c();
        match self {
            SuiteId::Theorem1 => c < 0.0,
            SuiteId::Theorem2 => c == 0.0,
            SuiteId::Theorem3 => c > 0.0,
            SuiteId::Corollary1 => c >= 0.0,
            SuiteId::Section3 | SuiteId::Representations => true,
        }
    }

    /// `(c, n)` pairs used when none are given.
    pub fn default_matrix(&self) -> Vec<(f64, f64)> {
        match self {
            SuiteId::Theorem1 => vec![(-1.0, 5.0), (-1.0, 10.0), (-2.0, 8.0)],
            SuiteId::Theorem2 => vec![(0.0, 1.0), (0.0, 3.0)],
            SuiteId::Theorem3 => vec![(1.0, 2.0), (1.0, 5.0)],
            SuiteId::Corollary1 => vec![(0.0, 1.0), (0.0, 2.0), (1.0, 2.0)],
            SuiteId::Section3 => vec![(-1.0, 1.0), (-1.0, 6.0), (-1.0, 11.0), (0.0, 1.0), (1.0, 2.0)],
            SuiteId::Representations => vec![],
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub check: CheckConfig,
    /// Absolute tolerance of the corollary-1 sandwich.
    pub sandwich_tol: f64,
    /// Absolute tolerance when comparing integral representations with
    /// series values.
    pub representation_tol: f64,
    /// Reduced grids.
    pub quick: bool,
    pub quadrature: QuadratureSpec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            check: CheckConfig::default(),
            sandwich_tol: 1e-9,
            representation_tol: 1e-8,
            quick: false,
            quadrature: QuadratureSpec::with_tol(1e-12),
        }
    }
}

/// Runs one suite on `params`, or on its default matrix when `params` is
/// `None`. The representation suite ignores `params`.
pub fn run_suite(id: SuiteId, params: Option<FamilyParams>, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    if id == SuiteId::Representations {
        return representation_crosschecks(cfg);
    }
    let family: Vec<FamilyParams> = match params {
        Some(p) => {
            if !id.accepts(&p) {
                return Err(Error::InvalidArgument(format!(
                    "suite {id} does not apply to c = {}",
                    p.c()
                )));
            }
            vec![p]
        }
        None => id
            .default_matrix()
            .into_iter()
            .map(|(c, n)| FamilyParams::new(c, n))
            .collect::<Result<_>>()?,
    };
    let mut out = Vec::new();
    for p in family {
        out.extend(run_one(id, &p, cfg)?);
    }
    Ok(out)
}

fn run_one(id: SuiteId, p: &FamilyParams, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quick = cfg.quick;
    match id {
        SuiteId::Theorem1 => {
            let grid = interior_points(0.0, -1.0 / p.c(), 99);
            Ok(vec![theorem1_sign_check(p, &grid, 3, &cfg.check)?])
        }
        SuiteId::Theorem2 | SuiteId::Theorem3 => {
            let points = if quick { 40 } else { 100 };
            [0.05, 0.1]
                .into_iter()
                .map(|h| {
                    let f = |x: f64| shannon_prime(p, x, &cfg.check.policy);
                    let signed = move |x: f64| {
                        let v = f(x)?;
                        Ok(if cfg.check.invert_signs { -v } else { v })
                    };
                    let mut r = cm_check(signed, (0.1, 10.0), points, h, 8, cfg.check.tol)?;
                    r.suite = format!("{id} H' cm c={} n={} h={h}", p.c(), p.n());
                    Ok(r)
                })
                .collect()
        }
        SuiteId::Corollary1 => {
            let grid = GridSpec::geometric(0.05, 20.0, if quick { 20 } else { 60 })?.values();
            let check = CheckConfig {
                tol: cfg.sandwich_tol,
                ..cfg.check
            };
            Ok(vec![corollary1_check(p, &grid, &check)?])
        }
        SuiteId::Section3 => {
            let opts = if quick {
                Section3Options {
                    cm_points: 40,
                    shape_grid: GridSpec::linear(0.0, 20.0, 81)?,
                    ..Section3Options::default()
                }
            } else {
                Section3Options::default()
            };
            section3_suite(p, &opts, &cfg.check)
        }
        SuiteId::Representations => representation_crosschecks(cfg),
    }
}

fn agreement(x: f64, order: usize, lhs: f64, rhs: f64, credit: f64) -> Finding {
    Finding::new(FindingKind::Agreement, x, order, credit - (lhs - rhs).abs(), 1.0)
}

/// Integral representations against log-gamma, the series values and the
/// exact derivative engine.
pub fn representation_crosschecks(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let q = &cfg.quadrature;
    let pol = &cfg.check.policy;
    let tol = cfg.representation_tol;
    let xs_unit = interior_points(0.0, 1.0, if cfg.quick { 5 } else { 9 });
    let xs_half = GridSpec::geometric(0.1, 10.0, if cfg.quick { 5 } else { 9 })?.values();
    let mut reports = Vec::new();

    let mut found = Vec::new();
    for l in 1..=20u64 {
        for (order, form) in [LogFactorialForm::Exponential, LogFactorialForm::Logarithmic]
            .into_iter()
            .enumerate()
        {
            let r = log_factorial_integral(l, form, q)?;
            found.push(agreement(l as f64, order, r.value, log_factorial(l), 0.0));
        }
    }
    reports.push(CheckReport::from_findings(
        "representations/log-factorial",
        "l = 1..=20, both forms",
        tol.min(1e-9),
        found,
        false,
    ));

    let mut found = Vec::new();
    for (c, l) in [(-1.0, 1u64), (-1.0, 2), (-1.0, 3), (-1.0, 6), (-2.0, 2), (-2.0, 3)] {
        let p = FamilyParams::new(c, -c * l as f64)?;
        for &u in &xs_unit {
            let x = -u / c;
            let r = shannon_binomial_integral(&p, x, q)?;
            let s = shannon(&p, x, pol)?;
            found.push(agreement(x, 0, r.value, s.value, s.error_bound));
        }
    }
    let poisson = FamilyParams::new(0.0, 1.0)?;
    for &x in &xs_half {
        let r = shannon_poisson_integral(x, q)?;
        let s = shannon(&poisson, x, pol)?;
        found.push(agreement(x, 0, r.value, s.value, s.error_bound));
    }
    for n in [2.0, 3.0] {
        let p = FamilyParams::new(1.0, n)?;
        for &x in &xs_half {
            let r = shannon_negbin_integral(n, x, q)?;
            let s = shannon(&p, x, pol)?;
            found.push(agreement(x, 0, r.value, s.value, s.error_bound));
        }
    }
    reports.push(CheckReport::from_findings(
        "representations/entropy",
        "c in {-1,-2} small l, c = 0, c = 1 with n in {2,3}",
        tol,
        found,
        false,
    ));

    let deriv_tol = tol.max(1e-7);
    let mut found = Vec::new();
    for k in 1..=3u32 {
        for &x in &xs_half {
            let r = poisson_derivative_integral(k, x, q)?;
            let e = shannon_derivative_exact(&poisson, x, k as usize + 1, pol)?;
            found.push(agreement(x, k as usize + 1, r.value, e, 0.0));
        }
    }
    for n in [2.0, 3.0] {
        let p = FamilyParams::new(1.0, n)?;
        for j in 1..=3u32 {
            for &x in &xs_half {
                let r = negbin_derivative_integral(n, j, x, q)?;
                let e = shannon_derivative_exact(&p, x, j as usize + 1, pol)?;
                found.push(agreement(x, j as usize + 1, r.value, e, 0.0));
            }
        }
    }
    for (c, l) in [(-1.0, 2u64), (-1.0, 3), (-1.0, 6), (-2.0, 3)] {
        let p = FamilyParams::new(c, -c * l as f64)?;
        for k in 0..=1u32 {
            for &u in &xs_unit {
                let x = -u / c;
                let r = binomial_even_derivative_integral(&p, k, x, q)?;
                let e = shannon_derivative_exact(&p, x, 2 * k as usize + 2, pol)?;
                found.push(agreement(x, 2 * k as usize + 2, r.value, e, 0.0));
            }
        }
    }
    reports.push(CheckReport::from_findings(
        "representations/derivatives",
        "orders 2..=4, c in {-2,-1,0,1}",
        deriv_tol,
        found,
        false,
    ));

    let mut found = Vec::new();
    for j in 1..=3u32 {
        for n in [1.0, 2.0] {
            for x in [0.5, 1.0, 2.0] {
                let r = beta_identity_fixture(j, n, x, q)?;
                found.push(agreement(
                    x,
                    j as usize,
                    r.value,
                    beta_identity_closed_form(j, n, x),
                    0.0,
                ));
            }
        }
    }
    reports.push(CheckReport::from_findings(
        "representations/beta-identity",
        "j in 1..=3, n in {1,2}, x in {0.5,1,2}",
        1e-10,
        found,
        false,
    ));
    Ok(reports)
}
