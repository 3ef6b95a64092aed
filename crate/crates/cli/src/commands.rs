use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use cm_entropy::calculus::{
    auto_step, conjecture33_scan, finite_difference_derivative, shannon_derivative_parts, CheckConfig, CheckReport,
};
use cm_entropy::grid::{interior_points, map_points, GridSpec};
use cm_entropy::suites::{run_suite, SuiteConfig, SuiteId};
use cm_entropy::{basis_head, entropy_set, shannon, EntropySet, FamilyParams, Support, TruncationPolicy};

use crate::args::{
    CheckArgs, DerivArgs, EvalArgs, GridArgs, MethodArg, Quantity, ScanArgs, SeriesArgs, SuiteArg, SweepArgs,
};
use crate::report::{human_number, Cell, Report, Table};
use crate::CliError;

/// Process exit classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Pass,
    Violation,
    ReportOnly,
}

impl Classification {
    pub fn exit_code(self) -> u8 {
        match self {
            Classification::Pass | Classification::ReportOnly => 0,
            Classification::Violation => 1,
        }
    }
}

/// One suite's reports with its timing.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: SuiteId,
    pub reports: Vec<CheckReport>,
    pub wall_time: Duration,
    pub classification: Classification,
}

impl SuiteOutcome {
    fn new(suite: SuiteId, reports: Vec<CheckReport>, wall_time: Duration) -> Self {
        let classification = if reports.iter().any(|r| !r.passed) {
            Classification::Violation
        } else if !reports.is_empty() && reports.iter().all(|r| r.report_only) {
            Classification::ReportOnly
        } else {
            Classification::Pass
        };
        Self {
            suite,
            reports,
            wall_time,
            classification,
        }
    }
}

fn policy(s: &SeriesArgs) -> Result<TruncationPolicy, CliError> {
    Ok(TruncationPolicy::new(s.tail_tol, s.max_terms)?)
}

fn config_json<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

/// Grid from the flags, falling back to `[lo, hi]` with `points` points.
fn resolve_grid(g: &GridArgs, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if let Some(x) = g.x {
        if g.min.is_some() || g.max.is_some() || g.points.is_some() {
            return Err(CliError::Usage(
                "--x cannot be combined with --min/--max/--points".into(),
            ));
        }
        return Ok(vec![x]);
    }
    let spec = GridSpec::new(
        g.min.unwrap_or(lo),
        g.max.unwrap_or(hi),
        g.points.unwrap_or(points),
        g.spacing.into(),
    )?;
    Ok(spec.values())
}

fn value_cells(v: Result<(f64, f64), String>) -> (Cell, Cell, Option<String>) {
    match v {
        Ok((value, err)) => (value.into(), err.into(), None),
        Err(e) => (Cell::Missing, Cell::Missing, Some(e)),
    }
}

fn error_count(table: &Table) -> usize {
    let col = table.columns.iter().position(|c| c == "error").expect("error column");
    table.rows.iter().filter(|r| r[col] != Cell::Missing).count()
}

pub fn eval(a: &EvalArgs) -> Result<(Report, u8), CliError> {
    let params = FamilyParams::new(a.family.c, a.family.n)?;
    let pol = policy(&a.series)?;
    let hi = match params.support() {
        Support::Finite(_) => params.domain().1,
        Support::Unbounded => 10.0,
    };
    let xs = resolve_grid(&a.grid, 0.0, hi, 11)?;
    let mut columns = vec!["x".to_string()];
    columns.extend((0..a.head).map(|k| format!("p{k}")));
    for q in ["H", "S", "R", "T"] {
        columns.push(q.into());
        columns.push(format!("{q}_err"));
    }
    columns.extend(["terms".into(), "error".into()]);
    let mut table = Table::new(columns);

    let results = map_points(&xs, |x| {
        let head = basis_head(&params, x, a.head);
        let set = entropy_set(&params, x, &pol);
        (head, set)
    });
    for (x, (head, set)) in xs.iter().zip(results) {
        let mut row: Vec<Cell> = vec![(*x).into()];
        let mut error = None;
        match head {
            Ok(h) => row.extend(h.into_iter().map(Cell::from)),
            Err(e) => {
                row.extend((0..a.head).map(|_| Cell::Missing));
                error = Some(e.to_string());
            }
        }
        match set {
            Ok(EntropySet {
                shannon,
                sum_squares,
                renyi2,
                tsallis2,
            }) => {
                for v in [shannon, sum_squares, renyi2, tsallis2] {
                    row.push(v.value.into());
                    row.push(v.error_bound.into());
                }
                row.push(shannon.terms_used.max(sum_squares.terms_used).into());
            }
            Err(e) => {
                row.extend((0..9).map(|_| Cell::Missing));
                error = error.or(Some(e.to_string()));
            }
        }
        row.push(error.into());
        table.push(row);
    }
    let errors = error_count(&table);
    let summary = json!({ "rows": table.rows.len(), "row_errors": errors });
    Ok((Report::new("eval", config_json(a), "rows", table, summary), 0))
}

pub fn deriv(a: &DerivArgs) -> Result<(Report, u8), CliError> {
    let params = FamilyParams::new(a.family.c, a.family.n)?;
    let pol = policy(&a.series)?;
    let order = a.order as usize;
    let xs = match (params.support(), &a.grid) {
        (Support::Finite(_), g) if g.x.is_none() && g.min.is_none() && g.max.is_none() => {
            interior_points(0.0, params.domain().1, g.points.unwrap_or(9))
        }
        (_, g) => resolve_grid(g, 0.1, 10.0, 10)?,
    };
    let mut table = Table::new(["x", "order", "value", "error_bound", "scale", "error"]);
    let results = map_points(&xs, |x| match a.method {
        MethodArg::Exact => {
            shannon_derivative_parts(&params, x, order, &pol).map(|p| (p.value, p.error_bound, Some(p.scale())))
        }
        MethodArg::Fd => {
            params.check_interior(x)?;
            let domain = params.domain();
            let f = |t: f64| shannon(&params, t, &pol).map(|v| v.value);
            finite_difference_derivative(f, x, order, auto_step(x, order, domain), domain)
                .map(|e| (e.value, e.error_estimate, None))
        }
    });
    for (x, r) in xs.iter().zip(results) {
        let row = match r {
            Ok((v, err, scale)) => vec![
                (*x).into(),
                order.into(),
                v.into(),
                err.into(),
                scale.into(),
                Cell::Missing,
            ],
            Err(e) => vec![
                (*x).into(),
                order.into(),
                Cell::Missing,
                Cell::Missing,
                Cell::Missing,
                e.to_string().into(),
            ],
        };
        table.push(row);
    }
    let errors = error_count(&table);
    let summary = json!({ "rows": table.rows.len(), "row_errors": errors });
    Ok((Report::new("deriv", config_json(a), "rows", table, summary), 0))
}

fn suite_id(s: SuiteArg) -> Option<SuiteId> {
    Some(match s {
        SuiteArg::Theorem1 => SuiteId::Theorem1,
        SuiteArg::Theorem2 => SuiteId::Theorem2,
        SuiteArg::Theorem3 => SuiteId::Theorem3,
        SuiteArg::Corollary1 => SuiteId::Corollary1,
        SuiteArg::Section3 => SuiteId::Section3,
        SuiteArg::Representations => SuiteId::Representations,
        SuiteArg::All => return None,
    })
}

/// Family implied by a suite when only `--n` is given.
fn default_c(id: SuiteId) -> f64 {
    match id {
        SuiteId::Theorem1 => -1.0,
        SuiteId::Theorem3 => 1.0,
        _ => 0.0,
    }
}

fn finding_table(outcomes: &[SuiteOutcome]) -> Table {
    let mut t = Table::new([
        "suite",
        "check",
        "kind",
        "x",
        "order",
        "margin",
        "scale",
        "relative",
        "tolerance",
        "violation",
    ]);
    for o in outcomes {
        for r in &o.reports {
            for f in &r.findings {
                let kind = serde_json::to_value(f.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from));
                t.push(vec![
                    o.suite.name().into(),
                    r.suite.clone().into(),
                    kind.into(),
                    f.x.into(),
                    f.order.into(),
                    f.margin.into(),
                    f.scale.into(),
                    f.relative().into(),
                    r.tolerance.into(),
                    (!r.report_only && f.relative() < -r.tolerance).into(),
                ]);
            }
        }
    }
    t
}

fn report_summary(r: &CheckReport) -> Value {
    json!({
        "check": r.suite,
        "grid": r.grid,
        "tolerance": r.tolerance,
        "findings": r.findings.len(),
        "violations": r.violations().count(),
        "worst_relative_margin": if r.worst_margin.is_finite() { json!(r.worst_margin) } else { Value::Null },
        "worst_at": r.worst_at.map(|f| json!({ "x": f.x, "order": f.order, "margin": f.margin, "scale": f.scale })),
        "passed": r.passed,
        "report_only": r.report_only,
    })
}

fn outcome_report(command: &str, config: Value, outcomes: &[SuiteOutcome], timing: bool) -> (Report, u8) {
    let exit = outcomes.iter().map(|o| o.classification.exit_code()).max().unwrap_or(0);
    let mut overview = Table::new([
        "suite",
        "check",
        "findings",
        "violations",
        "worst_relative",
        "tolerance",
        "status",
    ]);
    let mut notes = Vec::new();
    for o in outcomes {
        for r in &o.reports {
            let status = if r.report_only {
                "report"
            } else if r.passed {
                "pass"
            } else {
                "FAIL"
            };
            overview.push(vec![
                o.suite.name().into(),
                r.suite.clone().into(),
                r.findings.len().into(),
                r.violations().count().into(),
                r.worst_margin.into(),
                r.tolerance.into(),
                status.into(),
            ]);
            for v in r.violations().take(10) {
                notes.push(format!(
                    "  violation in {}: x = {}, order {}, margin {} (scale {})",
                    r.suite,
                    human_number(v.x),
                    v.order,
                    human_number(v.margin),
                    human_number(v.scale)
                ));
            }
        }
    }
    let suites: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "suite": o.suite.name(),
                "classification": o.classification,
                "reports": o.reports.iter().map(report_summary).collect::<Vec<_>>(),
            })
        })
        .collect();
    let passed = exit == 0;
    notes.push(format!("result: {}", if passed { "pass" } else { "violation" }));
    let summary = json!({ "passed": passed, "exit_code": exit, "suites": suites });
    let mut report = Report::new(command, config, "findings", finding_table(outcomes), summary);
    report.human_table = Some(overview);
    report.human_notes = notes;
    if timing {
        report.wall_time = Some(outcomes.iter().map(|o| o.wall_time).sum());
    }
    (report, exit)
}

pub fn check(a: &CheckArgs) -> Result<(Report, u8), CliError> {
    let ids: Vec<SuiteId> = match suite_id(a.suite) {
        Some(id) => vec![id],
        None => SuiteId::ALL.to_vec(),
    };
    let params = match (a.c, a.n) {
        (None, None) => None,
        (Some(_), None) => return Err(CliError::Usage("--c needs --n".into())),
        (c, Some(n)) => {
            if ids.len() > 1 {
                return Err(CliError::Usage(
                    "'check all' runs the default matrices; drop --c/--n".into(),
                ));
            }
            if ids[0] == SuiteId::Representations {
                return Err(CliError::Usage("the representations suite takes no --c/--n".into()));
            }
            let p = FamilyParams::new(c.unwrap_or(default_c(ids[0])), n)?;
            if !ids[0].accepts(&p) {
                return Err(CliError::Usage(format!(
                    "suite {} does not apply to c = {}",
                    ids[0],
                    p.c()
                )));
            }
            Some(p)
        }
    };
    if !(a.tol > 0.0 && a.sandwich_tol > 0.0 && a.repr_tol > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    let cfg = SuiteConfig {
        check: CheckConfig {
            tol: a.tol,
            policy: policy(&a.series)?,
            invert_signs: a.invert_signs,
        },
        sandwich_tol: a.sandwich_tol,
        representation_tol: a.repr_tol,
        quick: a.quick,
        ..SuiteConfig::default()
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let start = Instant::now();
        let reports = run_suite(id, params, &cfg)?;
        outcomes.push(SuiteOutcome::new(id, reports, start.elapsed()));
    }
    Ok(outcome_report("check", config_json(a), &outcomes, a.output.timing))
}

pub fn scan_conjecture(a: &ScanArgs) -> Result<(Report, u8), CliError> {
    let params = FamilyParams::new(a.family.c, a.family.n)?;
    if params.c() >= 0.0 {
        return Err(CliError::Usage(format!(
            "scan-conjecture needs c < 0 (got c = {}); S is log-convex there by complete monotonicity",
            params.c()
        )));
    }
    let cfg = CheckConfig {
        policy: policy(&a.series)?,
        ..CheckConfig::default()
    };
    let start = Instant::now();
    let report = conjecture33_scan(&params, a.points, &cfg)?;
    let elapsed = start.elapsed();

    let mut table = Table::new(["x", "second_difference_log_s", "negative"]);
    for f in &report.findings {
        table.push(vec![f.x.into(), f.margin.into(), (f.margin < 0.0).into()]);
    }
    let min = report
        .findings
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .copied();
    let negatives = report.findings.iter().filter(|f| f.margin < 0.0).count();
    let summary = json!({
        "scan": report.suite,
        "grid": report.grid,
        "min_second_difference": min.map(|f| f.margin),
        "argmin": min.map(|f| f.x),
        "negative_count": negatives,
        "classification": Classification::ReportOnly,
    });
    let mut out = Report::new("scan-conjecture", config_json(a), "findings", table, summary);
    if let Some(m) = min {
        out.human_notes.push(format!(
            "minimum second difference of ln S: {} at x = {}",
            human_number(m.margin),
            human_number(m.x)
        ));
    }
    out.human_notes.push(format!(
        "negative second differences: {negatives} (report only; the statement is open)"
    ));
    if a.output.timing {
        out.wall_time = Some(elapsed);
    }
    Ok((out, 0))
}

fn quantity_value(set: &EntropySet, q: Quantity) -> (f64, f64) {
    let v = match q {
        Quantity::H => set.shannon,
        Quantity::S => set.sum_squares,
        Quantity::R => set.renyi2,
        Quantity::T => set.tsallis2,
    };
    (v.value, v.error_bound)
}

pub fn sweep(a: &SweepArgs) -> Result<(Report, u8), CliError> {
    let pol = policy(&a.series)?;
    let xs = resolve_grid(&a.grid, 0.0, 1.0, 11)?;
    let mut columns = vec!["c".to_string(), "n".into(), "x".into()];
    for q in &a.quantities {
        let name = format!("{q:?}");
        columns.push(format!("{name}_err"));
        columns.push(name);
        let len = columns.len();
        columns.swap(len - 2, len - 1);
    }
    columns.push("error".into());
    let mut table = Table::new(columns);
    for &c in &a.c_values {
        for &n in &a.n_values {
            let params = FamilyParams::new(c, n);
            let sets: Vec<Result<EntropySet, String>> = match &params {
                Ok(p) => map_points(&xs, |x| entropy_set(p, x, &pol).map_err(|e| e.to_string())),
                Err(e) => xs.iter().map(|_| Err(e.to_string())).collect(),
            };
            for (x, set) in xs.iter().zip(sets) {
                let mut row: Vec<Cell> = vec![c.into(), n.into(), (*x).into()];
                let mut error = None;
                for &q in &a.quantities {
                    let (v, e, err) = value_cells(set.as_ref().map(|s| quantity_value(s, q)).map_err(Clone::clone));
                    row.push(v);
                    row.push(e);
                    error = error.or(err);
                }
                row.push(error.into());
                table.push(row);
            }
        }
    }
    let errors = error_count(&table);
    let summary = json!({ "rows": table.rows.len(), "row_errors": errors });
    Ok((Report::new("sweep", config_json(a), "rows", table, summary), 0))
}
