use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cm-entropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn eval_binary_midpoint() {
    let doc = json(&["eval", "--c", "-1", "--n", "1", "--x", "0.5"]);
    let row = &doc["rows"][0];
    assert!((row["H"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
    assert_eq!(row["S"].as_f64().unwrap(), 0.5);
    assert!((row["R"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
    assert_eq!(row["T"].as_f64().unwrap(), 0.5);
    assert!(row["error"].is_null());
}

#[test]
fn eval_poisson_collision_sum() {
    let doc = json(&["eval", "--c", "0", "--n", "1", "--x", "1"]);
    let row = &doc["rows"][0];
    let s = row["S"].as_f64().unwrap();
    assert!((s - 0.308_508_322_553_671).abs() <= row["S_err"].as_f64().unwrap() + 1e-15);
}

#[test]
fn eval_rejects_non_integer_support() {
    let out = run(&["eval", "--c", "-1", "--n", "2.5", "--x", "0.2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("-n/c must be a positive integer"));
}

#[test]
fn eval_marks_rows_outside_the_domain() {
    let doc = json(&[
        "eval", "--c", "-1", "--n", "2", "--min", "0", "--max", "2", "--points", "5",
    ]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows[2]["error"].is_null());
    assert!(rows[4]["error"].as_str().unwrap().contains("outside"));
    assert_eq!(doc["summary"]["row_errors"], 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["eval", "--c", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(
        code(&run(&["eval", "--c", "0", "--n", "1", "--min", "2", "--max", "1"])),
        2
    );
    assert_eq!(code(&run(&["deriv", "--c", "0", "--n", "1", "--order", "11"])), 2);
    assert_eq!(code(&run(&["check", "theorem1", "--c", "0", "--n", "1"])), 2);
    assert_eq!(code(&run(&["check", "all", "--n", "1"])), 2);
    assert_eq!(code(&run(&["check", "theorem2", "--tol", "0"])), 2);
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&run(&["check", "theorem1", "--c", "-1", "--n", "5"])), 0);
    assert_eq!(code(&run(&["check", "theorem2", "--n", "1"])), 0);
    assert_eq!(code(&run(&["check", "theorem3", "--n", "2", "--quick"])), 0);
    assert_eq!(code(&run(&["check", "theorem2", "--n", "1", "--invert-signs"])), 1);
}

#[test]
fn corollary1_margins_are_positive() {
    let doc = json(&["check", "corollary1", "--c", "0", "--n", "1"]);
    let findings = doc["findings"].as_array().unwrap();
    assert!(!findings.is_empty());
    assert!(findings.iter().all(|f| f["margin"].as_f64().unwrap() > 0.0));
    assert_eq!(doc["summary"]["passed"], true);
}

#[test]
fn check_report_schema() {
    let doc = json(&["check", "theorem1", "--c", "-2", "--n", "8"]);
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["meta", "config", "findings", "summary"]);
    for f in doc["findings"].as_array().unwrap() {
        for key in ["suite", "x", "order", "margin", "tolerance"] {
            assert!(!f[key].is_null(), "finding lacks {key}");
        }
    }
    assert_eq!(doc["summary"]["suites"][0]["classification"], "pass");
}

#[test]
fn reports_are_byte_deterministic() {
    for args in [
        &[
            "check", "section3", "--c", "0", "--n", "1", "--quick", "--format", "json",
        ][..],
        &[
            "sweep",
            "--c-values",
            "-1,0,1",
            "--n-values",
            "2",
            "--points",
            "7",
            "--format",
            "csv",
        ][..],
        &["eval", "--c", "1", "--n", "3", "--points", "9"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn timing_only_in_footer() {
    let out = run(&[
        "eval", "--c", "0", "--n", "1", "--x", "1", "--format", "json", "--timing",
    ]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["footer"]["wall_time_s"].is_number());
    assert!(!stdout(&run(&["eval", "--c", "0", "--n", "1", "--x", "1", "--format", "json"])).contains("wall"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = run(&[
        "deriv",
        "--c",
        "0",
        "--n",
        "1",
        "--order",
        "2",
        "--x",
        "1",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,order,value,error_bound,scale,error");
    let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
    let exact: f64 = cells[2].parse().unwrap();
    let fd = json(&[
        "deriv", "--c", "0", "--n", "1", "--order", "2", "--x", "1", "--method", "fd",
    ]);
    assert!((exact - fd["rows"][0]["value"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn sweep_rows_are_c_major() {
    let doc = json(&[
        "sweep",
        "--c-values",
        "-1,0,1",
        "--n-values",
        "2",
        "--quantities",
        "H",
        "--points",
        "4",
    ]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 4);
    let cs: Vec<f64> = rows.iter().map(|r| r["c"].as_f64().unwrap()).collect();
    assert!(cs.windows(2).all(|w| w[0] <= w[1]));
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["c", "n", "x", "H", "H_err", "error"]);
}

#[test]
fn sweep_marks_invalid_family_members() {
    let out = run(&[
        "sweep",
        "--c-values",
        "-1,1",
        "--n-values",
        "1,1.5",
        "--points",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "c,n,x,H,H_err,S,S_err,R,R_err,T,T_err,error"
    );
    assert_eq!(text.lines().count(), 1 + 4 * 3);
    let marked = text.lines().filter(|l| l.ends_with('"')).count();
    // (-1, 1.5) has non-integer support, (1, 1) violates n > c
    assert_eq!(marked, 6);
}

#[test]
fn scan_conjecture_reports_without_failing() {
    let doc = json(&["scan-conjecture", "--c", "-1", "--n", "1", "--points", "21"]);
    let min = doc["summary"]["min_second_difference"].as_f64().unwrap();
    let at = doc["summary"]["argmin"].as_f64().unwrap();
    // (ln S)'' for S = 1 - 2x + 2x^2 is smallest next to the endpoints
    assert!(min > 0.0);
    assert!(!(0.1..=0.9).contains(&at), "{at}");
    assert_eq!(doc["summary"]["classification"], "report-only");
    assert_eq!(code(&run(&["scan-conjecture", "--c", "1", "--n", "2"])), 2);
}
