use std::path::Path;
use std::process::{Command, Output};

fn clairaut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clairaut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn record<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("record {name} missing"))
}

#[test]
fn golden_report_exits_zero() {
    let out = clairaut(&["report", "golden", "--count", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(record(&r, "clairaut.umbilical_fibers")["verdict"], "PASS");
    assert_eq!(record(&r, "ricci.ccs.vertical-vertical")["verdict"], "REPORT-ONLY");
}

#[test]
fn strict_paper_promotes_report_only_failures() {
    let out = clairaut(&["report", "golden", "--count", "4", "--strict-paper"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn perturbed_clairaut_certificate_fails() {
    let out = clairaut(&["clairaut", "perturbed", "--count", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(record(&json(&out), "clairaut.umbilical_fibers")["verdict"], "FAIL");
}

#[test]
fn fiber_coordinate_perturbation_still_passes() {
    let out = clairaut(&["clairaut", "perturbed_fiber_coordinate", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name": "x", "total": {"coords": ["u"], "metric": [["1"]]}, "bogus": 1}"#,
    )
    .unwrap();
    let out = clairaut(&["check-conformal", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let out = clairaut(&["check-conformal", "no_such_scenario"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonsingular_domain_violation_exits_two() {
    let out = clairaut(&["christoffel", "golden", "--at", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = clairaut(&["report", "twisted_heisenberg", "--count", "3"]);
    let b = clairaut(&["report", "twisted_heisenberg", "--count", "3"]);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = clairaut(&[
        "oneill",
        "flat_product",
        "--count",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let direct = clairaut(&["oneill", "flat_product", "--count", "3"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn christoffel_table_of_conformally_flat_total_space() {
    // g = e^{-2u1} I: Γ^1_11 = −1, Γ^1_22 = 1, Γ^2_12 = −1, Γ^1_23 = 0.
    let out = clairaut(&["christoffel", "golden", "--at", "0.3,-0.2,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let symbols = r["details"]["christoffel"]["symbols"].as_array().unwrap();
    let get = |k: u64, i: u64, j: u64| {
        symbols
            .iter()
            .find(|e| e["index"] == serde_json::json!([k, i, j]))
            .unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert!((get(1, 1, 1) + 1.0).abs() < 1e-12);
    assert!((get(1, 2, 2) - 1.0).abs() < 1e-12);
    assert!((get(2, 1, 2) + 1.0).abs() < 1e-12);
    assert!(get(1, 2, 3).abs() < 1e-12);
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let headers = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

#[test]
fn flat_geodesic_has_no_drift_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = clairaut(&[
        "geodesic",
        "flat",
        "--p0",
        "0,0",
        "--v0",
        "1,-0.5",
        "--length",
        "2",
        "--step",
        "0.01",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (headers, rows) = read_csv(&path);
    assert_eq!(headers[0], "s");
    assert!(headers.iter().any(|h| h == "clairaut_value"));
    assert_eq!(rows.len(), 201);
    let x_col = headers.iter().position(|h| h == "x1").unwrap();
    let last: f64 = rows.last().unwrap()[x_col].parse().unwrap();
    assert!((last - 2.0).abs() < 1e-9);
    let drift = record(&json(&out), "clairaut.geodesic_invariant")["max_residual"]
        .as_f64()
        .unwrap();
    assert!(drift < 1e-12);
}

#[test]
fn ricci_breakdown_csv_has_totals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let out = clairaut(&[
        "ricci-decompose",
        "golden",
        "--count",
        "2",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (headers, rows) = read_csv(&path);
    let term = headers.iter().position(|h| h == "term").unwrap();
    let formula = headers.iter().position(|h| h == "formula").unwrap();
    for label in ["rhs_total", "intrinsic", "delta"] {
        assert!(rows.iter().any(|r| r[term] == label), "{label}");
    }
    assert!(rows.iter().any(|r| r[formula] == "hcs"));
    assert!(rows.iter().any(|r| r[formula] == "ccs"));
}

#[test]
fn seed_override_changes_samples() {
    let a = json(&clairaut(&[
        "check-conformal",
        "flat_product",
        "--count",
        "2",
        "--seed",
        "1",
    ]));
    let b = json(&clairaut(&[
        "check-conformal",
        "flat_product",
        "--count",
        "2",
        "--seed",
        "2",
    ]));
    assert_eq!(a["environment"]["seed"], 1);
    assert_ne!(a["details"]["frames"], b["details"]["frames"]);
}
