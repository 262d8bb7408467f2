use std::process::{Command, Output};

use heis::cli::{exit_code, EXIT_PARSE, EXIT_SOLVER};
use heis::HeisError;
use serde_json::Value;

fn heis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heis")).args(args).env_remove("HEIS_THREADS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.as_f64().unwrap()),
        Value::Array(a) => a.iter().for_each(|x| numbers(x, out)),
        Value::Object(o) => o.iter().filter(|(k, _)| k.as_str() != "dim" && k.as_str() != "n" && k.as_str() != "multiplicity" && k.as_str() != "n_prime").for_each(|(_, x)| numbers(x, out)),
        _ => {}
    }
}

#[test]
fn two_site_spectrum_csv() {
    let out = heis(&["spectrum", "--graph", "box:d=1,L=2", "--all-sectors", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sector,energy,n_prime,multiplicity"));
    let mut energies: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).collect();
    energies.sort_by(f64::total_cmp);
    assert_eq!(energies.len(), 4);
    assert!(energies[..3].iter().all(|e| e.abs() < 1e-12) && (energies[3] - 1.0).abs() < 1e-12);
}

#[test]
fn figure_compat_is_scaled_internal_output() {
    let plain = json(&heis(&["spectrum", "--graph", "box:d=2,L=3", "--sector", "2"]));
    let scaled = json(&heis(&["spectrum", "--graph", "box:d=2,L=3", "--sector", "2", "--figure-compat"]));
    let (mut a, mut b) = (Vec::new(), Vec::new());
    numbers(&plain["results"], &mut a);
    numbers(&scaled["results"], &mut b);
    assert!(!a.is_empty() && a.len() == b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x * 2.0, *y);
    }
    let hw: Vec<f64> = scaled["results"][0]["highest_weight"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((hw[0] - 1.6473).abs() < 1e-3 && (hw[hw.len() - 1] - 10.2157).abs() < 1e-3);
}

#[test]
fn figure_column_for_the_chain() {
    let out = json(&heis(&["spectrum", "--graph", "box:d=1,L=8", "--all-sectors", "--figure-compat"]));
    let sector1 = out["results"].as_array().unwrap().iter().find(|s| s["n"] == 1).unwrap();
    let hw: Vec<f64> = sector1["highest_weight"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (got, want) in hw.iter().zip([0.1522, 0.5858, 1.2346, 2.0, 2.7654, 3.4142]) {
        assert!((got - want).abs() < 1e-3);
    }
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["foel", "--graph", "lambda:d=2,N=7", "--method", "krylov", "--seed", "5"][..],
        &["spectrum", "--graph", "ring:L=7", "--all-sectors"][..],
        &["ineq", "--suite", "deficit", "--samples", "20", "--seed", "3"][..],
    ] {
        let a = heis(args);
        let b = heis(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn exit_codes() {
    assert_eq!(heis(&["foel", "--graph", "box:d=1,L=8", "--strict"]).status.code(), Some(0));
    let ring = heis(&["foel", "--graph", "ring:L=6", "--n", "2"]);
    assert_eq!(ring.status.code(), Some(1));
    let v = json(&ring);
    assert_eq!(v["results"][0]["violations"][0][0], 3);
    assert_eq!(heis(&["foel", "--graph", "bogus:L=2"]).status.code(), Some(2));
    assert_eq!(heis(&["foel", "--graph", "box:d=1"]).status.code(), Some(2));
    assert_eq!(heis(&["spectrum"]).status.code(), Some(2));
    assert_eq!(heis(&["spinwave", "--d", "1", "--N", "8", "--modes", "9"]).status.code(), Some(2));
    let err = heis(&["foel", "--graph", "ring:L=2"]);
    assert!(!String::from_utf8_lossy(&err.stderr).is_empty());
}

#[test]
fn solver_errors_map_to_three() {
    let conv = HeisError::Convergence { iterations: 1, best_value: 0.0, residual: 1.0, best_vector: vec![] };
    assert_eq!(exit_code(&conv), EXIT_SOLVER);
    assert_eq!(exit_code(&HeisError::Labeling { value: 0.3 }), EXIT_SOLVER);
    assert_eq!(exit_code(&HeisError::Numerical("x".into())), EXIT_SOLVER);
    assert_eq!(exit_code(&HeisError::Parse { line: 1, message: "x".into() }), EXIT_PARSE);
}

#[test]
fn malformed_graph_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, "0 1 1.0\n1 x 1.0\n").unwrap();
    let out = heis(&["foel", "--graph", &format!("file:{}", path.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = heis(&["induct", "--d", "1", "--n", "1", "--N-max", "8", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["meta"]["command"], "induct");
    assert_eq!(v["results"]["final_foel_n"], true);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r["is_new_low"] == true));
}

#[test]
fn trace_sweep_lists_its_violations() {
    let out = heis(&["ineq", "--suite", "trace", "--samples", "2000"]);
    let v = json(&out);
    let violations = v["results"]["violations"].as_array().unwrap();
    assert_eq!(out.status.code(), Some(if violations.is_empty() { 0 } else { 1 }));
    assert!(violations.iter().all(|c| c.as_str().unwrap().starts_with("trace/L=2/")));
}

#[test]
fn spinwave_report() {
    let v = json(&heis(&["spinwave", "--d", "1", "--N", "16", "--modes", "1;2"]));
    assert_eq!(v["results"]["L"], 16);
    assert!((v["results"]["residual"].as_f64().unwrap() - 1.062429985467809).abs() < 1e-9);
}

#[test]
fn foel_csv_has_a_header_row() {
    let out = heis(&["foel", "--graph", "box:d=2,L=3", "--strict", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,n_prime,energy,holds,violating"));
    // one row per (n, n') pair with n ≤ n' ≤ 4
    assert_eq!(text.lines().count(), 1 + 5 + 4 + 3 + 2 + 1);
}
