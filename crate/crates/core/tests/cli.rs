use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn deutsch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deutsch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn function_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn run_prints_verdict() {
    let o = deutsch(&["run", "01"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "outcome=1 classification=balanced evaluations=1");

    let o = deutsch(&["run", "11", "--initial-a", "1"]);
    assert_eq!(stdout(&o).trim(), "outcome=1 classification=constant evaluations=1");
}

#[test]
fn run_trace_lists_every_stage() {
    let out = stdout(&deutsch(&["run", "00", "--trace"]));
    for stage in ["[input]", "[after_H_A]", "[after_H_f]", "[after_H_A_2]"] {
        assert!(out.contains(stage), "{stage} missing from\n{out}");
    }
    assert!(out.contains("|00>_B|0>_A|0>_V  +1/√2"));
}

#[test]
fn run_json_holds_stage_dumps() {
    let o = deutsch(&["run", "01", "--json"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["verdict"]["outcome_bit"], 1);
    let stages = doc["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 4);
    let eval = &stages[2];
    assert_eq!(eval["stage"], "after_H_f");
    let entries = eval["entries"].as_array().unwrap();
    let signs: Vec<(String, f64)> = entries
        .iter()
        .map(|e| (e["basis"].as_str().unwrap().to_string(), e["re"].as_f64().unwrap()))
        .collect();
    let want = [("0100", 0.5), ("0101", -0.5), ("0110", -0.5), ("0111", 0.5)];
    assert_eq!(signs.len(), 4);
    for ((label, re), (wl, wr)) in signs.iter().zip(want) {
        assert_eq!(label, wl);
        assert!((re - wr).abs() < 1e-12);
    }
}

#[test]
fn bad_setting_is_a_usage_error() {
    assert_eq!(deutsch(&["run", "2"]).status.code(), Some(2));
    assert_eq!(deutsch(&["run", "010"]).status.code(), Some(2));
    assert_eq!(deutsch(&["sample", "01", "--shots", "0"]).status.code(), Some(2));
    assert_eq!(deutsch(&["sample", "01", "--register", "Q"]).status.code(), Some(2));
}

#[test]
fn sampling_eigenstate_is_deterministic() {
    let o = deutsch(&["sample", "01", "--register", "A", "--shots", "100", "--seed", "7", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["counts"], serde_json::json!({"1": 100}));
    assert!(doc["rng"].as_str().unwrap().contains("chacha8"));
}

#[test]
fn sampling_superposed_register() {
    let one = deutsch(&["sample", "superposed", "--register", "B", "--shots", "1", "--json"]);
    let doc: Value = serde_json::from_slice(&one.stdout).unwrap();
    let counts = doc["counts"].as_object().unwrap();
    assert_eq!(counts.len(), 1);

    let many = deutsch(&["sample", "superposed", "--register", "B", "--shots", "40000", "--seed", "42", "--json"]);
    let doc: Value = serde_json::from_slice(&many.stdout).unwrap();
    let sigma = (40_000.0f64 * 0.25 * 0.75).sqrt();
    for b in ["00", "01", "10", "11"] {
        let n = doc["counts"][b].as_f64().unwrap();
        assert!((n - 10_000.0).abs() <= 3.0 * sigma, "{b}: {n}");
    }

    let table = stdout(&deutsch(&["sample", "superposed", "--register", "B", "--seed", "3"]));
    assert!(table.contains("outcome"));
    assert!(table.lines().filter(|l| l.starts_with(['0', '1'])).count() == 4);
}

#[test]
fn same_seed_same_counts() {
    let a = stdout(&deutsch(&["sample", "superposed", "--register", "B", "--seed", "11"]));
    let b = stdout(&deutsch(&["sample", "superposed", "--register", "B", "--seed", "11"]));
    assert_eq!(a, b);
}

#[test]
fn dj_reads_function_file() {
    let f = function_file("# the identity\n01: 0,1\n\n00: 0,0\n");
    let o = deutsch(&["dj", "--function-file", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("01: outcome=1 classification=balanced evaluations=1"));
    assert!(out.contains("00: outcome=0 classification=constant evaluations=1"));
}

#[test]
fn dj_all_enumerates_promise_functions() {
    let o = deutsch(&["dj", "--all", "--n", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let verdicts = doc["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 8);
    let constant = verdicts
        .iter()
        .filter(|v| v["verdict"]["classification"] == "constant")
        .count();
    assert_eq!(constant, 2);
}

#[test]
fn dj_rejects_malformed_file() {
    let f = function_file("f: 0,0,1\n");
    let o = deutsch(&["dj", "--function-file", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dj_promise_violation_exit_code() {
    let f = function_file("000: 0,0,0,1\n");
    let o = deutsch(&["dj", "--function-file", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0,0,0,1"), "{err}");
}

#[test]
fn verify_passes_all_checks() {
    let o = deutsch(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PASS eq5_final_state")));
    assert!(out.lines().any(|l| l.starts_with("PASS deferred_equivalence_b01")));
    assert!(!out.contains("FAIL"));
}

#[test]
fn superposed_reports_correlation_and_single_call() {
    let out = stdout(&deutsch(&["superposed"]));
    assert!(out.contains("b=01 -> balanced"));
    assert!(out.contains("b=11 -> constant"));
    assert!(out.contains("oracle applications 1"));
}
