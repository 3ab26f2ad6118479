use std::process::{Command, Output};

use serde_json::Value;

fn qtet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtet")).args(args).output().expect("qtet runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn analyze_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qtet(&["analyze", "--graph", "cycle:9", "--base-vertex", "0", "--seed", "42", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["graph"]["D"], 4);
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["boxtimes"]["per_relation"].as_array().unwrap().len(), 20);
    let modules = report["decomposition"]["modules"].as_array().unwrap();
    assert!(modules.iter().any(|m| m["d"] == 3 && m["disp1"] == 1));
}

#[test]
fn stage_failures_map_to_exit_codes() {
    let cube = qtet(&["analyze", "--graph", "hypercube:4"]);
    assert_eq!(code(&cube), 4);
    assert!(json(&cube)["status"]["message"].as_str().unwrap().contains("β = 2"));
    assert_eq!(code(&qtet(&["analyze", "--graph", "cycle:5"])), 2);
    assert_eq!(code(&qtet(&["analyze", "--graph", "path:5"])), 2);
    assert_eq!(code(&qtet(&["analyze", "--graph", "cycle:9", "--base-vertex", "9"])), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&qtet(&["analyze"])), 1);
    assert_eq!(code(&qtet(&["analyze", "--graph", "cycle:9", "--edges", "x"])), 1);
    assert_eq!(code(&qtet(&["analyze", "--graph", "cycle:9", "--format", "yaml"])), 1);
    assert_eq!(code(&qtet(&["analyze", "--edges", "/nonexistent/graph.edges"])), 1);
    assert_eq!(code(&qtet(&["relations", "--d", "3", "--q", "one", "--r", "2"])), 1);
    assert_eq!(code(&qtet(&["--help"])), 0);
}

#[test]
fn edge_file_matches_generator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c9.edges");
    let text: String = (0..9).map(|i| format!("{i} {}\n", (i + 1) % 9)).collect();
    std::fs::write(&path, format!("# nine-cycle\n{text}")).unwrap();
    let from_file = json(&qtet(&["analyze", "--edges", path.to_str().unwrap()]));
    let from_spec = json(&qtet(&["analyze", "--graph", "cycle:9"]));
    assert_eq!(from_file["main_theorem"], from_spec["main_theorem"]);
    assert_eq!(from_file["status"]["exit_code"], 0);
}

#[test]
fn partial_commands_stop_early() {
    let fit = json(&qtet(&["fit", "--graph", "cycle:8"]));
    assert!(fit["qracah"]["q"].is_object());
    assert!(fit["decomposition"].is_null());
    let dec = json(&qtet(&["decompose", "--graph", "cycle:8"]));
    assert!(dec["qracah"].is_null());
    assert_eq!(dec["decomposition"]["modules"].as_array().unwrap().len(), 2);
}

#[test]
fn relations_lab_exit_codes() {
    let ok = qtet(&["relations", "--d", "4", "--q", "1.05", "--r", "0.7"]);
    assert_eq!(code(&ok), 0);
    assert!(json(&ok)["max_relation_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(code(&qtet(&["relations", "--d", "2", "--q", "1.0", "--r", "0.5"])), 7);
    let excluded = qtet(&["relations", "--d", "3", "--q", "1.1", "--r", "q^2"]);
    assert_eq!(code(&excluded), 7);
    assert!(json(&excluded)["status"]["message"].as_str().unwrap().contains("r = q^2"));
    assert_eq!(code(&qtet(&["relations", "--d", "3", "--q", "polar:1.1,0.4", "--r", "-0.5+1.2i"])), 0);
}

#[test]
fn text_format_lists_checks() {
    let out = qtet(&["analyze", "--graph", "cycle:7", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph cycle:7: n = 7"));
    assert!(text.contains("main_theorem_A"));
    assert!(text.trim_end().ends_with("exit 0 (complete)"));
}
