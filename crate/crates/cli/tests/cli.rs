use std::path::PathBuf;
use std::process::{Command, Output};

fn fmtlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmtlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fmtlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const GRAPH: &str = r#"{"vocab": [["<",2],["R",2],["P",1]], "order": "<", "n": 5, "relations": {"R": [[0,3],[3,0]], "P": [[2]]}}"#;

#[test]
fn check_prints_truth_value() {
    let g = scratch("g.json", GRAPH);
    let o = fmtlab(&["check", "--structure", g.to_str().unwrap(), "--formula", "E x0. x0=x0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
    let o = fmtlab(&["check", "--structure", g.to_str().unwrap(), "--formula", "E x0. E x1. (P(x0) & R(x0,x1))"]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn zeta_lower_at_one() {
    let o = fmtlab(&["bounds", "--zeta-lower", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn vwlaw_rows() {
    let args = ["vwlaw", "--pseq", "geometric:0.5,0.5", "--formula-name", "psi0", "--n", "16..24", "--samples", "1000", "--seed", "7"];
    let o = fmtlab(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("sentence,n,samples"));
    let (rows, diffs): (Vec<&str>, Vec<&str>) = lines[1..].iter().partition(|l| l.split(',').nth(2) != Some(""));
    assert_eq!(rows.len(), 9);
    assert_eq!(diffs.len(), 8);
    // same flags, same bytes, whatever the worker count
    let mut more = args.to_vec();
    more.extend(["--workers", "3"]);
    assert_eq!(stdout(&fmtlab(&more)), text);
}

#[test]
fn run_parameters_go_to_stderr() {
    let o = fmtlab(&["estimate", "--pseq", "zero", "--formula-name", "psi0", "--n", "2..3", "--samples", "5", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("seed: Some(11)") && err.contains("samples: Some(5)"), "{err}");
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fmtlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fmtlab(&["bounds", "--bogus"]).status.code(), Some(2));
    // randomized commands refuse to pick a seed
    let o = fmtlab(&["estimate", "--pseq", "zero", "--formula-name", "psi0", "--n", "3", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fmtlab(&["sample", "--pseq", "geometric:0.5,1.5", "--n", "3", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn sample_writes_a_structure_file() {
    let out = scratch("sampled.json", "");
    let o = fmtlab(&["sample", "--pseq", "geometric:1/2,1/2", "--n", "7", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let m = fmtlab::Structure::from_json(&text).unwrap();
    assert_eq!(m.size(), 7);
    let o = fmtlab(&["check", "--structure", out.to_str().unwrap(), "--formula-name", "psi0"]);
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn compose_agrees_with_direct() {
    let g = scratch("c.json", GRAPH);
    let g = g.to_str().unwrap();
    let o = fmtlab(&["compose", "--structure", g, "--structure", g, "--structure", g, "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let digests: Vec<&str> = text.lines().take(2).map(|l| l.split_whitespace().last().unwrap()).collect();
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn theory_kinds() {
    let g = scratch("t.json", GRAPH);
    let g = g.to_str().unwrap();
    for kind in ["th", "bth", "uth"] {
        let o = fmtlab(&["theory", "--structure", g, "--tuple", "0", "--depth", "1", "--kind", kind]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        assert!(stdout(&o).starts_with('['), "{kind}");
    }
    assert_eq!(fmtlab(&["theory", "--structure", g, "--tuple", "9"]).status.code(), Some(2));
}

#[test]
fn exact_coupling_passes() {
    let o = fmtlab(&["coupling", "--pseq", "finite:1/2", "--n", "11", "--cutpoints", "0,3,6,9,10", "--stride", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("passed=true"));
}

#[test]
fn config_supplies_defaults() {
    let cfg = scratch("exp.json", r#"{"pseq": "geometric:0.5,0.5", "formula_name": "has_edge", "n": "4..5", "samples": 200, "seed": 9}"#);
    let o = fmtlab(&["--config", cfg.to_str().unwrap(), "estimate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
    let bad = scratch("bad.json", r#"{"colour": "blue"}"#);
    assert_eq!(fmtlab(&["--config", bad.to_str().unwrap(), "estimate"]).status.code(), Some(2));
}

#[test]
fn verify_single_suite() {
    let o = fmtlab(&["verify", "--only", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS]"));
}
