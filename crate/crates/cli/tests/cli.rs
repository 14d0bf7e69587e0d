use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use qcr_core::enumerate::brute_force;
use qcr_core::generate::random_qubo;
use qcr_core::io::{parse_triplet, write_triplet};
use qcr_core::{trivial_shift, LmiSystem};

const TOY: &str = "2 3\n1 1 1\n2 2 -1\n1 2 2\n";
const TRIANGLE: &str = "3 3\n1 2 1\n2 3 1\n1 3 1\n";
const KEYS: [&str; 9] = ["status", "best_value", "best_x", "bound", "rel_gap_percent", "nodes", "wall_time_s", "seed", "params"];

fn file(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn qcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcr")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = qcr(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn has_schema(v: &Value) {
    let obj = v.as_object().unwrap();
    for key in KEYS.iter().chain(&["u_hat", "iterations", "termination"]) {
        assert!(obj.contains_key(*key), "missing {key} in {v}");
    }
}

#[test]
fn brute_on_toy() {
    let path = file("toy_brute.txt", TOY);
    let v = json(&["brute", path.to_str().unwrap()]);
    has_schema(&v);
    assert_eq!(v["best_value"], 2.0);
    assert_eq!(v["best_x"], serde_json::json!([1, 1]));
    assert!(v["nodes"].is_null() && v["u_hat"].is_null());
}

#[test]
fn bound_with_zero_iterations_is_the_start_bound() {
    let path = file("toy_bound.txt", TOY);
    let v = json(&["bound", path.to_str().unwrap(), "-N", "0"]);
    has_schema(&v);
    assert_eq!(v["termination"], "IterLimit");
    assert_eq!(v["iterations"], 0);

    let p = parse_triplet(TOY).unwrap();
    let sys = LmiSystem::new(p.clone());
    let start = sys.initial_feasible_point(&trivial_shift(&p, 0).unwrap()).unwrap();
    let want = sys.cache(start).unwrap().bound().unwrap();
    assert!((v["bound"].as_f64().unwrap() - want).abs() <= 1e-12 * (1.0 + want.abs()));
    assert!(want >= 2.0);
}

#[test]
fn bound_defaults_and_trace() {
    let path = file("toy_trace.txt", TOY);
    let out = qcr(&["bound", path.to_str().unwrap(), "-v"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["iters"], 50000);
    assert_eq!(v["params"]["k1"], 5);
    assert_eq!(v["params"]["k2"], 2);
    assert!(v["bound"].as_f64().unwrap() >= 2.0 - 1e-6);
    let lines: Vec<Value> = String::from_utf8(out.stderr)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len() as u64, v["iterations"].as_u64().unwrap() + 1);
    assert!(lines.iter().all(|l| l.get("bound").is_some()));
}

#[test]
fn solve_maxcut_triangle() {
    let path = file("triangle.txt", TRIANGLE);
    let v = json(&["solve", path.to_str().unwrap(), "--format", "maxcut"]);
    has_schema(&v);
    assert_eq!(v["status"], "Optimal");
    assert_eq!(v["best_value"], 2.0);
    assert_eq!(v["rel_gap_percent"], 0.0);
    assert_eq!(v["params"]["iters"], 5);
    assert_eq!(v["params"]["time_limit_s"], 3600.0);
}

#[test]
fn solve_matches_brute() {
    for seed in 0..6 {
        let p = random_qubo(6 + 2 * seed as usize, 0.6, true, 40 + seed);
        let path = file(&format!("rand{seed}.txt"), &write_triplet(&p).unwrap());
        let path = path.to_str().unwrap();
        let solved = json(&["solve", path, "--seed", "5"]);
        let brute = json(&["brute", path]);
        assert_eq!(solved["best_value"], brute["best_value"]);
        assert_eq!(brute["best_value"].as_f64().unwrap(), brute_force(&p).unwrap().0);
    }
}

#[test]
fn injected_primal_without_improvement() {
    let path = file("toy_primal.txt", TOY);
    let v = json(&["solve", path.to_str().unwrap(), "--primal", "2"]);
    assert_eq!(v["status"], "Optimal");
    assert_eq!(v["best_value"], 2.0);
    assert!(v["best_x"].is_null());
    assert_eq!(v["params"]["primal"], 2.0);
}

#[test]
fn progress_log_and_json_out() {
    let p = random_qubo(12, 0.8, true, 9);
    let path = file("progress.txt", &write_triplet(&p).unwrap());
    let out_path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("progress.json");
    let out = qcr(&["solve", path.to_str().unwrap(), "-vv", "--json-out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let records: Vec<Value> = stderr.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r.get("nodes").is_some() && r.get("gap").is_some()));
    let written = std::fs::read(&out_path).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn node_limit_is_a_success() {
    let p = random_qubo(22, 1.0, true, 3);
    let path = file("limit.txt", &write_triplet(&p).unwrap());
    let v = json(&["solve", path.to_str().unwrap(), "--node-limit", "2", "--no-warmstart"]);
    assert_eq!(v["status"], "NodeLimit");
    assert_eq!(v["nodes"], 2);
    assert!(v["rel_gap_percent"].as_f64().unwrap() >= 0.0);
}

#[test]
fn convert_maxcut_to_triplet() {
    let path = file("convert.txt", TRIANGLE);
    let out = qcr(&["convert", path.to_str().unwrap()]);
    assert!(out.status.success());
    let p = parse_triplet(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(brute_force(&p).unwrap().0, 2.0);
    assert_eq!(p.c()[0], 2.0);
}

#[test]
fn input_errors_exit_with_status_2() {
    let bad = file("bad.txt", "2 1\n1 3 1\n");
    let out = qcr(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = qcr(&["brute", "/nonexistent/instance.txt"]);
    assert_eq!(out.status.code(), Some(2));

    let big = file("big.txt", "26 0\n");
    let out = qcr(&["brute", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = qcr(&["solve", bad.to_str().unwrap(), "--time-limit", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcr(&["solve", bad.to_str().unwrap(), "--k1", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
