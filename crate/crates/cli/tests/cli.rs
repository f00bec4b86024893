use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prec-sched"))
}

fn write(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const EXAMPLE: &str = r#"{"jobs": [{"p": 1, "r": 1, "w": 10}, {"p": 10, "r": 0, "w": 0}]}"#;

#[test]
fn two_job_example_costs() {
    let path = write("example.json", EXAMPLE);
    let p = path.to_str().unwrap();
    let lpls = run(&["lpls", p]);
    assert!(lpls.status.success());
    assert_eq!(json(&lpls)["schedule"]["cost"], "110");
    let exact = run(&["exact", p]);
    assert_eq!(json(&exact)["opt"], "20");
    let strict = run(&["lpls", p, "--ls-variant", "strict"]);
    assert_eq!(json(&strict)["schedule"]["cost"], "20");
}

#[test]
fn generated_example_matches_file() {
    let out = run(&["gen", "--family", "paper_example(10)"]);
    assert!(out.status.success());
    let expected: Value = serde_json::from_str(r#"{"jobs": [{"p": 1, "r": 1, "w": 10}, {"p": 10, "r": 0, "w": 0}], "prec": []}"#).unwrap();
    assert_eq!(json(&out), expected);
}

#[test]
fn solve_reports_intervals() {
    let path = write("solve.json", EXAMPLE);
    let out = run(&["solve", path.to_str().unwrap(), "--epsilon", "1", "--derandomize"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["t"].as_array().is_some_and(|t| !t.is_empty()));
    let jobs: usize = v["intervals"].as_array().unwrap().iter().map(|i| i["jobs"].as_array().unwrap().len()).sum();
    assert_eq!(jobs, 2);
    let cost: f64 = v["schedule"]["cost"].as_str().unwrap().parse().unwrap();
    assert!(cost <= 160.0);
    let seeded = run(&["solve", path.to_str().unwrap(), "--seed", "7"]);
    assert!(seeded.status.success());
}

#[test]
fn bounded_reports_guesses() {
    let path = write("bounded.json", r#"{"jobs": [{"p": 8, "r": 2, "w": 1}, {"p": 3, "r": 6, "w": 1}]}"#);
    let out = run(&["bounded", path.to_str().unwrap(), "--L", "2", "--beta", "20", "--epsilon", "1/2", "--mode", "exhaustive"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["guesses_tried"].as_u64().unwrap() >= 2);
    assert!(v["best_guess"]["early"].is_array());
    let typed = run(&["bounded", path.to_str().unwrap(), "--L", "2", "--beta", "20", "--mode", "typed"]);
    assert!(typed.status.success());
}

#[test]
fn exit_codes() {
    let cyclic = write("cycle.json", r#"{"jobs": [{"p": 1, "r": 0, "w": 1}, {"p": 1, "r": 0, "w": 1}], "prec": [[0, 1], [1, 0]]}"#);
    let out = run(&["validate", cyclic.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["valid"], false);
    assert_eq!(run(&["lp", cyclic.to_str().unwrap()]).status.code(), Some(2));

    let ok = write("ok.json", EXAMPLE);
    assert_eq!(run(&["solve", ok.to_str().unwrap(), "--epsilon", "4"]).status.code(), Some(1));
    assert_eq!(run(&["solve", ok.to_str().unwrap(), "--epsilon", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["exact", "/nonexistent/file.json"]).status.code(), Some(1));
    let broken = write("broken.json", "{not json");
    assert_eq!(run(&["exact", broken.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bench_zero_trials_is_empty() {
    let out = run(&["bench", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["records"].as_array().unwrap().is_empty());
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn bench_small_grid_certifies() {
    let out = bin()
        .args(["bench", "--families", "p_le_r,uniform", "--n-max", "4", "--trials", "2"])
        .env("PREC_SCHED_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["records"].as_array().unwrap().len(), 16);
}

#[test]
fn table_output() {
    let path = write("table.json", EXAMPLE);
    let out = run(&["exact", path.to_str().unwrap(), "--output", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("opt") && l.trim_end().ends_with("20")));
}
