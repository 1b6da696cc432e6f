use std::process::{Command, Output};

use serde_json::Value;

fn qhopf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhopf")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = qhopf(args);
    let code = out.status.code().expect("exit code");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

#[test]
fn build_ansq_dumps_eight_labels() {
    let (code, r) = report(&["build", "ansq", "--n", "2", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["result"]["object"]["basis"].as_array().unwrap().len(), 8);
    assert_eq!(r["tool"], "qhopf");
}

#[test]
fn build_qusl2_dumps_sixty_four_labels() {
    let (code, r) = report(&["build", "qusl2", "--n", "2", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["object"]["basis"].as_array().unwrap().len(), 64);
}

#[test]
fn build_mnsq_and_double() {
    assert_eq!(report(&["build", "mnsq", "--n", "3", "--s", "1"]).0, 0);
    let (code, r) = report(&["build", "double", "--n", "2", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["object"]["dim"], 64);
}

#[test]
fn non_divisor_exits_two() {
    assert_eq!(qhopf(&["build", "ansq", "--n", "4", "--s", "3"]).status.code(), Some(2));
    assert_eq!(qhopf(&["verify", "--target", "axioms", "--n", "4", "--s", "3"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qhopf(&["verify", "--target", "nonsense", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qhopf(&["twist", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qhopf(&["cohomology", "--mode", "restrict", "--n", "3", "--s", "1"]).status.code(), Some(2));
    assert_eq!(qhopf(&["cohomology", "--mode", "class"]).status.code(), Some(2));
    assert_eq!(qhopf(&["build", "double", "--n", "4", "--s", "1"]).status.code(), Some(2));
}

#[test]
fn verify_targets_pass() {
    for (target, n, s) in [
        ("thm31", "2", "1"),
        ("lemma33", "3", "1"),
        ("prop34", "2", "1"),
        ("prop35", "2", "1"),
        ("duality", "2", "1"),
        ("majid", "2", "1"),
        ("axioms", "2", "1"),
    ] {
        let (code, r) = report(&["verify", "--target", target, "--n", n, "--s", s]);
        assert_eq!(code, 0, "{target}: {r}");
        assert_eq!(r["status"], "pass");
        assert!(!r["checks"].as_array().unwrap().is_empty());
    }
}

#[test]
fn large_axioms_are_downgraded() {
    let (code, r) = report(&["verify", "--target", "axioms", "--n", "4", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["downgraded"], true);
}

#[test]
fn cohomology_modes() {
    let (code, r) = report(&["cohomology", "--mode", "class", "--m", "5", "--a", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["class"], 3);
    let (code, r) = report(&["cohomology", "--mode", "restrict", "--n", "2", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["decision"]["coboundary"], false);
    assert!(r["result"]["decision"]["certificate"]["row"].as_array().is_some());
    let (code, r) = report(&["cohomology", "--mode", "coboundary", "--m", "4", "--a", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["coboundary"], true);
    let (code, r) = report(&["cohomology", "--mode", "coboundary", "--m", "4", "--a", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["coboundary"], false);
}

#[test]
fn twist_at_three() {
    let (code, r) = report(&["twist", "--n", "3"]);
    assert_eq!(code, 0, "{r}");
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"Φ_{J^{−1}} = 1⊗1⊗1"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--target", "axioms", "--n", "3", "--s", "1", "--seed", "42", "--max-dim", "100"];
    let a = qhopf(&args);
    let b = qhopf(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qhopf-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = qhopf(&["cohomology", "--mode", "class", "--m", "3", "--a", "1", "--out", path.to_str().unwrap(), "--jobs", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["result"]["class"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
