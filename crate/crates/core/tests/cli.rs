//! Runs the binary on small inputs and checks output, exit codes and
//! structured errors.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sln-skein"))
}

fn manifold(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sln-skein-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn torus() -> String {
    manifold("torus.txt", "{n: 2, generators: 1, markings: 1}").display().to_string()
}

#[test]
fn normalize_knot_and_arc() {
    let t = torus();
    let o = run(&["normalize", "--manifold", &t, "--web", "knot(w=g1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "g1[1][1] + g1[2][2]\n");

    let f = manifold("free2.txt", "{n: 2, generators: 2, markings: 2}").display().to_string();
    let o = run(&["normalize", "--manifold", &f, "--web", "arc(e0->e1; w=g1*g2; s=(1,2))"]);
    assert_eq!(
        stdout(&o),
        "-g1[1][1]*g2[1][2]*c1[2][1] - g1[1][2]*g2[2][2]*c1[2][1] - g1[2][1]*g2[1][2]*c1[2][2] - g1[2][2]*g2[2][2]*c1[2][2]\n"
    );
}

#[test]
fn parse_error_has_location() {
    let t = torus();
    let o = run(&["normalize", "--manifold", &t, "--web", "knot(w=g1) x"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 1, column 12"), "{err}");

    let o = run(&["normalize", "--manifold", &t, "--web", "knot(w=g1) x", "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["line"], 1);
    assert_eq!(v["error"]["column"], 12);
}

#[test]
fn budget_is_a_resource_error() {
    let o = run(&["nilpotent", "--poly", "x*y", "--ideal", "x^2*y", "--budget", "1", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "budget");
    assert_eq!(v["error"]["reductions"], 1);
    assert!(v["error"]["partial_basis"].as_array().is_some_and(|b| !b.is_empty()));
}

#[test]
fn nilpotent_verdicts() {
    let t = torus();
    let z2 = manifold("z2.txt", "{n: 2, generators: 1, markings: 1, relators: [\"g1*g1\"]}").display().to_string();
    assert_eq!(stdout(&run(&["nilpotent", "--poly", "x", "--ideal", "x^2"])), "true\n");
    assert_eq!(stdout(&run(&["nilpotent", "--poly", "x + 1", "--ideal", "x^2"])), "false\n");
    assert_eq!(stdout(&run(&["nilpotent", "--manifold", &t, "--poly", "g1[1][2]"])), "false\n");
    assert_eq!(stdout(&run(&["nilpotent", "--manifold", &z2, "--poly", "g1[1][2]"])), "true\n");
}

#[test]
fn eval_on_constrained_manifold() {
    // g1^2 = 1 in SL_2 forces g1 = ±I, so the trace is ±2 at every sample
    let z2 = manifold("z2e.txt", "{n: 2, generators: 1, markings: 1, relators: [\"g1*g1\"]}").display().to_string();
    let o = run(&["eval", "--manifold", &z2, "--web", "knot(w=g1)", "--trials", "3", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    for x in values {
        assert!((x["re"].as_f64().unwrap().abs() - 2.0).abs() < 1e-9);
        assert!(x["im"].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn check_and_split_pass() {
    let t = torus();
    let o = run(&["check", "--manifold", &t, "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("result: PASS\n"));

    let f = manifold("free2s.txt", "{n: 2, generators: 2, markings: 2}").display().to_string();
    let o = run(&["split", "--manifold", &f, "--web", "knot(w=g1*g2)", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("cut: {n: 2, generators: 1, markings: 4}\n"), "{out}");
    assert!(out.contains("component 1: 2 term(s)\n"));
    assert!(out.ends_with("result: PASS\n"));
}

#[test]
fn missing_manifold_is_input_error() {
    let o = run(&["normalize", "--web", "knot(w=g1)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["normalize", "--manifold", "/nonexistent/m.txt", "--web", "knot(w=g1)"]);
    assert_eq!(o.status.code(), Some(2));
}
