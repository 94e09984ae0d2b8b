use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn problems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn problem(name: &str) -> String {
    problems().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatode"))
        .args(args)
        .env_remove("QUATODE_TOL_CLUSTER")
        .env_remove("QUATODE_TOL_RANK")
        .output()
        .expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_quatode"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn quaternion(v: &Value) -> [f64; 4] {
    ["q0", "q1", "q2", "q3"].map(|k| v[k].as_f64().unwrap())
}

#[test]
fn solve_nilpotent_problem_matches_closed_form() {
    let out = run(&["solve", &problem("nilpotent.json"), "--eval", "0.5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let got = quaternion(&v["evaluations"][0]["value"]);
    let r = std::f64::consts::SQRT_2 * 0.5;
    // k·x + ((j − i)/2)·cosh(√2x) + ((i + j)/2)·cos(√2x)
    let expected = [0.0, -r.cosh() / 2.0 + r.cos() / 2.0, r.cosh() / 2.0 + r.cos() / 2.0, 0.5];
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() < 1e-12, "{got:?}");
    }
    assert_eq!(v["fitted_constants"].as_array().unwrap().len(), 8);
    assert!(v["comment"].as_array().unwrap().iter().any(|c| c.as_str().unwrap().contains("√2")));
}

#[test]
fn pretty_solution_uses_hyperbolic_and_polynomial_forms() {
    let out = run(&["solve", &problem("nilpotent.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("(-0.5i + 0.5j)·cosh(1.41421356237·x)"), "{text}");
    assert!(text.contains("(k)·x"), "{text}");
    assert!(text.contains("(0.5i + 0.5j)·cos(1.41421356237·x)"), "{text}");
    assert!(text.contains("1.41421356237 = √2"), "{text}");
}

#[test]
fn eval_at_initial_point_returns_initial_value() {
    let out = run(&["eval", "-e", "D^2 - L_i*R_j*D - L_j*R_i", "-i", "1+2i-3j+4k,k", "--x0", "0.25", "--at", "0.25", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let got = quaternion(&v["points"][0]["value"]);
    for (g, e) in got.iter().zip([1.0, 2.0, -3.0, 4.0]) {
        assert!((g - e).abs() < 1e-12, "{got:?}");
    }
    let out = run(&["solve", &problem("coupled.json"), "--eval", "0"]);
    assert!(stdout(&out).contains("φ(0) = j"), "{}", stdout(&out));
}

#[test]
fn eval_derivatives_and_grid() {
    let out = run(&["eval", "-e", "D - L_i", "-i", "1", "--grid", "0:1:3", "--derivatives"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().last().unwrap().starts_with("1\t0.540302305868 + 0.841470984808i"));
}

#[test]
fn translate_prints_the_matrix() {
    let out = run(&["translate", "L_i - 2*R_j - 3*L_i*R_k", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let expected = serde_json::json!([[0.0, -1.0, 5.0, 0.0], [1.0, 0.0, 0.0, 5.0], [1.0, 0.0, 0.0, -1.0], [0.0, 1.0, 1.0, 0.0]]);
    assert_eq!(v["matrix"], expected);
    assert_eq!(v["linearity"], "R_linear");
    let text = stdout(&run(&["translate", "L_i - 2*R_j - 3*L_i*R_k"]));
    assert!(text.contains("[  0  -1   5   0 ]"), "{text}");
}

#[test]
fn spectrum_of_complex_linear_problem() {
    let out = run(&["spectrum", &problem("complex_linear.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let real: Vec<(f64, u64)> = v["real"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["value"].as_f64().unwrap(), e["mult"].as_u64().unwrap()))
        .collect();
    assert_eq!(real.len(), 2);
    assert!((real[0].0 - 1.0).abs() < 1e-10 && real[0].1 == 2);
    assert!((real[1].0 + 1.0).abs() < 1e-10 && real[1].1 == 2);
    let pair = &v["complex"][0];
    assert!(pair["re"].as_f64().unwrap().abs() < 1e-10);
    assert!((pair["im"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(pair["mult"], 2);
    assert_eq!(v["nilpotent"], false);
}

#[test]
fn spectrum_without_initial_data() {
    let out = run(&["spectrum", "-e", "D^2 - (L_i*R_j + L_j*R_i)", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["nilpotent"], true);
    assert_eq!(v["dimension"], 8);
}

#[test]
fn verify_default_grid() {
    let out = run(&["verify", &problem("coupled.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["grid"].as_array().unwrap().len(), 11);
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_failure_is_numeric() {
    // A coarse step with an impossible threshold.
    let out = run(&["verify", &problem("coupled.json"), "--step", "0.01", "--threshold", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdin_problem() {
    let out = run_stdin(&["solve", "-", "--json"], r#"{"equation": "D - L_k", "initial": ["1"]}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["linearity"], "H_linear");
}

#[test]
fn malformed_json_exits_one_with_offset() {
    let src = "{\"equation\": \"D\", \"initial\": [\"1\"],}";
    let out = run_stdin(&["solve", "-", "--json"], src);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "syntax");
    let offset = err["error"]["offset"].as_u64().unwrap() as usize;
    assert_eq!(&src[offset..offset + 1], "}");
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_errors_exit_one() {
    let out = run(&["translate", "L_i + $", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["offset"], 6);

    assert_eq!(run(&["solve", "-e", "2*D^2 - L_i", "-i", "1,1"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "-e", "D^2 - L_i", "-i", "1"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "/nonexistent/problem.json"]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["solve", &problem("coupled.json"), "--tol", "bogus=1"]).status.code(), Some(1));
}

#[test]
fn numeric_failures_exit_two() {
    // Growth e^{800·10} overflows the oracle.
    let out = run(&["verify", "-e", "D - 800", "-i", "1", "--grid", "0:10:2", "--step", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    // Interval longer than the oracle accepts.
    let out = run(&["verify", "-e", "D - 1", "-i", "1", "--grid", "0:20:3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        vec!["solve", "PROBLEM", "--json", "--eval", "0.7"],
        vec!["spectrum", "PROBLEM", "--json"],
        vec!["verify", "PROBLEM", "--json"],
    ] {
        let path = problem("constrained.json");
        let args: Vec<&str> = args.iter().map(|a| if *a == "PROBLEM" { path.as_str() } else { a }).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn tolerance_overrides_from_environment_and_flags() {
    let base = json(&run(&["spectrum", &problem("nilpotent.json"), "--json"]));
    let out = Command::new(env!("CARGO_BIN_EXE_quatode"))
        .args(["spectrum", &problem("nilpotent.json"), "--json"])
        .env("QUATODE_TOL_CLUSTER", "1e-7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["real"], base["real"]);
    let out = Command::new(env!("CARGO_BIN_EXE_quatode"))
        .args(["spectrum", &problem("nilpotent.json")])
        .env("QUATODE_TOL_CLUSTER", "nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["solve", &problem("nilpotent.json"), "--tol", "cluster=1e-7"]).status.code(), Some(0));
}

#[test]
fn all_example_problems_solve() {
    for entry in std::fs::read_dir(problems()).unwrap() {
        let path = entry.unwrap().path();
        let out = run(&["verify", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["solve", "--help"]).status.code(), Some(0));
}
