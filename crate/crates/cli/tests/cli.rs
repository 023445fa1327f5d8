//! End-to-end tests of the binary: exit-code contract on the canonical
//! fixtures, payload round-trips, determinism of seeded output.

use std::io::Write;
use std::process::{Command, Output, Stdio};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn run(args: &[&str], stdin: &str, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_second-chaos"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary starts");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn target_json() -> String {
    format!(r#"{{"kind":"classical","lambda":[{SQRT_HALF},{}]}}"#, -SQRT_HALF)
}

fn impostor_json() -> String {
    format!(r#"{{"kind":"classical","lambda":[{SQRT_HALF},{SQRT_HALF}]}}"#)
}

fn counterexample_json() -> String {
    let raw = [0.7624f64, 0.5370, -0.3610];
    let norm: f64 = raw.iter().map(|l| l * l).sum::<f64>().sqrt();
    format!(
        r#"{{"kind":"classical","lambda":[{},{},{}]}}"#,
        raw[0] / norm,
        raw[1] / norm,
        raw[2] / norm
    )
}

#[test]
fn exit_code_contract_on_canonical_fixtures() {
    let out = run(&["check", "--strict"], &target_json(), &[]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let out = run(&["check", "--strict"], &impostor_json(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"characterization\""));
    assert!(text.contains("violated"));

    let out = run(&["check", "--strict"], &counterexample_json(), &[]);
    assert_eq!(out.status.code(), Some(2));

    // without --strict a violation still exits 0
    let out = run(&["check"], &impostor_json(), &[]);
    assert_eq!(out.status.code(), Some(0));

    // CSV view: stable header, one row per report in request order
    let out = run(&["check", "--format", "csv"], &target_json(), &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,lhs,rhs,gap,verdict,tolerance"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("characterization,"));
    assert!(first.ends_with(",equality,0.000000001"), "{first}");
}

#[test]
fn invalid_payloads_exit_one() {
    let out = run(&["cumulants"], "not json", &[]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["gue", "--order", "3"], r#"{"kind":"free","lambda":[1.0]}"#, &[]);
    assert_eq!(out.status.code(), Some(1));

    // free input cannot be sampled classically
    let out = run(
        &["simulate", "--samples", "10"],
        r#"{"kind":"free","lambda":[1.0]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimizer_reproduces_the_counterexample() {
    let problem = r#"{
        "kind": "classical",
        "k": 3,
        "objective": "minimize_mu4",
        "constraints": [
            {"order": 2, "value": 1.0},
            {"order": 6, "value": 225.0}
        ],
        "sign_pattern": ["+", "+", "-"],
        "restarts": 16
    }"#;
    let out = run(&["optimize"], problem, &[]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let objective = value["objective_value"].as_f64().unwrap();
    assert!((objective - 8.2567).abs() < 1e-3, "{objective}");
    assert_eq!(value["converged"], serde_json::Value::Bool(true));

    // emitted coefficient payloads are accepted back by consuming commands
    let out = run(&["cumulants", "--max-order", "6"], &text, &[]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // an unreachable constraint reports non-convergence via exit 3
    let infeasible = r#"{
        "kind": "classical",
        "k": 2,
        "constraints": [
            {"order": 2, "value": 1.0},
            {"order": 4, "value": 100.0}
        ],
        "restarts": 2
    }"#;
    let out = run(&["optimize"], infeasible, &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn transform_pipeline_round_trips() {
    let out = run(&["moments", "--max-order", "6"], &target_json(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let moments = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&moments).unwrap();
    assert!((value["values"][5].as_f64().unwrap() - 225.0).abs() < 1e-9);

    let out = run(&["invert", "--max-order", "6"], &moments, &[]);
    assert_eq!(out.status.code(), Some(0));
    let cumulants: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!((cumulants["values"][3].as_f64().unwrap() - 6.0).abs() < 1e-9);

    // the two conversion routes agree through the CLI as well
    let enum_out = run(
        &["moments", "--max-order", "6", "--path", "enum"],
        &target_json(),
        &[],
    );
    let enum_value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(enum_out.stdout).unwrap()).unwrap();
    assert!(
        (enum_value["values"][5].as_f64().unwrap() - value["values"][5].as_f64().unwrap()).abs()
            < 1e-9
    );
}

#[test]
fn enumeration_cap_env_override() {
    let out = run(
        &["moments", "--max-order", "6", "--path", "enum"],
        &target_json(),
        &[("SECOND_CHAOS_ENUM_CAP", "4")],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cap 4"), "{err}");
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let a = run(&["simulate", "--samples", "64", "--seed", "7"], &target_json(), &[]);
    let b = run(&["simulate", "--samples", "64", "--seed", "7"], &target_json(), &[]);
    assert_eq!(a.stdout, b.stdout);
    let header = String::from_utf8_lossy(&a.stdout);
    assert!(header.starts_with("# seed=7 count=64 kind=classical"));
    let c = run(&["simulate", "--samples", "64", "--seed", "8"], &target_json(), &[]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn w2gap_reports_bracket_and_root() {
    let out = run(&["w2gap"], &impostor_json(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!((value["bracket"].as_f64().unwrap() - 40.0).abs() < 1e-9);
    assert!((value["root"].as_f64().unwrap() - 40f64.sqrt()).abs() < 1e-9);

    let out = run(&["w2gap", "--order", "8"], &impostor_json(), &[]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["w2gap", "--order", "4"], &impostor_json(), &[]);
    assert_eq!(out.status.code(), Some(1));
}
