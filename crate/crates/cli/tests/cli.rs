//! End-to-end tests of the `polariton` binary: exit codes, JSON error
//! reports, output layout and determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polariton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polariton")).args(args).output().expect("binary runs")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no JSON on stderr: {text}"));
    serde_json::from_str(line).expect("stderr carries a JSON error")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn quick_verification_succeeds() {
    let out = polariton(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("criterion,check,value,relation,bound,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
}

#[test]
fn malformed_medium_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "medium.json", r#"{"label": "bad", "resonances": [{"f": 1.0, "omega": 1.0, "gamma": -0.5}]}"#);
    let scenario = write(dir.path(), "scenario.json", r#"{"version": 1, "medium_file": "medium.json"}"#);
    let out = polariton(&["dispersion", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["status"], "error");
    assert_eq!(err["kind"], "validation");
    assert_eq!(err["field"], "resonances[0].gamma");
}

#[test]
fn unknown_medium_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "scenario.json",
        r#"{"version": 1, "medium": {"label": "m", "resonances": [{"f": 1.0, "omega": 1.0, "gamma": 0.1, "tau": 2}]}}"#,
    );
    let out = polariton(&["dispersion", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(1));
    let field = stderr_json(&out)["field"].as_str().unwrap().to_string();
    assert!(field.starts_with("medium.resonances[0]"), "{field}");
}

#[test]
fn unknown_scenario_field_and_wrong_version_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(dir.path(), "typo.json", r#"{"version": 1, "propagator": {"period": 3}}"#);
    let out = polariton(&["propagator", "--scenario", &typo]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["field"], "propagator.period");

    let old = write(dir.path(), "old.json", r#"{"version": 99}"#);
    let out = polariton(&["dispersion", "--scenario", &old]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["field"], "version");
}

#[test]
fn truncated_root_file_fails_the_sum_rules() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("disp");
    let out = polariton(&["dispersion", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let roots_path = out_dir.join("roots.json");
    let complete = std::fs::read_to_string(&roots_path).unwrap();
    let scenario =
        write(dir.path(), "scenario.json", r#"{"version": 1, "sumrules": {"roots_file": "disp/roots.json"}}"#);
    let out = polariton(&["sumrules", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut sets: Value = serde_json::from_str(&complete).unwrap();
    sets[1]["roots"].as_array_mut().unwrap().pop();
    std::fs::write(&roots_path, serde_json::to_string(&sets).unwrap()).unwrap();
    let out = polariton(&["sumrules", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["kind"], "numerical");
    assert_eq!(err["details"]["failing"].as_array().unwrap().len(), 1);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "scenario.json",
        r#"{"version": 1, "seed": 7, "dispersion": {"k": {"start": 0.1, "stop": 3.0, "count": 16}},
            "hopfield": {"omega_alpha": [0.5, 1.0, 2.0], "random_states": 20}}"#,
    );
    for cmd in ["dispersion", "hopfield"] {
        let a = polariton(&[cmd, "--scenario", &scenario, "--threads", "1"]);
        let b = polariton(&[cmd, "--scenario", &scenario, "--threads", "4"]);
        let c = polariton(&[cmd, "--scenario", &scenario]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert_eq!(a.stdout, c.stdout, "{cmd}");
    }
}

#[test]
fn csv_headers_match_the_documentation() {
    let header = |cmd: &str| {
        let out = polariton(&[cmd]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string()
    };
    assert_eq!(header("dispersion"), "k,Re_Omega,Im_Omega,Re_D,Im_D,family,m");
    assert_eq!(header("propagator"), "omega_alpha,tau,H_residue,H_numeric,U_residue,abs_err");
    assert_eq!(header("hopfield"), "omega_alpha,Omega_plus,Omega_minus");
    assert_eq!(header("evolve"), "t,energy,D_0,B_0");
    assert!(header("green").starts_with("omega,separation,Re_G_xx,Im_G_xx,Re_G_xy"));
}

#[test]
fn json_format_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("evolve");
    let out = polariton(&["evolve", "--format", "json", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("trajectory.json")).unwrap()).unwrap();
    assert_eq!(rows[0]["t"], 0.0);
    let energy: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("energy.json")).unwrap()).unwrap();
    assert!(energy["energy_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn strongly_damped_quasimode_request_is_a_validation_error() {
    let out = polariton(&["quasimode"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["field"], "quasimode");
}
