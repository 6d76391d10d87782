use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let out = spinlab(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn algebra_command() {
    let (code, v) = json(&["algebra", "(0,0,12,13)", "--check"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["jacobi"], true);
    assert_eq!(v["nilpotent_frame"], true);
    assert_eq!(json(&["algebra", "(0,0,0,0)"]).1["abelian"], true);

    let out = spinlab(&["algebra", "(0,0,12,+)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position"));
    assert_eq!(spinlab(&["algebra", "(0,0,0,12,34)", "--check"]).status.code(), Some(1));
    assert_eq!(spinlab(&["algebra", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(spinlab(&["algebra"]).status.code(), Some(2));
}

#[test]
fn file_input() {
    let p = write_tmp(
        "n56.alg",
        "# harmonic example\ndim 5\norientation +1\nparam mu = 1\nd e5 = mu*e12 - mu*e34\n",
    );
    let (code, v) = json(&["dirac", p.to_str().unwrap(), "--kernel"]);
    assert_eq!(code, 0);
    assert_eq!(v["kernel_dim"], 4);
    assert_eq!(v["kernel_basis"].as_array().unwrap().len(), 4);
    let (_, v) = json(&["dirac", p.to_str().unwrap(), "--param", "mu=2"]);
    assert_eq!(v["kernel_dim"], 4);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 8);
}

#[test]
fn dirac_command() {
    let (code, v) = json(&["dirac", "(0,0,0,0,12-34)", "--spectrum"]);
    assert_eq!(code, 0);
    assert_eq!(v["kernel_dim"], 4);
    let spec: Vec<f64> = v["spectrum"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // 4D has eigenvalues -+ sqrt(mu +- |v|) with mu = 2, |v| = 2
    let expect = [-2.0, -2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0];
    for (a, b) in spec.iter().zip(expect) {
        assert!((a - b).abs() < 1e-10);
    }
    let (code, v) = json(&["dirac", "(0,0,0,12)", "--expect-kernel"]);
    assert_eq!((code, v["kernel_dim"].as_u64()), (1, Some(0)));
    assert_eq!(json(&["dirac", "(0,0,0,0,0,0)"]).1["kernel_dim"], 8);
    let (_, v) = json(&["dirac", "--family", "L4", "--param", "mu12=1", "--param", "l12=2", "--param", "mu13=0.5", "--squared", "--spectrum"]);
    for x in v["spectrum"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 5.25).abs() < 1e-10);
    }
}

#[test]
fn invariants_command() {
    let (_, v) = json(&["invariants", "--family", "N5,5", "--param", "mu12=1", "--param", "mu13=0.5"]);
    assert!((v["mu"].as_f64().unwrap() - 1.25).abs() < 1e-12);
    assert!((v["v"][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    let (code, v) = json(&["invariants", "(0,0,0,0,12,34)"]);
    assert_eq!(code, 0);
    assert!(v["gamma"].is_object());
    assert_eq!(spinlab(&["invariants", "(0,0,12)"]).status.code(), Some(2));
}

#[test]
fn structure_command() {
    let (code, v) = json(&["structure", "(0,0,0,0,12-34)", "--su2", "--torsion", "--hypo"]);
    assert_eq!(code, 0);
    assert_eq!(v["hypo"], true);
    assert!((v["alpha_abs"][4].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(v["torsion"]["nonzero"].as_array().unwrap().iter().any(|s| s == "tau2^4"));
    let (code, v) = json(&["structure", "(0,0,0,0,12,13+24)", "--su3"]);
    assert_eq!(code, 0);
    assert!(v["theta_plus"].is_object());
    assert_eq!(spinlab(&["structure", "(0,0,0,0,12-34)", "--vector", "1,1,0,0,0,0,0,0"]).status.code(), Some(2));
    assert_eq!(spinlab(&["structure", "(0,0,0,0,12-34)", "--spinor", "5"]).status.code(), Some(2));
}

#[test]
fn lift_command() {
    let (code, v) = json(&["lift", "(0,0,0,0,12-34)", "--torus", "3", "--check-balanced"]);
    assert_eq!(code, 0);
    assert_eq!(v["balanced"], true);
    assert!(v["tau1_norm"].as_f64().unwrap() <= 1e-8);
    assert!((v["omega_squared"].as_f64().unwrap() - 14.0).abs() < 1e-10);
    assert_eq!(json(&["lift", "(0,0,0,0,0)"]).1["parallel"], true);
    let (code, v) = json(&["lift", "(0,0,0,0,12+2*34)", "--check-balanced"]);
    assert_eq!(code, 1);
    assert_eq!(v["balanced"], false);
    assert!(v["tau1_norm"].as_f64().unwrap() > 1e-3);
}

#[test]
fn scan_command() {
    let (code, v) = json(&["scan", "--family", "N5,5", "--range", "mu12=-2:2:9", "--param", "mu13=1"]);
    assert_eq!(code, 0);
    assert_eq!(v["points"], 9);
    let hits: Vec<f64> = v["hits"].as_array().unwrap().iter().map(|h| h["binding"]["mu12"].as_f64().unwrap()).collect();
    assert_eq!(hits, vec![-1.0, 1.0]);
    assert_eq!(spinlab(&["scan", "--family", "N5,5", "--range", "mu12=-2:2"]).status.code(), Some(2));
    assert_eq!(spinlab(&["scan", "--family", "nope", "--range", "x=0:1:2"]).status.code(), Some(2));
}

#[test]
fn verify_paper_command() {
    let a = spinlab(&["--json", "verify-paper", "--seed", "0"]);
    let b = spinlab(&["--json", "verify-paper", "--seed", "0"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert!(v["elapsed_ms"].is_null());

    let (code, v) = json(&["verify-paper", "--claim", "dim5/harmonic/N5,3", "--timing"]);
    assert_eq!(code, 0);
    assert_eq!(v["claims"].as_array().unwrap().len(), 1);
    assert_eq!(v["claims"][0]["status"], "pass");
    assert!(v["elapsed_ms"].is_u64());
    assert_eq!(spinlab(&["verify-paper", "--claim", "nope"]).status.code(), Some(2));

    let human = String::from_utf8(spinlab(&["verify-paper", "--claim", "reps/clifford"]).stdout).unwrap();
    assert!(human.starts_with("PASS reps/clifford"));
}

#[test]
fn thread_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_spinlab"))
        .args(["verify-paper", "--claim", "dim5/scan/N5,6"])
        .env("SPINLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_spinlab"))
        .args(["verify-paper", "--claim", "dim5/scan/N5,6"])
        .env("SPINLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
