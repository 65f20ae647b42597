use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minktensor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const CUBE: &str = r#"{"dim":3,"vertices":[[0,0,0],[1,0,0],[0,1,0],[1,1,0],[0,0,1],[1,0,1],[0,1,1],[1,1,1]]}"#;
const SQUARE: &str = r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn tensor(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn max_coeff(v: &Value) -> f64 {
    v["coeffs"].as_object().unwrap().values().map(|c| c.as_f64().unwrap().abs()).fold(0.0, f64::max)
}

#[test]
fn cube_surface_area_term() {
    let dir = TempDir::new().unwrap();
    let cube = write(&dir, "cube.json", CUBE);
    let out = dir.path().join("t.json");
    let o = run(&["compute", "--input", &cube, "--functional", "Phi(2,0,0,0)", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = tensor(&out);
    assert_eq!(t["rank"], 0);
    assert!((t["coeffs"]["(0,0,0)"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rank 0 dim 3"));
}

#[test]
fn cube_edge_tensor_vanishes() {
    let dir = TempDir::new().unwrap();
    let cube = write(&dir, "cube.off", "OFF\n8 6 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n");
    let o = run(&["compute", "--input", &cube, "--functional", "PhiTilde3(0,0,0)"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t["rank"], 2);
    assert!(max_coeff(&t) < 1e-12);
}

#[test]
fn square_planar_tilde_vanishes() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "sq.json", SQUARE);
    let o = run(&["compute", "--input", &sq, "--functional", "PhiTilde2(1,0,1)"]);
    assert!(o.status.success());
    let t: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t["dim"], 2);
    assert!(max_coeff(&t) < 1e-12);
}

#[test]
fn output_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let cube = write(&dir, "cube.json", CUBE);
    let out = dir.path().join("t.json");
    let o = run(&[
        "compute",
        "--input",
        &cube,
        "--functional",
        r#"{"kind":"Phi","k":1,"r":1,"s":2,"j":0}"#,
        "--weight",
        "bump:h=0.5,tilt=0.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let t = minktensor::tensor::tensor_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    let again = serde_json::to_string_pretty(&minktensor::tensor::tensor_to_json(&t)).unwrap() + "\n";
    assert_eq!(text, again);
}

#[test]
fn region_from_file() {
    let dir = TempDir::new().unwrap();
    let cube = write(&dir, "cube.json", CUBE);
    let region = write(&dir, "r.json", r#"{"union":[{"box":{"lo":[-1,-1,-1],"hi":[2,2,2]}}]}"#);
    let full = run(&["compute", "--input", &cube, "--functional", "Phi(0,0,2,0)"]);
    let boxed = run(&["compute", "--input", &cube, "--functional", "Phi(0,0,2,0)", "--region", &region]);
    let a: Value = serde_json::from_slice(&full.stdout).unwrap();
    let b: Value = serde_json::from_slice(&boxed.stdout).unwrap();
    for (k, v) in a["coeffs"].as_object().unwrap() {
        assert!((v.as_f64().unwrap() - b["coeffs"][k].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn verify_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let r1 = dir.path().join("a.json");
    let r2 = dir.path().join("b.json");
    for (r, serial) in [(&r1, false), (&r2, true)] {
        let mut cmd = bin();
        cmd.args(["verify", "--suite", "covariance", "--seed", "42", "--cases", "6", "--report", r.to_str().unwrap()]);
        if serial {
            cmd.arg("--serial");
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stderr).contains("seed=0x2a"));
    }
    assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let cube = write(&dir, "cube.json", CUBE);
    let bad_json = write(&dir, "bad.json", "{\"dim\": 3, \"vertices\": [[0,0,0],\n  [1,0]");
    assert_eq!(run(&["compute", "--input", &cube, "--functional", "Nope(1)"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--input", &cube, "--functional", "PhiTilde2(1,0,0)"]).status.code(), Some(2));
    let o = run(&["compute", "--input", &bad_json, "--functional", "W1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["assumptions", "--h", "0.5", "--t", "0.9"]).status.code(), Some(2));
    assert_eq!(run(&["--serial", "assumptions", "--eps", "2"]).status.code(), Some(0));
}

#[test]
fn help_lists_grammar() {
    let o = run(&["--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for word in ["PhiTilde3(r,s,j)", "Q^m*", "bump:h=", "converge", "demo-noncovariance", "--serial"] {
        assert!(text.contains(word), "missing {word}");
    }
}

#[test]
fn converge_emits_csv() {
    let o = run(&["converge", "--functional", "PhiTilde3(0,0,1)", "--t", "0.2,0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,value_rotated,W1,D,difference,ratio"));
    let d: f64 = lines.next().unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(d.abs() > 0.1);
}

#[test]
fn demo_confirms_noncovariance() {
    let o = run(&["demo-noncovariance", "--t", "0.2,0.1,0.05"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("confirmed"));
}
