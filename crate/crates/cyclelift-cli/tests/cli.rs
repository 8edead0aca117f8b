use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclelift"))
        .args(args)
        .env_remove("CYCLELIFT_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "rho", "--delta", "-2", "--max", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checked"], 5000);

    let out = run(&["verify", "main-identity", "--delta", "-2", "--db", "35", "--mmax", "300"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mismatches"].as_array().unwrap().len(), 0);

    let out = run(&["verify", "main-identity", "--delta", "-2", "--db", "33"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not inert"));

    let out = run(&["verify", "rho"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_csv_and_determinism() {
    let args = ["verify", "remark-identity", "--delta", "-2", "--db", "35", "--mmax", "60"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = run(&["verify", "hilbert", "--delta", "-2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("kind,checked,mismatches,status"));
    assert!(text.lines().nth(1).unwrap().ends_with(",0,pass"));
}

#[test]
fn cycle_examples() {
    let out = run(&["cycle", "--p", "5", "--delta", "-2", "--sign", "minus", "--b", "0+1d,1+0d"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["vertical"].as_array().unwrap().is_empty());
    assert_eq!(v["horizontal"][0]["count"], 1);

    let v = json(&run(&["cycle", "--p", "5", "--delta", "-2", "--b", "0+5d,5+0d"]));
    let vertical = v["vertical"].as_array().unwrap();
    assert_eq!(vertical.len(), 7);
    assert!(vertical.iter().all(|e| e["mult"] == 1));

    let v = json(&run(&[
        "cycle", "--p", "5", "--delta", "-2", "--b", "0+1d,1+0d", "--ortho", "--alpha", "2",
    ]));
    let vertical = v["vertical"].as_array().unwrap();
    for e in vertical {
        let depth = e["vertex"].as_str().unwrap().split('.').filter(|s| !s.is_empty()).count() as u64;
        assert_eq!(e["mult"], 2 - depth);
    }
    assert_eq!(vertical.len(), 7);
    assert_eq!(v["horizontal"][0]["count"], 2);
}

#[test]
fn cycle_errors() {
    let out = run(&["cycle", "--p", "5", "--delta", "-2", "--b", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_cyclelift"))
        .args(["cycle", "--p", "5", "--delta", "-2", "--b", "0+625d,625+0d"])
        .env("CYCLELIFT_PRECISION", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lift_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "qt.json", r#"{"max_exponent": 200, "coeffs": [{"n": 2, "c": "1"}]}"#);
    let output = dir.path().join("out.json");
    let out = run(&[
        "lift", "--level", "35", "--t", "2", "--input", &input, "--output", output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["constant"], "exact");
    let coeffs = v["coeffs"].as_array().unwrap();
    assert_eq!(coeffs[0]["n"], 2);
    assert!(coeffs.iter().any(|c| c["n"] == 6 && c["c"] == "1"));
    assert!(coeffs.iter().all(|c| c["n"].as_u64().unwrap() % 2 == 0));

    let empty = write(dir.path(), "empty.json", r#"{"max_exponent": 50, "coeffs": []}"#);
    let v = json(&run(&["lift", "--level", "35", "--t", "2", "--input", &empty]));
    assert!(v["coeffs"].as_array().unwrap().is_empty());

    let out = run(&["lift", "--level", "35", "--t", "2", "--input", &input, "--mmax", "40"]);
    assert_eq!(out.status.code(), Some(4));

    let bad = write(dir.path(), "bad.json", "{not json");
    let out = run(&["lift", "--level", "35", "--t", "2", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lift_symbolic_series() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "sym.json",
        r#"{"max_exponent": 8, "coeffs": [{"n": 0, "c": [{"sym": "K", "w": "-1"}]}, {"n": 2, "c": [{"sym": "Zo(2)", "w": "1"}]}, {"n": 8, "c": [{"sym": "Zo(8)", "w": "1/2"}]}]}"#,
    );
    let v = json(&run(&["lift", "--level", "35", "--t", "2", "--input", &input]));
    assert_eq!(v["coeffs"][0]["c"][0]["sym"], "K");
    assert_eq!(v["coeffs"][0]["c"][0]["w"], "-2");
    let out = run(&["lift", "--level", "35", "--t", "2", "--input", &input, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("4,1/2*Zo(8)"));
}
