//! The binary end to end: exit codes, data directory, report stability.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn nullcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullcert"))
        .args(args)
        .env("NULLCERT_DATA_DIR", data_dir())
        .output()
        .expect("binary runs")
}

fn nullcert_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullcert"))
        .args(args)
        .env("NULLCERT_DATA_DIR", dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&nullcert(&["certify", "--family", "nope", "--lambda", "3,2"])), 2);
    assert_eq!(code(&nullcert(&["certify", "--family", "dihedral"])), 2);
    assert_eq!(code(&nullcert(&["frobnicate"])), 2);
    assert_eq!(code(&nullcert(&["oracle", "--group", "d2p", "--p", "9", "--subset", "1.0"])), 2);
    assert_eq!(code(&nullcert(&["reproduce", "--table", "tab99"])), 2);
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let cert_s = cert.to_str().unwrap();
    let o = nullcert(&["certify", "--family", "dihedral", "--lambda", "3,2", "--out", cert_s]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["summary"]["verified"], 1);
    let o = nullcert(&["verify", "--cert", cert_s]);
    assert_eq!(code(&o), 0);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    v["coefficient"] = Value::from(v["coefficient"].as_i64().unwrap() + 1);
    std::fs::write(&cert, v.to_string()).unwrap();
    let o = nullcert(&["verify", "--cert", cert_s, "--no-search"]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["items"][0]["verdict"], "mismatch");
}

#[test]
fn invalid_monomial_gets_a_replacement() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("ex.json");
    // the worked D_2p example as printed: degree 8 target over 7 factors
    let v = serde_json::json!({
        "family": "dihedral", "k": 5, "lambda": [3, 2], "a": [0, 1, 0, 0, 1], "mode": "linear",
        "factor_mode": "raw", "target": [2, 1, 2, 1, 2], "coefficient": 6, "bad_primes": [2, 3], "degree": 8
    });
    std::fs::write(&cert, v.to_string()).unwrap();
    let o = nullcert(&["verify", "--cert", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    let item = &r["items"][0];
    assert_eq!(item["detail"]["structurally_invalid"], true);
    assert_eq!(item["detail"]["recomputed"], 0);
    let rep = &item["detail"]["replacement"]["certificate"];
    assert_eq!(rep["degree"], 7);
    assert_eq!(rep["a"], serde_json::json!([0, 1, 0, 0, 1]));
}

#[test]
fn transfer_check() {
    assert_eq!(code(&nullcert(&["transfer-check", "--m", "77", "--k", "3"])), 0);
    assert_eq!(code(&nullcert(&["transfer-check", "--m", "25", "--k", "3"])), 1);
}

#[test]
fn reproduce_is_byte_stable() {
    let a = nullcert(&["reproduce", "--table", "tab6_D"]);
    let b = nullcert(&["reproduce", "--table", "tab6_D"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let keys: Vec<usize> = ["\"command\"", "\"descriptor\"", "\"digests\"", "\"items\"", "\"summary\"", "\"version\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn data_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(data_dir().join("tab6_D.json")).unwrap();
    std::fs::write(dir.path().join("tab6_D.json"), &src).unwrap();
    assert_eq!(code(&nullcert_in(dir.path(), &["reproduce", "--table", "tab6_D"])), 0);

    // a tampered coefficient must be caught
    let mut v: Value = serde_json::from_str(&src).unwrap();
    v["rows"][0]["coefficients"][0] = Value::from("3 · 5");
    std::fs::write(dir.path().join("tab6_D.json"), v.to_string()).unwrap();
    let o = nullcert_in(dir.path(), &["reproduce", "--table", "tab6_D"]);
    assert_eq!(code(&o), 1);

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(code(&nullcert_in(empty.path(), &["reproduce", "--table", "tab6_D"])), 2);
}

#[test]
fn sweep_writes_a_table_that_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("small.json");
    let o = nullcert(&[
        "sweep", "--family", "dihedral", "--k", "4..5", "--out", out.to_str().unwrap(), "--table", "small",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(t["provenance"], "derived");
    assert!(!t["rows"].as_array().unwrap().is_empty());
    let o = nullcert_in(dir.path(), &["reproduce", "--table", "small"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn oracle_commands() {
    // no linear ordering, explained by the zero sum inside the subgroup
    let o = nullcert(&["oracle", "--group", "d2p", "--p", "5", "--subset", "2.0,3.0", "--mode", "linear"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["items"][0]["verdict"], "skipped");
    assert_eq!(r["items"][0]["detail"]["explained"], true);
    let o = nullcert(&["oracle", "--group", "d2p", "--p", "5", "--subset", "1.0,2.0", "--mode", "linear"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["items"][0]["verdict"], "verified");
    let o = nullcert(&["oracle", "--group", "d2p", "--p", "5", "--subset", "2.0,3.0"]);
    assert_eq!(code(&o), 0);
    let o = nullcert(&["oracle", "--family", "d2p", "--p", "7", "--k", "4"]);
    assert_eq!(code(&o), 0);
    let o = nullcert(&["oracle", "--group", "g3p", "--p", "7", "--lambda", "2,2,2", "--reduce"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn weak_run_uses_stored_tails() {
    let o = nullcert(&["weak-run", "--group", "d2p", "--p", "13", "--t", "4", "--k", "14", "--samples", "10", "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["summary"]["verified"], 10);
}

#[test]
fn weak_certify_single_tail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tail.json");
    let o = nullcert(&[
        "weak-certify", "--family", "dihedral", "--t", "4", "--tail-lambda", "3,3", "--abar", "0", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = nullcert(&["verify", "--cert", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}
