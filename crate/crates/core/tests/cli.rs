//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nilgrowth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilgrowth")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = nilgrowth(args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().expect("exit code"), json)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nilgrowth-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn growth_degrees_from_catalog() {
    for (name, degree, rank) in [("heisenberg", 4, 3), ("ex14a_shadow", 7, 5), ("ex14b_shadow", 6, 5), ("ut4", 10, 6)] {
        let (code, r) = report(&["growth", "--input", &format!("catalog:{name}"), "--radius", "6"]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(r["result"]["algebraic"]["degree"], degree, "{name}");
        assert_eq!(r["result"]["algebraic"]["rank"], rank, "{name}");
        assert_eq!(r["input"]["label"], name);
    }
}

#[test]
fn free2_is_exponential() {
    let (code, r) = report(&["classify", "--input", "catalog:free2", "--radius", "10"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["doubling"]["classification"]["kind"], "exponential");
    assert_eq!(r["result"]["sizes"][10], 2 * 3i64.pow(10) - 1);
}

#[test]
fn descriptor_file_matches_catalog() {
    let dir = scratch("descriptor");
    let path = dir.join("h.json");
    fs::write(
        &path,
        r#"{"kind": "matrix_group", "label": "heisenberg", "generators": [
            {"label": "a", "matrix": [["1","1","0"],["0","1","0"],["0","0","1"]]},
            {"label": "b", "matrix": [["1","0","0"],["0","1","1"],["0","0","1"]]}]}"#,
    )
    .unwrap();
    let (code, from_file) = report(&["growth", "--input", path.to_str().unwrap(), "--radius", "6"]);
    assert_eq!(code, 0);
    let (_, from_catalog) = report(&["growth", "--input", "catalog:heisenberg", "--radius", "6"]);
    assert_eq!(from_file["input"]["digest"], from_catalog["input"]["digest"]);
    assert_eq!(from_file["result"], from_catalog["result"]);
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"kind": "matrix_group", "label": "x", "generators": [{"label": "a", "matrix": [["1","2/0"],["0","1"]]}]}"#).unwrap();
    let (code, r) = report(&["growth", "--input", bad.to_str().unwrap()]);
    assert_eq!((code, r["status"].as_str()), (2, Some("parse_error")));

    let out = nilgrowth(&["balls", "--input", "catalog:heisenberg", "--radius", "30", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["partial"]["sizes"].as_array().unwrap().len() > 1);

    let weight = dir.join("w.json");
    fs::write(&weight, r#"{"kind": "table", "entries": [{"word": "a", "value": 100}], "default": 1, "symmetrize": true}"#).unwrap();
    let out = nilgrowth(&["gnr", "--input", "catalog:heisenberg", "--radius", "4", "--weight", weight.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    assert_eq!(nilgrowth(&["classify", "--input", "catalog:heisenberg", "--radius", "4", "--strict"]).status.code(), Some(5));
    assert_eq!(nilgrowth(&["classify", "--input", "catalog:heisenberg", "--radius", "4"]).status.code(), Some(0));
    assert_eq!(nilgrowth(&["growth", "--input", "catalog:nope"]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical() {
    let a = scratch("repeat-a");
    let b = scratch("repeat-b");
    for dir in [&a, &b] {
        let out = nilgrowth(&["clouds", "--input", "catalog:heisenberg", "--radius", "8", "--seed", "5", "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 2);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn selftest_passes() {
    let (code, r) = report(&["selftest"]);
    assert_eq!(code, 0, "{r}");
}
