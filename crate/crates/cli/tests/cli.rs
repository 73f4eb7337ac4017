use std::process::{Command, Output};

use serde_json::Value;

fn vosa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vosa")).args(args).output().unwrap()
}

fn ns_file(dir: &tempfile::TempDir) -> String {
    let path = dir.path().join("ns.json").to_string_lossy().into_owned();
    assert!(vosa(&["builders", "ns", "--out", &path]).status.success());
    path
}

#[test]
fn verify_reports_clean_datum() {
    let dir = tempfile::tempdir().unwrap();
    let out = vosa(&["verify", "--datum", &ns_file(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], Value::Array(vec![]));
    assert_eq!(v["conformal_normalization"], Value::Bool(true));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = vosa(&["verify", "--datum", "/nonexistent/datum.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "IO");
}

#[test]
fn bad_degree_and_rational_strings_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ns = ns_file(&dir);
    for args in [
        vec!["build", "--datum", &ns, "--max-degree", "1/3"],
        vec!["build", "--datum", &ns, "--ell", "x"],
        vec!["gram", "--datum", &ns, "--degree", "9", "--max-degree", "2"],
    ] {
        assert_eq!(vosa(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn identities_need_the_vacuum_module() {
    let dir = tempfile::tempdir().unwrap();
    let ns = ns_file(&dir);
    let out = vosa(&["identities", "--datum", &ns, "--kind", "verma", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "UNSUPPORTED");
}

#[test]
fn scan_reports_level_zero_radical() {
    let dir = tempfile::tempdir().unwrap();
    let out = vosa(&["scan", "--datum", &ns_file(&dir), "--degree", "3/2", "--ells", "0,1", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "ell,rank,dim_radical\n0,0,1\n1,1,0\n");
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let ns = ns_file(&dir);
    let path = dir.path().join("dims.txt");
    let out = vosa(&["build", "--datum", &ns, "--max-degree", "2", "--format", "text", "--out", &path.to_string_lossy()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text, "degree  dim\n0       1\n1/2     0\n1       0\n3/2     1\n2       1\n");
}
