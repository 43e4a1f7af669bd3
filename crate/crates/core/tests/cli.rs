//! Runs the `qc` binary: exit codes, atomic reports, schema validation and the
//! golden corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use quartic_cremona::cli::{report_schema_validate, schema_errors};

fn qc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qc")).args(args).env_remove("QC_THREADS").output().expect("qc runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().expect("object").remove("timestamp");
    v
}

#[test]
fn obstruction_ell_5_passes() {
    let o = qc(&["lattice", "obstruction", "--ell", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["verdict"], "PASS");
    assert!(report_schema_validate(&r));
}

#[test]
fn obstruction_ell_2_fails_with_witness() {
    let o = qc(&["lattice", "obstruction", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let r = stdout_json(&o);
    assert_eq!(r["verdict"], "FAIL");
    let w = &r["witnesses"][0]["witness"];
    assert_eq!((w["s"].as_i64(), w["e"].as_i64()), (Some(12), Some(24)));
    assert!(report_schema_validate(&r));
}

#[test]
fn conditional_exit_follows_allow_axioms() {
    assert_eq!(qc(&["lattice", "projective-obstruction", "--ell", "6"]).status.code(), Some(0));
    let o = qc(&["--allow-axioms", "false", "lattice", "projective-obstruction", "--ell", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["verdict"], "CONDITIONAL");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--seed", "1", "--prime", "12"][..],
        &["verify", "--prime", "101"],
        &["lattice", "obstruction"],
        &["lattice", "disc", "--gram", "1,2;3,4"],
        &["noether-fano", "--d", "2", "--m", "3", "--case", "point"],
        &["noether-fano", "--d", "2", "--m", "1", "--case", "line"],
        &["no-such-command"],
    ] {
        let o = qc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_qc"))
        .args(["lattice", "obstruction", "--ell", "5"])
        .env("QC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_written_atomically_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qc(&["noether-fano", "--d", "7", "--m", "2", "--case", "curve-in-S", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries, vec![std::ffi::OsString::from("r.json")]);
    let v = qc(&["report-validate", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout_json(&v)["verdict"], "PASS");
}

#[test]
fn missing_verdict_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = stdout_json(&qc(&["lattice", "disc", "--ell", "3"]));
    r.as_object_mut().unwrap().remove("verdict");
    assert!(!report_schema_validate(&r));
    assert!(!schema_errors(&r).is_empty());
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_vec(&r).unwrap()).unwrap();
    let o = qc(&["report-validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "FAIL");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn tensor_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = stdout_json(&qc(&["gen-tensor", "--seed", "9", "--domain", "13"]));
    let path = dir.path().join("t.json");
    std::fs::write(&path, serde_json::to_vec(&r["sections"][0]["tensor"]).unwrap()).unwrap();
    let from_file = stdout_json(&qc(&["construct", "--tensor", path.to_str().unwrap()]));
    let from_seed = stdout_json(&qc(&["construct", "--seed", "9", "--domain", "13"]));
    let f1 = |v: &Value| v["sections"][1]["F1"].clone();
    assert_eq!(f1(&from_file), f1(&from_seed));
    assert!(f1(&from_file).as_str().is_some_and(|s| !s.is_empty()));

    std::fs::write(&path, b"{\"domain\": \"Q\", \"a\": [1, 2]}").unwrap();
    assert_eq!(qc(&["construct", "--tensor", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn degenerate_tensor_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let zero: Vec<Vec<Vec<i64>>> = vec![vec![vec![0; 4]; 4]; 4];
    let path = dir.path().join("zero.json");
    std::fs::write(&path, serde_json::to_vec(&serde_json::json!({ "domain": "Q", "a": zero })).unwrap()).unwrap();
    let o = qc(&["cremona-verify", "--tensor", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = stdout_json(&o);
    assert!(report_schema_validate(&r));
    assert_eq!(r["witnesses"][0]["section"], "construction");
}

#[test]
fn smooth_check_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = qc(&["smooth-check", "--seed", "3", "--prime", "7", "--csv-dir", dir.path().to_str().unwrap()]);
    let r = stdout_json(&o);
    assert!(report_schema_validate(&r));
    let csv = std::fs::read_to_string(dir.path().join("s1_p7.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4"));
    let points = r["sections"][0]["primes"][0]["s1"]["points"].as_u64().unwrap();
    assert_eq!(lines.count() as u64, points);
}

/// Arguments each golden report was produced with.
const GOLDEN: &[(&str, &[&str])] = &[
    ("obstruction_l2.json", &["lattice", "obstruction", "--ell", "2"]),
    ("obstruction_l4_l5.json", &["lattice", "obstruction", "--ell", "4,5"]),
    ("projective_obstruction.json", &["lattice", "projective-obstruction", "--gram", "4,6;6,4", "--ell", "5"]),
    ("disc.json", &["lattice", "disc", "--gram", "4,6;6,4", "--ell", "5"]),
    ("rays_l3.json", &["lattice", "rays", "--ell", "3"]),
    ("isometries.json", &["lattice", "isometries", "--gram", "4,6;6,4"]),
    ("noether_fano_curve_in_s.json", &["noether-fano", "--d", "10", "--m", "3", "--case", "curve-in-S", "--deg-f", "11"]),
    ("verify_seed42_p11.json", &["verify", "--seed", "42", "--prime", "11"]),
    ("gen_tensor_seed5.json", &["gen-tensor", "--seed", "5"]),
];

#[test]
fn golden_corpus_validates() {
    let mut n = 0;
    for entry in std::fs::read_dir(golden_dir()).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(report_schema_validate(&doc), "{}: {:?}", path.display(), schema_errors(&doc));
        n += 1;
    }
    assert_eq!(n, GOLDEN.len());
}

#[test]
fn golden_corpus_reproduces() {
    for (file, args) in GOLDEN {
        let want: Value = serde_json::from_str(&std::fs::read_to_string(golden_dir().join(file)).unwrap()).unwrap();
        let got = stdout_json(&qc(args));
        assert_eq!(without_timestamp(got), without_timestamp(want), "{file}");
    }
}
