use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagcob")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn document_schema() {
    let v = json(&["sample", "--model", "whitney", "--n", "2", "--count", "5"]);
    for key in ["schema_version", "command", "params", "results"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "sample");
    let pts = v["results"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
    for p in pts {
        let coords = p.as_array().unwrap();
        assert_eq!(coords.len(), 2);
        assert!(coords.iter().all(|z| z.as_array().unwrap().len() == 2 && z[0].is_f64() && z[1].is_f64()));
    }
    assert_eq!(v["results"]["color_channel"].as_array().unwrap().len(), 5);
}

#[test]
fn empty_sample_is_a_valid_document() {
    let v = json(&["sample", "--model", "whitney", "--n", "2", "--count", "0"]);
    assert!(v["results"]["points"].as_array().unwrap().is_empty());
    assert_eq!(v["results"]["metadata"]["sample_count"], 0);
}

#[test]
fn same_seed_same_bytes() {
    for fmt in ["json", "csv"] {
        let args = ["--format", fmt, "--seed", "7", "sample", "--model", "null-cobordism", "--n", "2", "--count", "200"];
        let (a, b) = (run(&args), run(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{fmt}");
    }
    let a = run(&["--seed", "1", "sample", "--model", "whitney", "--n", "2", "--count", "10"]);
    let b = run(&["--seed", "2", "sample", "--model", "whitney", "--n", "2", "--count", "10"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn csv_header_and_rows() {
    let out = run(&["--format", "csv", "sample", "--model", "whitney", "--n", "3", "--count", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re0,im0,re1,im1,re2,im2,color"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').count() == 7 && r.split(',').all(|x| x.parse::<f64>().is_ok())));
}

#[test]
fn out_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("lagcob-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pts.json");
    let out = run(&["--out", path.to_str().unwrap(), "sample", "--model", "section", "--count", "3"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"]["points"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn index_of_local_trace() {
    let v = json(&["index", "--model", "local-trace", "--k", "0", "--n", "2"]);
    assert_eq!(v["results"]["indices"], serde_json::json!({ "q-_to_q+": 1, "q+_to_q-": 1 }));
}

#[test]
fn index_of_one_generator() {
    let v = json(&["index", "--model", "whitney", "--n", "3", "--generator", "q+_to_q-"]);
    assert_eq!(v["results"]["indices"], serde_json::json!({ "q+_to_q-": 4 }));
    assert!(!run(&["index", "--model", "whitney", "--generator", "nope"]).status.success());
}

#[test]
fn euler_of_handle() {
    let v = json(&["euler", "--scenario", "handle", "--k", "2", "--n", "4"]);
    for key in ["chi_plus", "chi_minus", "chi_bot"] {
        assert_eq!(v["results"][key], -2, "{key}");
    }
}

#[test]
fn euler_of_random_chains() {
    let v = json(&["--seed", "3", "euler", "--compose", "random", "--chains", "20"]);
    assert_eq!(v["results"]["pass"], true);
}

#[test]
fn floer_handle_is_unobstructed() {
    let v = json(&["floer", "--example", "handle", "--k", "0", "--n", "1", "--A", "1", "--B", "0.4"]);
    assert_eq!(v["results"]["status"], "unobstructed-at-leading-order");
    let lead = &v["results"]["leading"][0];
    assert_eq!(lead["gen"], "(q+,1)->(q-,1)");
    assert!((lead["exp"].as_f64().unwrap() - 0.6).abs() < 1e-12);
}

#[test]
fn floer_handle_is_obstructed_when_b_exceeds_a() {
    let v = json(&["floer", "--example", "handle", "--k", "0", "--n", "2", "--A", "0.4", "--B", "1"]);
    assert_eq!(v["results"]["status"], "obstructed");
}

#[test]
fn verify_reports_residuals() {
    let v = json(&["verify", "--model", "sheared-torus", "--samples", "500"]);
    assert_eq!(v["results"]["pass"], true);
    let bad = run(&["verify", "--model", "product-torus", "--samples", "100", "--tol", "-1"]);
    assert!(!bad.status.success());
}

#[test]
fn critical_points_of_local_trace() {
    let v = json(&["critical", "--model", "local-trace", "--k", "1", "--n", "3", "--seeds", "64"]);
    assert_eq!(v["results"]["pass"], true);
}

#[test]
fn slice_of_null_cobordism() {
    let v = json(&["slice", "--model", "null-cobordism", "--n", "1", "--t", "1", "--samples", "200"]);
    assert!(!v["results"]["points"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_fail() {
    assert!(!run(&["sample", "--model", "nope"]).status.success());
    assert!(!run(&["frobnicate"]).status.success());
    assert!(!run(&["--format", "csv", "floer", "--example", "whitney"]).status.success());
    assert!(!run(&["floer", "--example", "surgery_trace_KAB", "--E-a", "4", "--E-b", "2", "--E", "1"]).status.success());
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["--seed", "5", "sample", "--model", "null-cobordism", "--n", "2", "--count", "300"];
    let one = Command::new(env!("CARGO_BIN_EXE_lagcob")).args(args).env("LAGCOB_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_lagcob")).args(args).env("LAGCOB_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
}
