use std::fs;
use std::process::{Command, Output};

use dedekind_core::survey::{read_records, Checkpoint, RecordWriter, ScanSpec, Survey};
use serde_json::Value;

fn dsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsum"))
        .args(args)
        .env_remove("DSUM_THREADS")
        .output()
        .expect("dsum runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dsum(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn dedekind_values() {
    assert_eq!(ok(&["dedekind", "2", "7"]), "1/14\n");
    assert_eq!(ok(&["dedekind", "1", "9"]), "14/27\n");
    assert_eq!(ok(&["dedekind", "-2", "7"]), "-1/14\n");
    assert_eq!(ok(&["dedekind", "2", "7", "--naive"]), "1/14\n");
    assert_eq!(ok(&["dedekind", "29", "91", "--tilde"]), "-22/91\n");
    assert_eq!(ok(&["dedekind", "2", "7", "--decimal", "6"]), "0.071429\n");
    let v = json(&["dedekind", "9", "91", "--tilde", "--out", "json"]);
    assert_eq!(v["value"], "6/91");
}

#[test]
fn exit_codes() {
    let out = dsum(&["dedekind", "2", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not coprime"));
    assert_eq!(dsum(&["dedekind", "2"]).status.code(), Some(2));
    assert_eq!(dsum(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(dsum(&["tables", "--table", "rho4"]).status.code(), Some(2));
    assert_eq!(dsum(&["survey", "--n", "8", "--limit", "100"]).status.code(), Some(2));
    assert_eq!(dsum(&["mean-square", "--f", "7", "--gen", "6"]).status.code(), Some(2));
    assert_eq!(dsum(&["verify", "--suite", "constancy", "--max-modulus", "2187"]).status.code(), Some(0));
}

#[test]
fn factor_and_mean_square() {
    let v = json(&["factor", "10^5", "--out", "json"]);
    assert_eq!(v["totient"], 40_000);
    assert_eq!(v["factors"], serde_json::json!([[2, 5], [5, 5]]));
    let v = json(&["mean-square", "--f", "91", "--gen", "9", "--out", "json", "--numeric"]);
    assert_eq!(v["mean_square"]["coef_num"], "1332");
    assert_eq!(v["mean_square"]["coef_den"], "8281");
    assert_eq!(v["tilde_S"], "666/91");
    let numeric = v["numeric"].as_f64().unwrap();
    assert!((numeric - 1332.0 / 8281.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10);
    let v = json(&["mean-square", "--f", "25", "--kernel", "5", "--out", "json"]);
    assert_eq!(v["subgroup"], serde_json::json!([1, 6, 11, 16, 21]));
}

#[test]
fn eisenstein_and_class_numbers() {
    let v = json(&["ef", "--f", "91"]);
    assert_eq!(v["ratios"], serde_json::json!([9, 16, 74, 81]));
    assert_eq!(v["subgroups"], serde_json::json!([[1, 9, 81], [1, 16, 74]]));
    assert_eq!(v["checks"]["cardinality"], true);
    assert_eq!(v["checks"]["closed_form"], serde_json::json!([true, true]));
    assert_eq!(dsum(&["ef", "--f", "35"]).status.code(), Some(2));

    let v = json(&["class-number", "--p", "23"]);
    assert_eq!(v["h_minus"], "3");
    assert_eq!(v["satisfied"], true);
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["bound_eq10", "bound_eq12_or_13", "degree", "h_minus", "p", "satisfied"]);
    let v = json(&["class-number", "--p", "13", "--degree", "4"]);
    assert_eq!(v["h_minus"], "1");
}

#[test]
fn tables() {
    let out = ok(&["tables", "--table", "rho9", "--limit", "1e5"]);
    assert!(out.lines().any(|l| l == "10^5 | 1592 | 838 | 0.52638…"), "{out}");
    let out = ok(&["tables", "--table", "rho15", "--limit", "1e5"]);
    assert!(out.contains("1189 | 648 | 0.54499…"), "{out}");
    let out = ok(&["tables", "--table", "rho9-window", "--from", "1e10", "--span", "1e6"]);
    assert!(out.contains("7226 | 3695 | 0.51134…"), "{out}");
    let v = json(&["tables", "--table", "rho13", "--limit", "1e5", "--out", "json"]);
    assert_eq!(v["rows"][0]["rho"], "0.49749");
}

#[test]
fn survey_report_and_threads() {
    let v = json(&["survey", "--n", "9", "--limit", "100000"]);
    assert_eq!((v["c_prime"].as_u64(), v["c_leq0"].as_u64()), (Some(1592), Some(838)));
    assert_eq!(v["rho"], "0.5263819095");
    let threaded = Command::new(env!("CARGO_BIN_EXE_dsum"))
        .args(["survey", "--n", "9", "--limit", "100000"])
        .env("DSUM_THREADS", "3")
        .output()
        .unwrap();
    assert!(threaded.status.success());
    assert_eq!(serde_json::from_str::<Value>(&stdout(&threaded)).unwrap(), v);
    let w = json(&["survey", "--n", "9", "--from", "0", "--span", "1e5"]);
    assert_eq!(w["c_prime"], 1592);
    assert_eq!(w["range"], serde_json::json!({"from": 0, "span": 100000}));
    let csv = ok(&["survey", "--n", "3", "--limit", "50", "--out", "csv"]);
    assert_eq!(csv, "p,n,two_S,N,nonpositive\n7,3,1,-1,true\n13,3,2,-1,true\n19,3,3,-1,true\n31,3,5,-1,true\n37,3,6,-1,true\n43,3,7,-1,true\n");
    let v = json(&["survey", "--all-odd", "--limit", "13"]);
    assert_eq!((v["c_prime"].as_u64(), v["c_leq0"].as_u64(), &v["n"]), (Some(8), Some(8), &Value::Null));
}

#[test]
fn survey_resumes_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("ckpt.json");
    let records = dir.path().join("records.csv");
    let (ckpt_s, records_s) = (ckpt.to_str().unwrap(), records.to_str().unwrap());

    // An interrupted run: a checkpoint at p ≤ 50000 and a records file that
    // also holds rows written after it.
    let spec = ScanSpec::fixed_n(9, 100_000).unwrap();
    let mut survey = Survey::new(spec).unwrap().with_block_size(10_000);
    let mut writer = RecordWriter::create(&records).unwrap();
    survey.run_until(70_000, &mut |r| writer.write(r), &mut |_| Ok(())).unwrap();
    writer.flush().unwrap();
    drop(writer);
    let mut partial = Survey::new(spec).unwrap().with_block_size(10_000);
    partial.run_until(50_000, &mut |_| Ok(()), &mut |_| Ok(())).unwrap();
    partial.checkpoint().write_atomic(&ckpt).unwrap();

    let args = ["survey", "--n", "9", "--limit", "1e5", "--checkpoint", ckpt_s, "--records", records_s];
    let v = json(&args);
    assert_eq!((v["c_prime"].as_u64(), v["c_leq0"].as_u64()), (Some(1592), Some(838)));
    let rows = read_records(fs::File::open(&records).unwrap()).unwrap();
    assert_eq!(rows.len(), 1592);
    assert!(rows.windows(2).all(|w| w[0].p < w[1].p));

    // A completed checkpoint resumes straight to the report.
    let done = Checkpoint::read(&ckpt).unwrap();
    assert_eq!(done.c_prime, 1592);
    assert_eq!(json(&args), v);
    assert_eq!(read_records(fs::File::open(&records).unwrap()).unwrap().len(), 1592);

    // A checkpoint for a different scan is refused.
    let out = dsum(&["survey", "--n", "5", "--limit", "1e5", "--checkpoint", ckpt_s]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checkpoint"));
}

#[test]
fn verify_json_round_trips() {
    let out = dsum(&["verify", "--suite", "kernel-theorem", "--out", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let report = &v[0];
    assert_eq!(report["suite"], "kernel-theorem");
    assert_eq!(report["run"], report["passed"]);
    assert_eq!(report["first_failure"], Value::Null);
}
