use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinlab(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlab"))
        .args(args)
        .env("SPINLAB_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn field_info_reports_period_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinlab(dir.path(), &["field-info", "--n", "3", "--ell", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("x^3 + x^2 - 2*x - 1"), "{text}");
    let out = spinlab(dir.path(), &["field-info", "--n", "3", "--ell", "7", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["minpoly"], serde_json::json!(["-1", "-2", "1", "1"]));
    assert_eq!(v["h_subgroup"], serde_json::json!(["1", "6"]));
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinlab(dir.path(), &["field-info", "--n", "5", "--ell", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n does not divide ell-1"));
    let out = spinlab(dir.path(), &["starlight", "--n", "3", "--ell", "31"]);
    assert_eq!(out.status.code(), Some(2));
    let out = spinlab(dir.path(), &["validate-hilbert", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = spinlab(dir.path(), &["sample", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn starlight_uses_and_fills_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["starlight", "--n", "13", "--ell", "53", "--json"];
    let v = stdout_json(&spinlab(dir.path(), &args));
    assert_eq!(v["m_k"], "5");
    assert_eq!(v["d_k"], "1893/4096");
    assert_eq!(v["provenance"], "formula");
    assert!(dir.path().join("field-n13-ell53-h1.json").exists());
    let again = stdout_json(&spinlab(dir.path(), &args));
    assert_eq!(again, v);
    let v = stdout_json(&spinlab(dir.path(), &["starlight", "--n", "3", "--ell", "7", "--json", "--no-cache"]));
    assert_eq!(v["d_k"], "1/2");
    assert_eq!(v["c_ks"], "1/4");
    assert!(!dir.path().join("field-n3-ell7-h1.json").exists());
}

#[test]
fn table1_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinlab(dir.path(), &["table1", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let n: u64 = row["n"].as_str().unwrap().parse().unwrap();
        let want = if n <= 7 { "oracle" } else { "formula" };
        assert_eq!(row["provenance"], want);
    }
    assert_eq!(rows[6]["d_k"]["computed"], "124187/262144");
}

#[test]
fn validate_hilbert_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinlab(dir.path(), &["validate-hilbert", "--n", "3", "--exhaustive", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["exhaustive"], true);
    assert_eq!(v["oracle"], v["formula"]);
}

#[test]
fn sample_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| {
        let csv = dir.path().join(name);
        let summary = dir.path().join(format!("{name}.json"));
        let out = spinlab(
            dir.path(),
            &[
                "sample", "--n", "3", "--ell", "7", "--bound", "20000", "--jobs", jobs, "--csv",
                csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(), "--json",
            ],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let s: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
        (std::fs::read(csv).unwrap(), s)
    };
    let (a, sa) = run("1", "a.csv");
    let (b, sb) = run("3", "b.csv");
    assert_eq!(a, b);
    assert_eq!(sa["stats"], sb["stats"]);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,f,class_bits,star,spins,generator"));
    let rows: Vec<&str> = lines.collect();
    let split = sa["stats"]["split"].as_u64().unwrap();
    let inert = sa["stats"]["inert"].as_u64().unwrap();
    assert_eq!(rows.len() as u64, split + inert);
    let thirteen = rows.iter().find(|r| r.starts_with("13,")).unwrap();
    let fields: Vec<&str> = thirteen.split(',').collect();
    assert_eq!(fields[1], "1");
    assert_eq!(fields[4].split(';').count(), 2);
    assert_eq!(fields[5].split(';').count(), 3);
    let checks = sa["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["label"] == "all spins +1" && c["soft"] == true));
}
