use ebm_core::ClusterSpectrum;
use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const REFERENCE: &str = r#"{"n":0,"R":1.0,"elements":[{"lambda":2.0,"mu":1.0,"eta":1.0}]}"#;
const TWO_UNITS: &str =
    r#"{"n":1,"R":1.0,"elements":[{"lambda":5.0,"mu":0.5,"eta":1.0},{"lambda":4.0,"mu":0.3,"eta":2.0}]}"#;
const OTHER: &str = r#"{"n":0,"R":1.0,"elements":[{"lambda":3.0,"mu":1.2,"eta":1.0}]}"#;

fn ebm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebm")).args(args).output().expect("binary runs")
}

fn ebm_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebm")).args(args).env("EBM_THREADS", threads).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&o.stderr)))
}

fn write_model(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn forward(dir: &Path, model: &str, ells: &str, out: &str) -> String {
    let out = dir.join(out).to_string_lossy().into_owned();
    let o = ebm(&["forward", "--model", model, "--ell", ells, "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn forward_writes_interlacing_clusters_and_kernel_table() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", REFERENCE);
    let out = dir.path().join("out");
    let o = ebm(&["forward", "--model", &model, "--ell", "1,2", "--t-grid", "0:1:0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for ell in [1, 2] {
        let cl = ClusterSpectrum::from_json(&fs::read_to_string(out.join(format!("cluster_l{ell}.json"))).unwrap()).unwrap();
        assert_eq!(cl.ell, ell);
        assert_eq!(cl.real_roots[0], 0.0);
        assert!(cl.real_roots[1] > -8.0 && cl.real_roots[1] < -2.0);
    }
    let csv = fs::read_to_string(out.join("kernel.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-14);
    let modes = fs::read_to_string(out.join("modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 3);
}

#[test]
fn emitted_json_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", TWO_UNITS);
    let out = forward(dir.path(), &model, "1,3", "out");
    let text = fs::read_to_string(Path::new(&out).join("cluster_l3.json")).unwrap();
    assert_eq!(ClusterSpectrum::from_json(&text).unwrap().to_json(), text);
}

#[test]
fn outputs_are_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", TWO_UNITS);
    let mut snapshots = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let o = ebm_threads(&["forward", "--model", &model, "--ell", "1,2,5", "--out", out.to_str().unwrap()], threads);
        assert_eq!(code(&o), 0);
        let files: Vec<Vec<u8>> = ["cluster_l1.json", "cluster_l2.json", "cluster_l5.json", "modes.csv", "kernel.csv"]
            .iter()
            .map(|f| fs::read(out.join(f)).unwrap())
            .collect();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn zero_mode_index_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", REFERENCE);
    assert_eq!(code(&ebm(&["forward", "--model", &model, "--ell", "0"])), 64);
    assert_eq!(code(&ebm(&["forward", "--model", &model, "--ell", "1", "--t-grid", "1:0:0.1"])), 64);
    assert_eq!(code(&ebm(&["frobnicate"])), 64);
}

#[test]
fn invalid_model_reports_json_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", r#"{"n":0,"R":1.0,"elements":[{"lambda":2.0,"mu":1.0,"eta":-1.0}]}"#);
    let o = ebm(&["kernel", "--model", &model]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["error"], "InvalidModel");
}

#[test]
fn known_c_round_trip_recovers_the_model() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", TWO_UNITS);
    let out = forward(dir.path(), &model, "1,2", "out");
    let report = dir.path().join("report.json");
    let o = ebm(&[
        "invert",
        &format!("{out}/cluster_l1.json"),
        &format!("{out}/cluster_l2.json"),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["n"], 1);
    let rel = |key: &str, want: f64| (r[key].as_f64().unwrap() - want).abs() / want;
    assert!(rel("mu0", 0.5) < 1e-6);
    assert!(rel("lambda0", 5.0) < 1e-6);
    assert!(r["fit_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn self_consistent_round_trip_recovers_the_model() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", REFERENCE);
    let out = forward(dir.path(), &model, "1,2", "out");
    let o = ebm(&[
        "invert",
        &format!("{out}/cluster_l1.json"),
        &format!("{out}/cluster_l2.json"),
        "--mode",
        "self-consistent",
    ]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["mu0"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert!((r["lambda0"].as_f64().unwrap() - 2.0).abs() < 1e-5);
    assert_eq!(r["diagnostics"]["mode"], "self-consistent");
}

#[test]
fn clusters_of_different_models_fail_the_fit() {
    let dir = TempDir::new().unwrap();
    let a = forward(dir.path(), &write_model(dir.path(), "a.json", REFERENCE), "1,2", "a");
    let b = forward(dir.path(), &write_model(dir.path(), "b.json", OTHER), "1,2", "b");
    let o = ebm(&[
        "invert",
        &format!("{a}/cluster_l1.json"),
        &format!("{b}/cluster_l2.json"),
        "--mode",
        "self-consistent",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "RatioInconsistent");
    let o = ebm(&["invert", &format!("{a}/cluster_l1.json"), &format!("{b}/cluster_l2.json")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn missing_or_malformed_cluster_exits_2() {
    let dir = TempDir::new().unwrap();
    let a = forward(dir.path(), &write_model(dir.path(), "a.json", REFERENCE), "1,2", "a");
    let missing = dir.path().join("missing.json");
    let o = ebm(&["invert", missing.to_str().unwrap(), &format!("{a}/cluster_l2.json")]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["error"], "Io");
    let bad = write_model(dir.path(), "bad.json", r#"{"ell":1}"#);
    assert_eq!(code(&ebm(&["invert", &bad, &format!("{a}/cluster_l2.json")])), 2);
}

#[test]
fn verify_only_runs_the_named_property() {
    let o = ebm(&["verify", "--only", "interlacing", "--cases", "25"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("PASS interlacing"));
    assert_eq!(code(&ebm(&["verify", "--only", "no_such_property"])), 64);
}

#[test]
fn verify_reruns_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = |p: &Path| {
        vec![
            "verify".to_string(),
            "--seed".into(),
            "42".into(),
            "--cases".into(),
            "40".into(),
            "--out".into(),
            p.to_string_lossy().into_owned(),
        ]
    };
    let run = |p: &Path, threads: &str| {
        let v = args(p);
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        ebm_threads(&refs, threads)
    };
    let (oa, ob) = (run(&a, "1"), run(&b, "3"));
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let report: Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(report["seed"], 42);
    assert!(report["properties"].as_array().unwrap().len() >= 18);
}
