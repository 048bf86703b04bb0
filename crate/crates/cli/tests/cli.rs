use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn regmean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regmean")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = regmean(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn keys(v: &Value) -> BTreeSet<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

fn assert_keys(v: &Value, expected: &[&str]) {
    assert_eq!(keys(v), expected.iter().copied().collect::<BTreeSet<_>>());
}

fn assert_metadata(v: &Value, command: &str, seed: u64) {
    assert_keys(&v["metadata"], &["command", "seed", "tool", "version"]);
    assert_eq!(v["metadata"]["command"], command);
    assert_eq!(v["metadata"]["seed"], seed);
    assert_eq!(v["metadata"]["tool"], "regmean");
}

fn code(args: &[&str]) -> i32 {
    regmean(args).status.code().unwrap()
}

#[test]
fn mean_schema() {
    let v = json(&["mean", "--generator", "log", "--data", "1,2,4"]);
    assert_keys(&v, &["config", "mean", "metadata"]);
    assert_metadata(&v, "mean", 42);
    assert!((v["mean"].as_f64().unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(v["config"]["n"], 3);
}

#[test]
fn mean_reads_files_with_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    fs::write(&path, "x\n1\n4\n").unwrap();
    let v = json(&["mean", "--generator", "reciprocal", "--data", path.to_str().unwrap()]);
    assert!((v["mean"].as_f64().unwrap() - 1.6).abs() < 1e-15);
}

#[test]
fn axioms_schema() {
    let v = json(&["axioms", "--generator", "power:2", "--n", "4", "--trials", "50", "--seed", "7"]);
    assert_keys(&v, &["all_pass", "config", "metadata", "reports"]);
    assert_metadata(&v, "axioms", 7);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn edgeworth_defaults_to_csv() {
    let out = regmean(&["edgeworth", "--generator", "identity", "--dist", "gamma:1:1", "--n", "5", "--grid", "-1:1:3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,phi_cdf,edgeworth_cdf,correction_1,correction_2,correction_3");
    assert_eq!(lines.count(), 3);
    assert!(!text.contains("-0.0000000000000000e0"));
}

#[test]
fn edgeworth_json_schema_and_kappa_variant() {
    let base = ["edgeworth", "--generator", "identity", "--dist", "gamma:1:1", "--n", "5", "--grid", "-1:1:3", "--format", "json"];
    let v = json(&base);
    assert_keys(&v, &["config", "metadata", "moments", "rows"]);
    assert_metadata(&v, "edgeworth", 42);
    let mut literal = base.to_vec();
    literal.push("--literal-kappa2");
    let w = json(&literal);
    assert_ne!(v["rows"][0]["value"], w["rows"][0]["value"]);
}

#[test]
fn simulate_schema_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hist.csv");
    let v = json(&[
        "simulate", "--dist", "uniform:1:2", "--generator", "log", "--n", "50", "--replicates", "100",
        "--hist", hist.to_str().unwrap(),
    ]);
    assert_metadata(&v, "simulate", 42);
    for key in ["config", "ks", "eg", "asym_var", "empirical_var", "variance_ratio", "runtime_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let text = fs::read_to_string(&hist).unwrap();
    assert!(text.starts_with("bin_lo,bin_hi,count,normal_density_at_mid\n"), "{text}");
}

#[test]
fn stability_schema() {
    let v = json(&["stability", "--g", "log", "--h", "identity", "--grid", "51"]);
    assert_metadata(&v, "stability", 42);
    assert_eq!(v["satisfied"], true);
    assert_eq!(v["sampling"], "exhaustive");
    let r = json(&["stability", "--g", "log", "--h", "identity", "--n", "5", "--points", "1000"]);
    assert_eq!(r["sampling"], "random");
}

#[test]
fn portfolio_schema_and_csv() {
    let v = json(&["portfolio", "--returns", "0.1,-0.05,0.03"]);
    assert_keys(&v, &["config", "gap", "geometric_gross", "geometric_net", "markowitz", "metadata", "wealth"]);
    assert_metadata(&v, "portfolio", 42);
    let out = regmean(&["portfolio", "--returns", "10,-5,3", "--percent", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gap,geometric_gross,geometric_net,markowitz,wealth\n"), "{text}");
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn output_file_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/mean.json");
    let out = regmean(&["mean", "--generator", "identity", "--data", "1,3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["mean"], 2.0);
}

#[test]
fn exit_codes_by_error_class() {
    assert_eq!(code(&["mean", "--generator", "identity", "--data", "1,2"]), 0);
    assert_eq!(code(&["mean", "--generator", "log", "--data=-1,2"]), 2);
    assert_eq!(code(&["mean", "--generator", "nonsense", "--data", "1"]), 2);
    assert_eq!(code(&["simulate", "--dist", "uniform:-1:1", "--generator", "log", "--n", "10"]), 2);
    assert_eq!(code(&["simulate", "--dist", "uniform:1:2", "--generator", "log", "--n", "1"]), 2);
    assert_eq!(code(&["mean", "--generator", "identity", "--data", "1", "--unknown-flag"]), 2);
    assert_eq!(code(&["portfolio", "--returns=-1.5"]), 2);
    assert_eq!(
        code(&["simulate", "--dist", "lognormal:2:6.25", "--generator", "exp", "--n", "10", "--replicates", "10"]),
        3
    );
    assert_eq!(code(&["edgeworth", "--generator", "power:3", "--dist", "pareto:10", "--n", "10"]), 3);
}

fn figure_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, acc: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, acc);
            } else if path.file_name().unwrap() != "timing.json" {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                acc.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    let mut acc = Vec::new();
    walk(dir, dir, &mut acc);
    acc.sort();
    acc
}

#[test]
fn reproduce_figure1_is_byte_identical_across_runs_and_threads() {
    let root = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (i, threads) in ["1", "1", "4", "8"].iter().enumerate() {
        let dir = root.path().join(format!("run{i}"));
        let v = json(&[
            "reproduce-figure1", "--n", "50", "--replicates", "100", "--threads", threads,
            "--out", dir.to_str().unwrap(),
        ]);
        assert_metadata(&v, "reproduce-figure1", 42);
        assert_eq!(v["cells"].as_array().unwrap().len(), 12);
        runs.push(figure_files(&dir));
    }
    assert_eq!(runs[0].len(), 37);
    for other in &runs[1..] {
        assert_eq!(&runs[0], other);
    }
}

#[test]
fn reproduce_figure2_writes_findings() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["reproduce-figure2", "--n", "100", "--replicates", "200", "--out", dir.path().to_str().unwrap()]);
    assert_metadata(&v, "reproduce-figure2", 42);
    assert_eq!(v["findings"]["log_max_abs_correction"], 0.0);
    assert!(dir.path().join("findings.json").is_file());
    assert!(dir.path().join("summary.csv").is_file());
}
