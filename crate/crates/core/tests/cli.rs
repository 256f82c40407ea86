use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use paracalc::experiments::ExperimentReport;
use paracalc::io::read_field;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paracalc"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("paracalc-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{:?} failed:\n{}\n{}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn enhance_then_operators() {
    let dir = scratch("ops");
    let enh = dir.join("enh");
    let out = run(bin()
        .args(["enhance", "--equation", "gpam", "--n", "32", "--eps", "0.25", "--seed", "3", "--out"])
        .arg(&enh));
    let manifest = json(&out);
    assert!(manifest["constants"]["c_eps"].as_f64().unwrap() > 0.0);
    assert!(enh.join("manifest.json").exists());

    let x = enh.join("X.pfld");
    let xi = enh.join("xi.pfld");
    let pl = dir.join("pl.pfld");
    run(bin().args(["op", "para-less"]).arg(&x).arg(&xi).arg("-o").arg(&pl));
    let pg = dir.join("pg.pfld");
    run(bin().args(["op", "para-greater"]).arg(&x).arg(&xi).arg("-o").arg(&pg));
    let rs = dir.join("rs.pfld");
    run(bin().args(["op", "resonant"]).arg(&x).arg(&xi).arg("-o").arg(&rs));

    let sum = read_field(&pl)
        .unwrap()
        .try_add(&read_field(&pg).unwrap())
        .unwrap()
        .try_add(&read_field(&rs).unwrap())
        .unwrap();
    let prod = read_field(&x).unwrap().try_mul(&read_field(&xi).unwrap()).unwrap();
    assert!(sum.try_sub(&prod).unwrap().sup_norm() < 1e-10 * prod.sup_norm());

    let est = json(&run(bin().args(["op", "regularity"]).arg(&xi).args(["--window", "0", "3"])));
    assert!(est["alpha_hat"].is_number());
    let norm = json(&run(bin().args(["op", "besov-norm"]).arg(&x).args(["--alpha", "-0.5"])));
    assert!(norm["norm"].as_f64().unwrap() > 0.0);
}

#[test]
fn operator_arity_is_checked() {
    let dir = scratch("arity");
    let enh = dir.join("enh");
    run(bin().args(["enhance", "--equation", "gpam", "--n", "32", "--eps", "0.25", "--out"]).arg(&enh));
    let out = bin().args(["op", "commutator-c"]).arg(enh.join("X.pfld")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_from_config() {
    let dir = scratch("solve");
    let cfg = dir.join("run.json");
    fs::write(&cfg, r#"{"t_final": 0.01, "dt": 0.001, "n": 32, "eps": 0.25, "seed": 1}"#).unwrap();
    let out = dir.join("sol");
    run(bin().args(["solve", "--equation", "csbe", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert!(out.join("manifest.json").exists());
    assert!(out.join("solution.pfld").exists());
}

#[test]
fn spectrum_writes_one_row_per_eigenvalue() {
    let dir = scratch("spectrum");
    let out = dir.join("sp");
    run(bin()
        .env("PARACALC_WORKERS", "2")
        .args(["spectrum", "--n", "32", "--eps", "0.25", "--m", "3", "--samples", "2", "--out"])
        .arg(&out));
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["mean_eigenvalues"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_worker_count_is_rejected() {
    let out = bin()
        .env("PARACALC_WORKERS", "zero")
        .args(["spectrum", "--n", "32", "--eps", "0.25", "--samples", "1", "--out"])
        .arg(scratch("workers"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn report_at(dir: &Path) -> ExperimentReport {
    ExperimentReport::from_json(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn experiment_run_and_replay() {
    let dir = scratch("experiment");
    let spec = dir.join("spec.json");
    let runs = dir.join("runs");
    fs::write(&spec, format!(r#"{{"name": "lp-exactness", "n": [64], "samples": 3, "output_dir": {:?}}}"#, runs))
        .unwrap();
    run(bin().env("PARACALC_WORKERS", "3").args(["experiment", "run"]).arg(&spec));
    let report = report_at(&runs);
    assert!(report.passed);
    assert!(runs.join("table.csv").exists());
    assert!(runs.join("run_meta.json").exists());
    run(bin().args(["experiment", "replay"]).arg(runs.join("report.json")));

    // A tampered report no longer replays.
    let mut tampered = report.clone();
    tampered.records[0].values.insert("reconstruction".into(), 1.0);
    let t = dir.join("tampered");
    tampered.write(&t).unwrap();
    let out = bin().args(["experiment", "replay"]).arg(t.join("report.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("mismatch"));
}

#[test]
fn unknown_experiment_is_an_error() {
    let dir = scratch("unknown");
    let spec = dir.join("spec.json");
    fs::write(&spec, r#"{"name": "no-such-thing"}"#).unwrap();
    let out = bin().args(["experiment", "run"]).arg(&spec).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let list = run(bin().args(["experiment", "list"]));
    assert!(String::from_utf8_lossy(&list.stdout).contains("determinism"));
}
