//! End-to-end runs of the `neurodec` binary against the shipped registry.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn codes_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../codes")
}

fn neurodec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurodec"))
        .args(args)
        .env("NEURODEC_CODES_DIR", codes_dir())
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = neurodec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    neurodec(args).status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn info_summarises_hamming() {
    let out = ok(&["info", "--code", "hamming_7_4"]);
    assert!(out.contains("n, k      7, 4"), "{out}");
    assert!(out.contains("checks    3"));
    assert!(out.contains("edges     12"));
    // 12 ones in a 3 x 7 matrix
    assert!(out.contains("density   0.5714"));
    assert!(out.contains("drn"));
}

#[test]
fn info_reads_ldpc_121_60() {
    let out = ok(&["info", "--code", "ldpc_121_60"]);
    assert!(out.contains("n, k      121, 60"), "{out}");
}

#[test]
fn info_lists_registry() {
    let out = ok(&["info", "--list"]);
    for name in ["hamming_7_4", "ldpc_49_24", "bch_63_36", "polar_64_32"] {
        assert!(out.contains(name), "{name} missing");
    }
}

#[test]
fn missing_code_is_a_config_error() {
    assert_eq!(exit_code(&["info", "--code", "no/such/file.alist"]), 2);
    assert_eq!(exit_code(&["eval", "--variant", "bp"]), 2);
    assert_eq!(
        exit_code(&["eval", "--code", "hamming_7_4", "--variant", "hgn"]),
        2
    );
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"code":"hamming_7_4","stpes":3}"#).unwrap();
    assert_eq!(exit_code(&["--config", path(&cfg), "info"]), 2);
}

#[test]
fn training_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        ok(&[
            "train", "--code", "ldpc_49_24", "--variant", "drn", "--steps", "200", "--seed",
            "7", "--workers", workers, "--out", path(&out),
        ]);
        fs::read(out.join("weights.json")).unwrap()
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "3"));

    let log = fs::read_to_string(dir.path().join("a/train_log.csv")).unwrap();
    assert!(log.starts_with("step,loss,wall_ms\n"));
    let manifest = read_json(&dir.path().join("a/manifest.json"));
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["config"]["train"]["seed"], 7);
    assert_eq!(manifest["code"]["sha256"].as_str().unwrap().len(), 64);
    let w = read_json(&dir.path().join("a/weights.json"));
    assert_eq!(w["variant"], "drn");
    assert_eq!(w["values"].as_array().unwrap().len(), 5 * 28);
}

#[test]
fn zero_learning_rate_keeps_unit_weights() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "train", "--code", "hamming_7_4", "--variant", "nbp", "--steps", "5", "--lr", "0",
        "--out", path(dir.path()),
    ]);
    let w = read_json(&dir.path().join("weights.json"));
    let values = w["values"].as_array().unwrap();
    assert!(!values.is_empty());
    assert!(values.iter().all(|v| v.as_f64() == Some(1.0)));
}

#[test]
fn divergence_exits_4_with_last_good_weights() {
    let dir = tempfile::tempdir().unwrap();
    let code = exit_code(&[
        "train", "--code", "hamming_7_4", "--variant", "drn", "--steps", "10", "--lr",
        "1.7976931348623157e308", "--out", path(dir.path()),
    ]);
    assert_eq!(code, 4);
    assert!(dir.path().join("weights_last_good.json").is_file());
    assert!(!dir.path().join("weights.json").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"code":"hamming_7_4","variant":"drn","seed":3,"train":{"steps":4,"samples_per_snr":8}}"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    ok(&["--config", path(&cfg), "train", "--seed", "11", "--out", path(&out)]);
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["config"]["train"]["steps"], 4);
    assert_eq!(m["config"]["train"]["samples_per_snr"], 8);
    assert_eq!(m["config"]["train"]["seed"], 11);
}

#[test]
fn sweep_emits_one_row_per_variant_and_snr_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        ok(&[
            "sweep", "--code", "ldpc_49_24", "--variants", "bp,drn", "--snr", "4:6:1",
            "--workers", workers, "--out", path(&out),
        ]);
        fs::read_to_string(out.join("sweep.csv")).unwrap()
    };
    let csv = run("a", "1");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("code,variant,snr_db,codewords,bit_errors,ber,neg_ln_ber,ci_low,ci_high")
    );
    assert_eq!(lines.count(), 6);
    assert_eq!(csv, run("b", "1"));
    assert_eq!(csv, run("c", "2"));
    for f in ["sweep.json", "sweep_table.txt", "curve_bp.dat", "curve_drn.dat", "manifest.json"] {
        assert!(dir.path().join("a").join(f).is_file(), "{f}");
    }
}

#[test]
fn eval_uses_trained_weights() {
    let dir = tempfile::tempdir().unwrap();
    let train_dir = dir.path().join("train");
    ok(&[
        "train", "--code", "hamming_7_4", "--variant", "drn", "--steps", "20", "--out",
        path(&train_dir),
    ]);
    let weights = train_dir.join("weights.json");
    let eval_dir = dir.path().join("eval");
    ok(&[
        "eval", "--code", "hamming_7_4", "--variant", "drn", "--weights", path(&weights),
        "--snr", "3", "--out", path(&eval_dir),
    ]);
    let m = read_json(&eval_dir.join("manifest.json"));
    assert_eq!(m["config"]["weights_sha256"]["drn"].as_str().unwrap().len(), 64);
    // weights of the wrong variant are refused
    assert_eq!(
        exit_code(&[
            "eval", "--code", "hamming_7_4", "--variant", "nbp", "--weights", path(&weights),
            "--snr", "3", "--out", path(&eval_dir),
        ]),
        2
    );
}

#[test]
fn noiseless_eval_reports_cap() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "eval", "--code", "hamming_7_4", "--snr", "2", "--noiseless", "--max-codewords", "128",
        "--out", path(dir.path()),
    ]);
    let r = read_json(&dir.path().join("eval.json"));
    let p = &r[0]["points"][0];
    assert_eq!(p["bit_errors"], 0);
    assert_eq!(p["cap_reached"], true);
    let table = fs::read_to_string(dir.path().join("eval_table.txt")).unwrap();
    assert!(table.contains('*') && table.contains('>'));
}

#[test]
fn diagnostics_pass_and_fail_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["diag", "--kind", "equivalence", "--code", "hamming_7_4"]);
    ok(&["diag", "--kind", "gradcheck", "--code", "hamming_7_4", "--points", "3"]);
    ok(&[
        "diag", "--kind", "s-vs-l", "--code", "ldpc_49_24", "--snr", "4", "--min-errors", "500",
        "--out", path(&dir.path().join("ok")),
    ]);
    // pure noise: both lanes sit at 1/2, so the ordering cannot be shown
    assert_eq!(
        exit_code(&[
            "diag", "--kind", "s-vs-l", "--code", "ldpc_49_24", "--snr=-60", "--out",
            path(&dir.path().join("noise")),
        ]),
        3
    );
}

#[test]
fn gen_codes_matches_shipped_registry() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen-codes", "--out", path(dir.path())]);
    let shipped = codes_dir();
    for f in ["manifest.json", "ldpc/49_24.alist", "bch/63_36.alist", "polar/128_64.alist"] {
        assert_eq!(
            fs::read(dir.path().join(f)).unwrap(),
            fs::read(shipped.join(f)).unwrap(),
            "{f}"
        );
    }
}
