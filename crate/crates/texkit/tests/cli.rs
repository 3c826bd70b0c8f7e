//! End-to-end runs of the batch binary: full workflow, reproducibility
//! across runs and thread counts, exit-code contract, failure logging.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn texkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texkit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary must run")
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = texkit(args, dir);
    assert!(
        out.status.success(),
        "texkit {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn bench(dir: &Path) -> PathBuf {
    ok(&["synth", "bench", "--n-per-class", "10", "--seed", "42"], dir);
    dir.join("bench/manifest.csv")
}

#[test]
fn workflow_synth_extract_train_predict() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);

    let out = ok(&["extract", "bench/manifest.csv", "--output-dir", "out"], dir);
    assert!(String::from_utf8_lossy(&out.stdout).contains("wrote 60 rows"));
    let table = std::fs::read_to_string(dir.join("out/features.csv")).unwrap();
    assert_eq!(table.lines().count(), 61);
    assert!(table.starts_with("path,label,contrast,"));

    ok(&["train", "out/features.csv", "dt", "--output-dir", "out"], dir);
    let out = ok(&["predict", "out/model_dt.tkm", "bench/stripes_v_004.ppm"], dir);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("class: stripes_v\n"), "got: {stdout}");
    // one score line per class after the verdict
    assert_eq!(stdout.lines().count(), 7);
}

#[test]
fn extract_is_reproducible_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);

    ok(&["extract", "bench/manifest.csv", "--output-dir", "a", "--jobs", "1"], dir);
    ok(&["extract", "bench/manifest.csv", "--output-dir", "b", "--jobs", "4"], dir);
    ok(&["extract", "bench/manifest.csv", "--output-dir", "c"], dir);
    let a = std::fs::read(dir.join("a/features.csv")).unwrap();
    let b = std::fs::read(dir.join("b/features.csv")).unwrap();
    let c = std::fs::read(dir.join("c/features.csv")).unwrap();
    assert_eq!(a, b, "thread count changed the table bytes");
    assert_eq!(a, c, "rerun changed the table bytes");
}

#[test]
fn evaluate_all_classifiers_writes_one_report_each() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);
    ok(&["extract", "bench/manifest.csv", "--output-dir", "out"], dir);

    ok(&["evaluate", "out/features.csv", "--all-classifiers", "--output-dir", "out"], dir);
    for kind in ["lr", "svm", "knn", "dt", "rf"] {
        let path = dir.join(format!("out/report_{kind}.json"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{kind}: {e}"));
        let report: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(report["classifier"], kind);
        assert_eq!(report["folds"].as_array().unwrap().len(), 5);
        assert_eq!(report["seed"], 0);
    }
    // ROC point files: 5 variants x 5 folds x 6 classes
    let rocs = std::fs::read_dir(dir.join("out"))
        .unwrap()
        .filter(|e| {
            let name = e.as_ref().unwrap().file_name();
            name.to_string_lossy().starts_with("roc_")
        })
        .count();
    assert_eq!(rocs, 150);

    // byte-stable on rerun
    let first = std::fs::read(dir.join("out/report_rf.json")).unwrap();
    ok(&["evaluate", "out/features.csv", "--variant", "rf", "--output-dir", "out"], dir);
    let second = std::fs::read(dir.join("out/report_rf.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn evaluate_honors_config_protocol_and_seed_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);
    ok(&["extract", "bench/manifest.csv", "--output-dir", "out"], dir);
    std::fs::write(
        dir.join("holdout.toml"),
        "[protocol]\nkind = \"holdout\"\nfraction = 0.7\n",
    )
    .unwrap();

    ok(&[
        "evaluate",
        "out/features.csv",
        "--variant",
        "knn",
        "--config",
        "holdout.toml",
        "--seed",
        "9",
        "--output-dir",
        "out",
    ], dir);
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("out/report_knn.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["seed"], 9);
    assert_eq!(report["protocol"]["kind"], "holdout");
    assert_eq!(report["folds"].as_array().unwrap().len(), 1);
    // 10 per class, 0.7 train fraction: 42 train, 18 test
    assert_eq!(report["folds"][0]["train_size"], 42);
    assert_eq!(report["folds"][0]["test_size"], 18);
}

#[test]
fn extract_logs_and_skips_unreadable_images() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let manifest = bench(dir);
    std::fs::write(dir.join("bench/broken.ppm"), b"P6 not really an image").unwrap();
    let mut text = std::fs::read_to_string(&manifest).unwrap();
    text.push_str("broken.ppm,stripes_v\n");
    std::fs::write(&manifest, text).unwrap();

    let out = texkit(&["extract", "bench/manifest.csv", "--output-dir", "out"], dir);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("skipping broken.ppm"), "stderr: {stderr}");
    assert!(stderr.contains("error: 1 of 61 images failed"), "stderr: {stderr}");
    // the sixty good rows still landed
    let table = std::fs::read_to_string(dir.join("out/features.csv")).unwrap();
    assert_eq!(table.lines().count(), 61);
}

#[test]
fn overlays_are_written_per_image() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);
    ok(&["extract", "bench/manifest.csv", "--output-dir", "out", "--overlays"], dir);
    let overlays = std::fs::read_dir(dir.join("out/overlays")).unwrap().count();
    assert_eq!(overlays, 60);
    assert!(dir.join("out/overlays/blobs_000.overlay.ppm").is_file());
}

#[test]
fn augment_expands_and_output_feeds_back_in() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);

    ok(&["augment", "bench/manifest.csv", "--out", "aug"], dir);
    assert!(dir.join("aug/blobs_000.ppm").is_file());
    assert!(dir.join("aug/blobs_000.aug_flip.ppm").is_file());
    let manifest = std::fs::read_to_string(dir.join("aug/manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 361);

    // the augmented manifest is itself a valid extract input
    let out = ok(&["extract", "aug/manifest.csv", "--output-dir", "out2"], dir);
    assert!(String::from_utf8_lossy(&out.stdout).contains("wrote 360 rows"));
}

#[test]
fn usage_errors_exit_two_data_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    bench(dir);
    ok(&["extract", "bench/manifest.csv", "--output-dir", "out"], dir);

    // unknown classifier variant
    let out = texkit(&["train", "out/features.csv", "perceptron"], dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown classifier"));

    // malformed config
    std::fs::write(dir.join("bad.toml"), "sead = 1\n").unwrap();
    let out = texkit(&["synth", "x", "--config", "bad.toml"], dir);
    assert_eq!(out.status.code(), Some(2));

    // unknown flag is a clap usage error
    let out = texkit(&["extract", "bench/manifest.csv", "--frobnicate"], dir);
    assert_eq!(out.status.code(), Some(2));

    // missing manifest is a data/file error
    let out = texkit(&["extract", "missing.csv"], dir);
    assert_eq!(out.status.code(), Some(1));

    // synth rejects undersized corpora as usage
    let out = texkit(&["synth", "tiny", "--n-per-class", "3"], dir);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn seed_changes_synth_content_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(&["synth", "s42", "--n-per-class", "10", "--seed", "42"], dir);
    ok(&["synth", "s42b", "--n-per-class", "10", "--seed", "42"], dir);
    ok(&["synth", "s43", "--n-per-class", "10", "--seed", "43"], dir);
    let a = std::fs::read(dir.join("s42/checker_fine_000.ppm")).unwrap();
    let b = std::fs::read(dir.join("s42b/checker_fine_000.ppm")).unwrap();
    let c = std::fs::read(dir.join("s43/checker_fine_000.ppm")).unwrap();
    assert_eq!(a, b, "same seed must reproduce identical images");
    assert_ne!(a, c, "different seed must change the noise");
}
