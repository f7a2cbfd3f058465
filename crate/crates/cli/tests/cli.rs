//! End-to-end checks of the `qmag` binary: output schemas, exit codes, and
//! cross-command plumbing, all with deliberately tiny budgets.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qmag(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmag"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn qmag_ok(dir: &Path, args: &[&str]) -> String {
    let out = qmag(dir, args);
    assert!(
        out.status.success(),
        "qmag {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// Generates a small dataset and returns its path.
fn small_dataset(dir: &Path, name: &str, seed: &str, k: &str) -> PathBuf {
    let path = dir.join(name);
    qmag_ok(
        dir,
        &[
            "gen", "--config", "A", "--n", "4..5", "--layers", "3", "--k", k, "--n-traj", "32",
            "--seed", seed, "-o", path.to_str().unwrap(),
        ],
    );
    path
}

#[test]
fn gen_writes_schema_header_and_k_records() {
    let dir = TempDir::new().unwrap();
    let data = small_dataset(dir.path(), "d.jsonl", "11", "9");
    let text = std::fs::read_to_string(&data).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], r#"{"schema":1}"#);
    for line in &lines[1..] {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(value.get("m_z_exact").is_some());
        assert_eq!(value["config"], "A");
    }
}

#[test]
fn gen_reruns_are_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let base = [
        "gen", "--config", "B", "--n", "4,6", "--layers", "2", "--k", "8", "--n-traj", "16",
        "--seed", "5",
    ];
    let mut args_a: Vec<&str> = base.to_vec();
    args_a.extend(["-o", a.to_str().unwrap()]);
    qmag_ok(dir.path(), &args_a);
    let mut args_b: Vec<&str> = base.to_vec();
    args_b.extend(["--threads", "1", "-o", b.to_str().unwrap()]);
    qmag_ok(dir.path(), &args_b);
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "gen output depends on thread count"
    );
}

#[test]
fn train_writes_model_and_history() {
    let dir = TempDir::new().unwrap();
    let data = small_dataset(dir.path(), "d.jsonl", "3", "30");
    let model = dir.path().join("m.model");
    qmag_ok(
        dir.path(),
        &[
            "train", "--data", data.to_str().unwrap(), "--epochs", "3", "--patience", "2",
            "--seed", "2", "-o", model.to_str().unwrap(),
        ],
    );
    let bytes = std::fs::read(&model).unwrap();
    assert_eq!(&bytes[..8], b"QMAGCNN1");
    let history: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("m.model.history.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(history["inputs"], "hybrid");
    assert_eq!(history["epochs_run"], 3);
    assert_eq!(history["history"]["train_loss"].as_array().unwrap().len(), 3);
}

#[test]
fn eval_emits_expected_csv_schema() {
    let dir = TempDir::new().unwrap();
    let data = small_dataset(dir.path(), "d.jsonl", "3", "30");
    let test = small_dataset(dir.path(), "t.jsonl", "4", "10");
    let model = dir.path().join("m.model");
    qmag_ok(
        dir.path(),
        &[
            "train", "--data", data.to_str().unwrap(), "--inputs", "classical", "--epochs", "2",
            "--seed", "2", "-o", model.to_str().unwrap(),
        ],
    );
    let csv_path = dir.path().join("eval.csv");
    qmag_ok(
        dir.path(),
        &[
            "eval", "--model", model.to_str().unwrap(), "--data", test.to_str().unwrap(),
            "--seed", "6", "-o", csv_path.to_str().unwrap(),
        ],
    );
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,method,r2,one_minus_r2,pearson,k_test,seed");
    // Test set covers sizes 4 and 5: per-size rows plus an overall row,
    // for both the noisy baseline and the model.
    assert_eq!(lines.len(), 1 + 3 + 3);
    assert!(lines[1..4].iter().all(|l| l.contains(",noisy,")));
    assert!(lines[4..7].iter().all(|l| l.contains(",cnn_classical,")));
    let overall: Vec<&str> = lines[6].split(',').collect();
    assert_eq!(overall[0], "all");
    assert_eq!(overall[5], "10");
    assert_eq!(overall[6], "2", "model rows carry the model's seed");
}

#[test]
fn scatter_lists_every_record_with_all_methods() {
    let dir = TempDir::new().unwrap();
    let data = small_dataset(dir.path(), "d.jsonl", "3", "30");
    let test = small_dataset(dir.path(), "t.jsonl", "4", "6");
    let model = dir.path().join("m.model");
    qmag_ok(
        dir.path(),
        &[
            "train", "--data", data.to_str().unwrap(), "--epochs", "2", "--seed", "2", "-o",
            model.to_str().unwrap(),
        ],
    );
    let csv_path = dir.path().join("scatter.csv");
    qmag_ok(
        dir.path(),
        &[
            "scatter", "--model", model.to_str().unwrap(), "--data", test.to_str().unwrap(),
            "--n-traj", "16", "--seed", "6", "-o", csv_path.to_str().unwrap(),
        ],
    );
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "id,n,target,cnn,noisy,zne");
    assert_eq!(lines.len(), 7);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 6);
        for field in line.split(',').skip(2) {
            field.parse::<f64>().expect("numeric field");
        }
    }
}

#[test]
fn sweep_emits_one_row_per_value_seed_method() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    qmag_ok(
        dir.path(),
        &[
            "sweep", "--var", "p-noise", "--values", "0,1.0", "--config", "A", "--n", "4",
            "--n-test", "4", "--layers", "2", "--k", "20", "--k-test", "6", "--seeds", "1,2",
            "--epochs", "2", "--patience", "1", "--n-traj", "16", "--seed", "3", "-o",
            csv_path.to_str().unwrap(),
        ],
    );
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "var,value,n,method,r2,one_minus_r2,pearson,k_test,seed"
    );
    // 2 values x 2 seeds x 3 methods (hybrid, classical, noisy).
    assert_eq!(lines.len(), 1 + 12);
    assert_eq!(lines.iter().filter(|l| l.contains("cnn_hybrid")).count(), 4);
    assert_eq!(lines.iter().filter(|l| l.starts_with("p_noise,0,")).count(), 6);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    // Missing --out.
    let out = qmag(
        dir.path(),
        &["gen", "--config", "A", "--n", "4", "--layers", "2", "--k", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
    // Unknown flag (clap).
    let out = qmag(dir.path(), &["gen", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // Section size outside the device.
    let out = qmag(
        dir.path(),
        &[
            "gen", "--config", "A", "--n", "1..2", "--layers", "2", "--k", "1", "-o", "x.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let out = qmag(
        dir.path(),
        &["train", "--data", "missing.jsonl", "-o", "m.model"],
    );
    assert_eq!(out.status.code(), Some(3));
    let out = qmag(
        dir.path(),
        &["eval", "--model", "missing.model", "--data", "missing.jsonl", "-o", "e.csv"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn density_estimator_respects_qubit_cap() {
    let dir = TempDir::new().unwrap();
    let out = qmag(
        dir.path(),
        &[
            "gen", "--config", "A", "--n", "9", "--layers", "2", "--k", "1", "--estimator",
            "density", "-o", "x.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(4), "cap breach is a numerical-domain error");
}
