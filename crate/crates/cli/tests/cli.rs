use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn redwalk(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_redwalk")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "redwalk {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn field(stdout: &[u8], name: &str) -> String {
    String::from_utf8_lossy(stdout)
        .lines()
        .find_map(|l| l.strip_prefix(name).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no `{name}` line"))
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("redwalk.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_reports_metrics_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[run]\nsteps = 2000\nobstacles = 2\nseed = 5\n");
    let out = redwalk(&["--config", &config, "run"]);
    assert_eq!(field(&out.stdout, "steps"), "2000");
    assert_eq!(field(&out.stdout, "obstacles"), "2");
    let out = redwalk(&["--config", &config, "run", "--steps", "3000", "--reset", "t2c"]);
    assert_eq!(field(&out.stdout, "steps"), "3000");
    assert_eq!(field(&out.stdout, "controller"), "actg-t2c-s2c");
    let again = redwalk(&["--config", &config, "run", "--steps", "3000", "--reset", "t2c"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[run]\nstepz = 10\n");
    let out = Command::new(env!("CARGO_BIN_EXE_redwalk"))
        .args(["--config", &config, "run"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn train_then_run_with_model() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[hyperparameters]\nbuffer_size = 1024\nbatch_size = 256\nagents = 4\nhidden_units = 16\n",
    );
    let model = dir.path().join("curv.json");
    let model = model.to_str().unwrap();
    redwalk(&["--config", &config, "train", "--slot", "curvature", "--steps", "2048", "--out", model]);
    assert!(dir.path().join("curv.training.csv").exists());
    let out = redwalk(&["run", "--curvature", "rl", "--model", model, "--steps", "1000"]);
    assert_eq!(field(&out.stdout, "controller"), "actg-t2f-rl");
    assert!(field(&out.stdout, "decision time").ends_with("ms"));
    // A model for another slot is refused.
    let out = Command::new(env!("CARGO_BIN_EXE_redwalk"))
        .args(["run", "--reset", "rl", "--model", model, "--steps", "10"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn prelim_experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("prelim");
    redwalk(&[
        "experiment",
        "prelim",
        "--steps",
        "1000",
        "--seeds",
        "0,1",
        "--out",
        out_dir.to_str().unwrap(),
        "--no-plots",
    ]);
    let results = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    // 4 combos x 4 obstacle counts x 2 seeds, plus the header.
    assert_eq!(results.lines().count(), 33);
    assert!(out_dir.join("summary.csv").exists());
}
