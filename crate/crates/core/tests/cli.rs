use std::process::Command;

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_afsa-beam"))
}

#[test]
fn run_shipped_config() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args([
            "run",
            "desk",
            "--seeds",
            "2",
            "--algorithm",
            "all",
            "--budget-match",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("wrote 6 runs"), "{stdout}");
    for alg in ["afsa", "pso", "aco"] {
        assert!(stdout.lines().any(|l| l.starts_with(alg)), "{stdout}");
        assert!(dir.path().join(format!("trace_{alg}_base_1.csv")).exists());
    }
    assert!(dir.path().join("summary.csv").exists());
    assert!(dir.path().join("runs.csv").exists());
}

#[test]
fn sweep_from_command_line() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args([
            "sweep", "desk", "--seeds", "1", "--axis", "N", "--values", "4,9", "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.contains(",N,4.0,") && summary.contains(",N,9.0,"), "{summary}");
}

#[test]
fn missing_config_fails_with_message() {
    let out = bin().args(["run", "/nonexistent/config.toml"]).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.starts_with("error:") && stderr.contains("/nonexistent/config.toml"),
        "{stderr}"
    );
}

#[test]
fn bad_sweep_values_fail() {
    let out = bin()
        .args(["sweep", "desk", "--axis", "M", "--values", "4,2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("increasing"));
}
