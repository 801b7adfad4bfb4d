//! End-to-end checks of the `meanval` binary: exit codes, artifact files,
//! and byte-level determinism across reruns and thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn meanval(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_meanval"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const MC_CONFIG: &str = r#"{
    "kind": "wmv",
    "seed": 11,
    "dim": 2,
    "function": ["exp(-(x0^2+x1^2))"],
    "measure": {"type": "lebesgue"},
    "renorm": {"type": "balls"},
    "criteria": {"eps": 0.02, "n_max": 15},
    "quad": {"rel_tol": 2e-3}
}"#;

#[test]
fn run_writes_report_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.json", MC_CONFIG);
    let out_dir = dir.path().join("results");
    let out = meanval(&["run", &cfg, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["kind"], "wmv");
    assert_eq!(report["exit_code"], 0);
    assert_eq!(report["result"]["status"], "converged");

    let history = std::fs::read_to_string(out_dir.join("history.csv")).unwrap();
    let mut lines = history.lines();
    assert_eq!(lines.next().unwrap(), "n,mu_Un,v0,spread");
    assert!(lines.next().unwrap().starts_with("0,"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.json", MC_CONFIG);
    let mut artifacts = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "2"), ("c", "1")] {
        let out_dir = dir.path().join(name);
        let out = meanval(
            &["run", &cfg, "--out", out_dir.to_str().unwrap()],
            &[("MEANVAL_THREADS", threads)],
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        artifacts.push((
            std::fs::read(out_dir.join("report.json")).unwrap(),
            std::fs::read(out_dir.join("history.csv")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0], artifacts[1], "thread count changed the output");
    assert_eq!(artifacts[0], artifacts[2], "rerun changed the output");
}

#[test]
fn exit_codes_match_the_verdict() {
    let dir = tempfile::tempdir().unwrap();

    let oscillating = write_cfg(
        dir.path(),
        "osc.json",
        r#"{"kind": "cesaro",
            "function": ["(2*x0+1)*cos(3.141592653589793*x0)"],
            "criteria": {"eps": 0.001, "n_max": 200}}"#,
    );
    assert_eq!(meanval(&["run", &oscillating], &[]).status.code(), Some(2));

    let exhausted = write_cfg(
        dir.path(),
        "slow.json",
        r#"{"kind": "wmv", "dim": 1, "function": ["exp(-x0^2)"],
            "measure": {"type": "lebesgue"}, "renorm": {"type": "cubes"},
            "criteria": {"eps": 1e-9, "n_max": 10}}"#,
    );
    assert_eq!(meanval(&["run", &exhausted], &[]).status.code(), Some(3));

    let invalid = write_cfg(dir.path(), "bad.json", r#"{"kind": "wmv", "dim": 1}"#);
    let out = meanval(&["run", &invalid], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("function"));
}

#[test]
fn validate_checks_without_running() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_cfg(dir.path(), "good.json", MC_CONFIG);
    let out = meanval(&["validate", &good], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");

    // Expression uses a variable beyond the declared dimension.
    let bad = write_cfg(
        dir.path(),
        "bad.json",
        r#"{"kind": "wmv", "dim": 1, "function": ["x1"],
            "measure": {"type": "lebesgue"}, "renorm": {"type": "cubes"}}"#,
    );
    let out = meanval(&["validate", &bad], &[]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("absent.json");
    let out = meanval(&["validate", missing.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_overrides_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.json", MC_CONFIG);
    let out_dir = dir.path().join("o");
    let out = meanval(
        &["run", &cfg, "--seed", "99", "--n-max", "12", "--out", out_dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["seed"], 99);
}
