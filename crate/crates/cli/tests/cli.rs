//! End-to-end tests of the binary: exit-code contract, artifact layout,
//! summary schema and determinism of the CSV outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kirchhoff(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kirchhoff"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_artifacts_with_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "cos-mode",
            "--n",
            "20",
            "--m",
            "60",
            "--T",
            "1",
            "--out-dir",
            "run",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let run = dir.path().join("run");
    assert!(run.join("solution.csv").is_file());
    assert!(run.join("diagnostics.csv").is_file());
    let summary = read_json(&run.join("summary.json"));
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["command"], "solve");
    assert_eq!(summary["verdicts"]["status"], "ok");
    assert_eq!(summary["verdicts"]["energy_bound"]["holds"], true);
    assert_eq!(summary["config"]["problem_key"], "cos-mode");
    assert_eq!(summary["config"]["n"], 20);
    assert_eq!(summary["config"]["T"], 1.0);
    assert_eq!(summary["grid"]["m"], 60);

    let diagnostics = fs::read_to_string(run.join("diagnostics.csv")).unwrap();
    let mut lines = diagnostics.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,t_k,q_k,mu_k,gamma_k,lh_norm_k,delta_k"
    );
    // 21 layer rows follow the header
    assert_eq!(lines.count(), 21);
}

#[test]
fn solve_zero_problem_emits_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "zero",
            "--n",
            "10",
            "--m",
            "8",
            "--T",
            "1",
            "--out-dir",
            "z",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("z/solution.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let u = line.rsplit(',').next().unwrap();
        assert_eq!(u.parse::<f64>().unwrap(), 0.0, "line: {line}");
    }
}

#[test]
fn solve_rejects_unknown_problem_and_bad_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "nonexistent",
            "--n",
            "10",
            "--m",
            "8",
            "--T",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);

    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "zero",
            "--n",
            "1",
            "--m",
            "8",
            "--T",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);

    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "zero",
            "--n",
            "10",
            "--m",
            "8",
            "--T",
            "-1",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn solve_csv_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let out = kirchhoff(
            &[
                "solve",
                "--problem",
                "free-vibration",
                "--n",
                "16",
                "--m",
                "40",
                "--T",
                "1",
                "--out-dir",
                sub,
            ],
            dir.path(),
        );
        assert_eq!(exit_code(&out), 0);
    }
    for name in ["solution.csv", "diagnostics.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn solve_snapshot_stride_keeps_final_layer() {
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "zero",
            "--n",
            "10",
            "--m",
            "4",
            "--T",
            "1",
            "--snapshot-stride",
            "4",
            "--out-dir",
            "s",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("s/solution.csv")).unwrap();
    let mut ks: Vec<usize> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    ks.dedup();
    assert_eq!(ks, vec![0, 4, 8, 10]);
}

#[test]
fn converge_cos_mode_passes_rate_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "converge",
            "--problem",
            "cos-mode",
            "--n",
            "20",
            "--m",
            "800",
            "--T",
            "1",
            "--levels",
            "3",
            "--out-dir",
            "c",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let csv = fs::read_to_string(dir.path().join("c/convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + 3 levels
    let summary = read_json(&dir.path().join("c/summary.json"));
    assert_eq!(summary["verdicts"]["status"], "ok");
    assert_eq!(summary["verdicts"]["orders_in_window"], true);
    assert_eq!(summary["levels"], 3);
}

#[test]
fn converge_flat_rate_exits_4() {
    // ramp-mode is reproduced exactly in time, so its errors sit at the
    // spatial floor and the observed order is ~0: an honest rate failure
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "converge",
            "--problem",
            "ramp-mode",
            "--n",
            "10",
            "--m",
            "100",
            "--T",
            "1",
            "--levels",
            "3",
            "--out-dir",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 4, "{out:?}");
    let summary = read_json(&dir.path().join("r/summary.json"));
    assert_eq!(summary["verdicts"]["status"], "rate-failure");
    assert_eq!(summary["verdicts"]["orders_in_window"], false);
}

#[test]
fn solve_without_diagnostics_skips_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = kirchhoff(
        &[
            "solve",
            "--problem",
            "cos-mode",
            "--n",
            "10",
            "--m",
            "20",
            "--T",
            "1",
            "--no-diagnostics",
            "--out-dir",
            "nd",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0);
    let nd = dir.path().join("nd");
    assert!(nd.join("solution.csv").is_file());
    assert!(!nd.join("diagnostics.csv").exists());
    let summary = read_json(&nd.join("summary.json"));
    assert_eq!(summary["config"]["diagnostics"], false);
    assert!(summary["verdicts"]["energy_bound"].is_null());
}

#[test]
fn converge_rejects_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    // no exact solution attached
    let out = kirchhoff(
        &[
            "converge",
            "--problem",
            "free-vibration",
            "--n",
            "10",
            "--m",
            "50",
            "--T",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
    // too few levels for a trend
    let out = kirchhoff(
        &[
            "converge",
            "--problem",
            "cos-mode",
            "--n",
            "10",
            "--m",
            "50",
            "--T",
            "1",
            "--levels",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn check_inequalities_deterministic_and_validating() {
    let dir = tempfile::tempdir().unwrap();
    let a = kirchhoff(&["check-inequalities", "--trials", "2000"], dir.path());
    assert_eq!(exit_code(&a), 0);
    let b = kirchhoff(&["check-inequalities", "--trials", "2000"], dir.path());
    assert_eq!(a.stdout, b.stdout, "fixed seed must reproduce the report");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("gronwall: trials=2000 failures=0"));
    assert!(text.contains("rogava-tsiklauri: trials=20 failures=0"));
    assert!(text.contains("all inequalities hold"));

    let out = kirchhoff(&["check-inequalities", "--trials", "0"], dir.path());
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn config_file_feeds_solve_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{
            "problem_key": "cos-mode",
            "T": 1.0,
            "n": 10,
            "m": 24,
            "out_dir": "from-config",
            "snapshot_stride": 2,
            "diagnostics": true
        }"#,
    )
    .unwrap();
    let out = kirchhoff(&["solve", "--config", "cfg.json"], dir.path());
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let summary = read_json(&dir.path().join("from-config/summary.json"));
    assert_eq!(summary["config"]["n"], 10);

    // the explicit flag wins over the file value
    let out = kirchhoff(
        &[
            "solve",
            "--config",
            "cfg.json",
            "--n",
            "12",
            "--out-dir",
            "override",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0);
    let summary = read_json(&dir.path().join("override/summary.json"));
    assert_eq!(summary["config"]["n"], 12);
    assert_eq!(summary["config"]["T"], 1.0);

    // unknown fields in the config are a configuration error
    fs::write(
        dir.path().join("bad.json"),
        r#"{"problem_key": "zero", "bogus": 1}"#,
    )
    .unwrap();
    let out = kirchhoff(&["solve", "--config", "bad.json"], dir.path());
    assert_eq!(exit_code(&out), 2);
}
