//! End-to-end behaviour of the runner and the `riesz-lab` binary.

use std::process::{Command, Output};

use riesz_lab::LabError;
use riesz_lab_cli::{cli_parse, run, CliError, ExperimentConfig, Task};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz-lab"))
        .args(args)
        .env_remove("RIESZ_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).unwrap()
}

#[test]
fn riesz_on_the_pi_interval() {
    let r = run(&config(
        r#"{"task": "riesz", "domain": "interval:3.14159265358979", "bc": "dirichlet", "gamma": 1, "lambda": [10]}"#,
    ))
    .unwrap();
    // the length is pi rounded down, which moves the value by about 3e-14
    let v = r.summary["value"].as_f64().unwrap();
    assert!((v - 16.0).abs() < 1e-12, "{v}");

    let exact = run(&config(&format!(
        r#"{{"task": "riesz", "domain": "interval:{}", "gamma": 1, "lambda": [10]}}"#,
        std::f64::consts::PI
    )))
    .unwrap();
    assert_eq!(exact.summary["value"].as_f64(), Some(16.0));
}

#[test]
fn polya_on_the_unit_square() {
    let r = run(&config(
        r#"{"task": "polya", "domain": "box:1,1", "bc": "dirichlet",
            "lambda": {"min": 10, "max": 1e4, "points": 40, "spacing": "log"}}"#,
    ))
    .unwrap();
    assert_eq!(r.summary["pass"], Value::Bool(true));
    assert!(r.summary["min_margin"].as_f64().unwrap() > 0.0);
    assert_eq!(r.rows.len(), 40);
}

#[test]
fn neumann_disk_low_spectrum() {
    let r = run(&config(
        r#"{"task": "spectrum", "domain": "ball:1@2", "bc": "neumann", "lambda": [4]}"#,
    ))
    .unwrap();
    let csv = r.to_csv();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3, "{csv}");
    let mu: Vec<f64> = rows
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(mu[0], 0.0);
    assert!((mu[1] - 3.38996).abs() < 1e-5 && mu[1] == mu[2]);
    assert_eq!(r.summary["distinct"].as_u64(), Some(2));
    assert_eq!(r.summary["count"].as_u64(), Some(3));
}

#[test]
fn riesz_flags_on_the_unit_square() {
    let c = cli_parse([
        "riesz-lab",
        "riesz",
        "--domain",
        "box:1,1",
        "--bc",
        "dirichlet",
        "--gamma",
        "1",
        "--lambda",
        "50",
    ])
    .unwrap();
    let v = run(&c).unwrap().summary["value"].as_f64().unwrap();
    assert!((v - 31.565).abs() < 1e-3, "{v}");
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    std::fs::write(
        &path,
        r#"{"task": "polya", "domain": "box:1,1", "bc": "dirichlet",
            "lambda": {"min": 10, "max": 10000, "points": 40, "spacing": "log"}}"#,
    )
    .unwrap();
    let from_file = cli_parse(["riesz-lab", "--config", path.to_str().unwrap()]).unwrap();
    let from_flags = cli_parse([
        "riesz-lab",
        "polya",
        "--domain",
        "box:1,1",
        "--bc",
        "dirichlet",
        "--grid",
        "10:10000:40:log",
    ])
    .unwrap();
    assert_eq!(from_file, from_flags);
    let (a, b) = (run(&from_file).unwrap(), run(&from_flags).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    std::fs::write(
        &path,
        r#"{"task": "riesz", "domain": "box:1,1", "gamma": 1, "lambda": [50]}"#,
    )
    .unwrap();
    let c = cli_parse([
        "riesz-lab",
        "--config",
        path.to_str().unwrap(),
        "--gamma",
        "2",
        "--bc",
        "neumann",
    ])
    .unwrap();
    assert_eq!(c.gamma, Some(2.0));
    assert_eq!(c.domain.as_deref(), Some("box:1,1"));
    assert_eq!(c.bc, Some(riesz_lab::BoundaryCondition::Neumann));
}

#[test]
fn malformed_domain_names_the_token() {
    let out = bin(&["riesz", "--domain", "box:0,-1", "--gamma", "1", "--lambda", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("box:0,-1"));
}

#[test]
fn unknown_flag_is_rejected() {
    let out = bin(&["riesz", "--domian", "box:1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--domian"));
}

#[test]
fn unknown_and_foreign_keys_are_listed() {
    let err = ExperimentConfig::from_json(r#"{"task": "riesz", "domian": "box:1,1"}"#).unwrap_err();
    assert!(err.to_string().contains("domian"), "{err}");
    assert_eq!(err.exit_code(), 2);

    let c = config(r#"{"task": "spectrum", "domain": "box:1,1", "lambda": [4], "gamma": 1, "tol": 0.1}"#);
    let err = run(&c).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("gamma") && msg.contains("tol"), "{msg}");
    assert_eq!(err.exit_code(), 2);

    let err = run(&config(r#"{"task": "riesz", "domain": "box:1,1", "lambda": [4]}"#)).unwrap_err();
    assert!(err.to_string().contains("gamma"));
}

#[test]
fn budget_overflow_exits_with_four() {
    let out = bin(&["riesz", "--domain", "box:1,1,1", "--gamma", "1", "--lambda", "1e9"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Weyl estimate"));

    let out = bin(&[
        "riesz", "--domain", "box:1,1", "--gamma", "1", "--lambda", "1e4", "--budget", "100",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(CliError::Lab(LabError::NumericalFailure("x".into())).exit_code(), 3);
    assert_eq!(CliError::Lab(LabError::Precondition("x".into())).exit_code(), 2);
    assert_eq!(CliError::Validation("x".into()).exit_code(), 2);
    let io = CliError::Io {
        path: "p".into(),
        source: std::io::Error::other("x"),
    };
    assert_eq!(io.exit_code(), 1);
}

#[test]
fn stdout_carries_csv_and_out_writes_both_files() {
    let out = bin(&["riesz", "--domain", "box:1,1", "--gamma", "1", "--lambda", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("lambda,gamma,value\n"), "{stdout}");
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["config"]["domain"], "box:1,1");

    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("run");
    let prefix = prefix.to_str().unwrap();
    let out = bin(&[
        "riesz", "--domain", "box:1,1", "--gamma", "1", "--lambda", "50", "--out", prefix,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(format!("{prefix}.csv")).unwrap();
    assert_eq!(csv, stdout);
    let json: Value = serde_json::from_str(&std::fs::read_to_string(format!("{prefix}.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["tool"], "riesz-lab");
    assert_eq!(json["config"]["task"], "riesz");
}

#[test]
fn unwritable_output_exits_with_one() {
    let out = bin(&[
        "riesz",
        "--domain",
        "box:1,1",
        "--gamma",
        "1",
        "--lambda",
        "50",
        "--out",
        "/nonexistent/dir/run",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn reports_are_thread_count_invariant() {
    let configs = [
        r#"{"task": "excess", "family": "box2d:1..4", "gamma": 1, "lambda": {"min": 10, "max": 2000, "points": 12}, "points": 16}"#,
        r#"{"task": "optimize", "family": "box2d:1..6", "gamma": 1, "lambda": [1000], "points": 32}"#,
        r#"{"task": "critical", "family": "box2d:1..3", "gamma_grid": [0, 0.5, 1], "lambda": [100, 1000], "points": 8}"#,
        r#"{"task": "multicomp", "gamma": 1, "lambda": [1000], "candidates": [{"domain": "box:1,1", "base_lambda": 100}]}"#,
    ];
    for text in configs {
        let mut c = config(text);
        let mut outputs = Vec::new();
        for threads in [1, 2, 8] {
            c.threads = Some(threads);
            let r = run(&c).unwrap();
            outputs.push((r.to_csv(), r.provenance.config_hash.clone()));
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{text}");
    }
}

#[test]
fn every_task_runs() {
    let configs = [
        r#"{"task": "weyl", "domain": "box:1,1", "gamma": 1, "lambda": {"min": 100, "max": 10000, "points": 8}}"#,
        r#"{"task": "bly", "domain": "ball:0.7@3", "bc": "neumann", "lambda": [50, 500]}"#,
        r#"{"task": "margin", "family": "box2d:1..3", "gamma": 1, "lambda": [100, 1000], "points": 6}"#,
        r#"{"task": "scan", "family": "box2d:1..4", "gamma": 1, "lambda": [100, 1000], "points": 16}"#,
    ];
    for text in configs {
        let c = config(text);
        let task = c.task.unwrap();
        let r = run(&c).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!(!r.rows.is_empty(), "{}", task.name());
        assert_eq!(r.config.task, Some(task));
        assert!(r.to_csv().lines().all(|l| l.split(',').count() >= r.columns.len()));
    }
    assert_eq!(Task::Scan.name(), "scan");
}
