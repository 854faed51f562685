//! Config validation, the binary's exit codes and its output files.

use std::path::Path;
use std::process::Command as Process;

use cmvlab_cli::config::{CommandList, ComplexValue};
use cmvlab_cli::output::csv_body_of;
use cmvlab_cli::run::{execute, run, RunOptions};
use cmvlab_cli::{validate_config, Command, ConfigError, Format};
use serde_json::Value;

fn cmvlab(config: &str, dir: &Path, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = Process::new(env!("CARGO_BIN_EXE_cmvlab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("CMVLAB_OUT")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn empty_object_lists_required_fields() {
    match validate_config("{}") {
        Err(ConfigError::Missing { fields }) => assert_eq!(fields, ["command", "model"]),
        other => panic!("expected missing fields, got {other:?}"),
    }
}

#[test]
fn minimal_config_gets_defaults() {
    let cfg = validate_config(r#"{"command": "lyapunov-scan", "model": "strong-coupling"}"#).unwrap();
    assert_eq!(cfg.command, CommandList::One(Command::LyapunovScan));
    assert_eq!(cfg.beta, ComplexValue::Real(1.0));
    assert_eq!(cfg.eta, ComplexValue::Real(1.0));
    assert_eq!(cfg.tau, 0.3);
    assert_eq!(cfg.seed, 0);
}

#[test]
fn unknown_keys_are_named() {
    let err = validate_config(r#"{"command": "ldt", "model": "zero", "alpha_typo": 1}"#).unwrap_err();
    assert_eq!(err.field_path().as_deref(), Some("alpha_typo"));
}

#[test]
fn bad_values_report_their_path() {
    let err = validate_config(r#"{"command": "ldt", "model": "zero", "tau": 1.5}"#).unwrap_err();
    assert_eq!(err.field_path().as_deref(), Some("tau"));
    let err = validate_config(r#"{"command": "spectral-soup", "model": "zero"}"#).unwrap_err();
    assert_eq!(err.field_path().as_deref(), Some("command"));
    assert!(matches!(validate_config("{\"command\": "), Err(ConfigError::Syntax { .. })));
}

#[test]
fn walk_commands_need_coins() {
    let inline = r#"{"command": "qwalk-gauge", "model": {"d": 2, "alpha": {"terms": [{"k": [1, 0], "re": 0.3}]}}}"#;
    assert!(validate_config(inline).is_err());
}

#[test]
fn free_scan_has_zero_exponents() {
    let cfg = validate_config(
        r#"{"command": "lyapunov-scan", "model": "zero", "z": {"points": 16}, "n": 100, "samples": 16}"#,
    )
    .unwrap();
    let out = execute(Command::LyapunovScan, &cfg).unwrap();
    let means = out.tables[0].column_values("mean");
    assert_eq!(means.len(), 16);
    assert!(means.iter().all(|&m| m.abs() < 1e-14), "{means:?}");
}

#[test]
fn identity_walk_is_exactly_gauge_equivalent() {
    let cfg = validate_config(r#"{"command": "qwalk-equiv", "model": "zero", "window": [-128, 127]}"#).unwrap();
    let out = execute(Command::QwalkEquiv, &cfg).unwrap();
    let residual = out.tables[0].column_values("residual");
    assert!(!residual.is_empty() && residual.iter().all(|&r| r < 1e-14), "{residual:?}");
}

#[test]
fn successful_run_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"command": ["lyapunov-scan", "spectrum"], "model": "strong-coupling", "z": {"points": 4},
                     "n": 32, "samples": 16, "interval": [0, 15]}"#;
    let (code, stdout) = cmvlab(config, dir.path(), &["--seed", "7", "--threads", "2"]);
    assert_eq!(code, 0);
    let out = dir.path().join("out");
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "lyapunov-scan+spectrum");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert!(manifest["tool_version"].as_str().unwrap().starts_with("cmvlab "));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), stdout.lines().count());
    for path in outputs {
        let text = std::fs::read_to_string(path.as_str().unwrap()).unwrap();
        let mut lines = text.lines();
        // provenance line carries the resolved config
        let provenance: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
        assert_eq!(provenance["config"]["seed"], 7);
        assert_eq!(provenance["config"]["tau"], 0.3);
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        let documented = text.lines().skip(1).take_while(|l| l.starts_with('#')).count();
        assert_eq!(documented, header.split(',').count());
    }
    assert!(!out.join("error.json").exists());
}

#[test]
fn json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"command": "lyapunov-scan", "model": "constant-half", "z": {"thetas": [0.0]}, "n": 200, "samples": 4}"#;
    let (code, _) = cmvlab(config, dir.path(), &["--format", "json"]);
    assert_eq!(code, 0);
    let doc = read_json(&dir.path().join("out/lyapunov_scan.json"));
    let mean_col = doc["columns"].as_array().unwrap().iter().position(|c| c["name"] == "mean").unwrap();
    let mean = doc["rows"][0][mean_col].as_f64().unwrap();
    assert!((mean - 3f64.sqrt().ln()).abs() < 0.005);
}

#[test]
fn env_var_overrides_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"command": "qwalk-gauge", "model": "hadamard", "window": [-8, 7]}"#).unwrap();
    let status = Process::new(env!("CARGO_BIN_EXE_cmvlab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("flag"))
        .env("CMVLAB_OUT", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(dir.path().join("env/manifest.json").exists());
    assert!(!dir.path().join("flag").exists());
}

#[test]
fn command_argument_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = cmvlab(
        r#"{"command": "ldt", "model": "hadamard", "window": [-8, 7]}"#,
        dir.path(),
        &["qwalk-gauge"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("qwalk_gauge"), "{stdout}");
}

fn assert_failure(config: &str, code: i32, kind: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let (got, _) = cmvlab(config, dir.path(), &[]);
    assert_eq!(got, code, "{config}");
    let record = read_json(&dir.path().join("out/error.json"));
    assert_eq!(record["status"], "error");
    assert_eq!(record["kind"], kind);
    assert_eq!(record["exit_code"], code);
    assert!(!dir.path().join("out/manifest.json").exists());
    record
}

#[test]
fn config_errors_exit_2() {
    let record = assert_failure("{}", 2, "config");
    assert_eq!(record["field"], "command,model");
    let record = assert_failure(r#"{"command": "ldt", "model": "zero", "alpha_typo": 1}"#, 2, "config");
    assert_eq!(record["field"], "alpha_typo");
}

#[test]
fn model_violations_exit_3() {
    let record = assert_failure(
        r#"{"command": "lyapunov-scan", "model": {"d": 2, "alpha": {"terms": [{"k": [0, 0], "re": 1.2}]}}}"#,
        3,
        "model-violation",
    );
    assert_eq!(record["command"], "lyapunov-scan");
    assert_failure(r#"{"command": "spectrum", "model": "zero", "beta": 2.0, "n": 10}"#, 3, "model-violation");
}

#[test]
fn numerical_failures_exit_4() {
    // the free model has no Green's function decay to measure
    assert_failure(r#"{"command": "green-decay", "model": "zero", "n": 10}"#, 4, "numerical");
}

#[test]
fn runs_are_reproducible_in_process() {
    let cfg = validate_config(
        r#"{"command": ["ldt", "visits"], "model": "strong-coupling", "z": {"thetas": [0.7]},
            "n_list": [10, 20], "samples": 200, "orbit_lengths": [100, 1000], "tau": 0.35}"#,
    )
    .unwrap();
    let bodies = |dir: &Path| {
        let m = run(&cfg, &RunOptions { out_dir: dir.to_path_buf(), format: Format::Csv }).unwrap();
        m.outputs
            .iter()
            .map(|p| csv_body_of(&std::fs::read_to_string(p).unwrap()))
            .collect::<Vec<_>>()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(bodies(a.path()), bodies(b.path()));
}
