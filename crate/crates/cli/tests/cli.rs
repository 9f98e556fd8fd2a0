//! Config parsing, record serialization, and process-level behavior.

use std::process::Command;

use dsigma_cli::config::{parse_config, HamiltonianConfig, Task};
use dsigma_cli::record::{to_csv, to_json, RunRecord};
use dsigma_cli::tasks;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dsigma"))
}

fn scratch_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "dsigma-cli-test-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const MINIMAL: &str = r#"{
  "n": 2,
  "spectrum": { "values": [1.0, 0.0], "multiplicities": [1, 1] },
  "hamiltonian": "pauli-z",
  "time": { "t_final": 3.1415926, "steps": 1000 },
  "task": "evolve"
}"#;

#[test]
fn minimal_config_parses_with_defaults() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.n, 2);
    assert_eq!(cfg.hbar, 1.0);
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.task, Task::Evolve);
    assert!(matches!(cfg.hamiltonian, HamiltonianConfig::Preset(ref p) if p == "pauli-z"));
}

#[test]
fn invalid_spectrum_is_a_named_validation_error() {
    let text = MINIMAL.replace("[1.0, 0.0]", "[0.6, 0.6]");
    let cfg = parse_config(&text).unwrap();
    let err = cfg.build_spectrum().unwrap_err();
    assert_eq!(err.field, "spectrum");
}

#[test]
fn unknown_key_is_rejected_citing_the_key() {
    let text = MINIMAL.replace("\"task\"", "\"hbarr\": 2.0,\n  \"task\"");
    let err = parse_config(&text).unwrap_err();
    assert!(err.contains("hbarr"), "message: {err}");
}

#[test]
fn qsl_preset_saturates_mandelstam_tamm() {
    let text = r#"{
      "n": 2,
      "spectrum": { "values": [1.0, 0.0], "multiplicities": [1, 1] },
      "hamiltonian": "pauli-x",
      "time": { "t_final": 1.5707963267948966, "steps": 400 },
      "task": "qsl"
    }"#;
    let record = tasks::run(&parse_config(text).unwrap()).unwrap();
    let ratio = record.outputs["saturation_ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-6, "saturation ratio {ratio}");
}

#[test]
fn orbit_info_reports_dimension() {
    let text = r#"{
      "n": 3,
      "spectrum": { "values": [0.5, 0.3, 0.2], "multiplicities": [1, 1, 1] },
      "hamiltonian": { "random": { "seed": 1 } },
      "task": "orbit-info"
    }"#;
    let record = tasks::run(&parse_config(text).unwrap()).unwrap();
    assert_eq!(record.outputs["dimension"], 6);
    assert_eq!(record.outputs["tangent_basis_size"], 6);
}

#[test]
fn json_record_round_trips() {
    let record = tasks::run(&parse_config(MINIMAL).unwrap()).unwrap();
    let text = to_json(&record);
    let back: RunRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, record);
}

#[test]
fn csv_has_schema_header_and_documented_columns() {
    let record = tasks::run(&parse_config(MINIMAL).unwrap()).unwrap();
    let csv = to_csv(&record);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "#schema=1");
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,re_rho_0_0,im_rho_0_0,"));
    assert!(header.ends_with("energy,delta_h"));
    assert_eq!(lines.count(), 1001);
}

#[test]
fn exit_code_1_on_validation_failure() {
    let dir = scratch_dir();
    let path = dir.join("bad.json");
    std::fs::write(&path, MINIMAL.replace("[1.0, 0.0]", "[0.6, 0.6]")).unwrap();
    let out = bin().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectrum"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_code_2_on_numerical_failure() {
    // an open trajectory has no holonomy; the phase task must fail with 2
    let dir = scratch_dir();
    let path = dir.join("open.json");
    let text = MINIMAL
        .replace("\"task\": \"evolve\"", "\"task\": \"phase\"")
        .replace("pauli-z", "pauli-x")
        .replace("3.1415926", "1.0");
    std::fs::write(&path, text).unwrap();
    let out = bin().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_override_changes_the_record() {
    let dir = scratch_dir();
    let path = dir.join("dist.json");
    std::fs::write(
        &path,
        r#"{
          "n": 2,
          "spectrum": { "values": [0.7, 0.3], "multiplicities": [1, 1] },
          "hamiltonian": "pauli-x",
          "seed": 4,
          "task": "distance"
        }"#,
    )
    .unwrap();
    let run = |extra: &[&str]| {
        let out = bin().args(["run", "--config"]).arg(&path).args(extra).output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let base = run(&[]);
    assert_eq!(base, run(&[]), "same config must be byte-identical");
    assert_ne!(base, run(&["--seed", "5"]));
    std::fs::remove_dir_all(&dir).ok();
}
