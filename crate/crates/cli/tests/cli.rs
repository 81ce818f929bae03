use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn otwire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otwire"))
        .args(args)
        .env_remove("OTWIRE_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = otwire(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn simulate_decodes_every_provisioned_trial() {
    let v = json(&["simulate", "--eps1", "0.5", "--eps2", "0.5", "--n", "2000", "--rate", "0.2", "--trials", "50"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "simulate");
    assert_eq!(v["decode_failures"], 0);
    assert!(v["provisioned"].as_u64().unwrap() > 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 50);
}

#[test]
fn nonpositive_rate_is_a_usage_error() {
    assert_eq!(code(&otwire(&["simulate", "--rate", "0"])), 2);
    assert_eq!(code(&otwire(&["simulate", "--rate=-0.1"])), 2);
}

#[test]
fn unknown_flag_is_a_usage_error_and_help_is_not() {
    assert_eq!(code(&otwire(&["simulate", "--frobnicate"])), 2);
    assert_eq!(code(&otwire(&["--help"])), 0);
}

#[test]
fn regime_without_one_privacy_is_rejected() {
    assert_eq!(code(&otwire(&["simulate", "--regime", "mixed"])), 2);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = ["simulate", "--n", "400", "--trials", "20", "--seed", "9", "--format", "csv"];
    let a = otwire(&args);
    let b = otwire(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["leakage", "--n", "5", "--eps2", "0.75"];
    let run = |w: &str| {
        Command::new(env!("CARGO_BIN_EXE_otwire")).args(args).env("OTWIRE_WORKERS", w).output().unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&run("zero")), 2);
}

#[test]
fn capacity_at_the_symmetric_point() {
    let v = json(&["capacity", "--eps1", "0.5", "--eps2", "0.5"]);
    let p = &v["points"][0];
    assert!((p["c2p"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((p["c1p"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn capacity_vanishes_without_bob_erasures() {
    let v = json(&["capacity", "--eps1", "0.3", "--eps2", "0"]);
    let p = &v["points"][0];
    assert_eq!(p["c2p"].as_f64().unwrap(), 0.0);
    assert_eq!(p["c1p"].as_f64().unwrap(), 0.0);
}

#[test]
fn capacity_grid_has_one_row_per_point() {
    let out = otwire(&["capacity", "--steps", "100", "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().get(0), Some("schema_version"));
    assert_eq!(rdr.records().count(), 101 * 101);
}

#[test]
fn capacity_out_of_range_is_rejected() {
    assert_eq!(code(&otwire(&["capacity", "--eps1", "1.5"])), 2);
}

#[test]
fn bounds_of_the_erasure_pair() {
    let v = json(&["bounds", "--eps1", "0.5", "--eps2", "0.5"]);
    assert!((v["c2p_bound"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert!(v["c2p_bound"].as_f64().unwrap() >= v["closed_form"]["c2p"].as_f64().unwrap() - 1e-9);
    assert!(v["c1p_bound"].as_f64().unwrap() >= v["closed_form"]["c1p"].as_f64().unwrap() - 1e-9);
}

#[test]
fn exact_leakage_hides_the_choice_from_alice() {
    let v = json(&["leakage", "--method", "exact", "--n", "6", "--eps1", "0.5", "--eps2", "0.75"]);
    assert_eq!(v["report"]["method"], "exact-enumeration");
    assert!(v["report"]["i_c_given_aliceview"].as_f64().unwrap() < 1e-9);
}

#[test]
fn monte_carlo_leakage_is_small_when_eve_sees_nothing() {
    let v = json(&[
        "leakage", "--method", "mc", "--n", "200", "--rate", "0.05", "--eps1", "0.5", "--eps2", "1", "--trials", "1000",
    ]);
    let r = &v["report"];
    for key in ["i_kcbar_given_bob_eve", "i_kcbar_given_bob"] {
        assert!(r[key].as_f64().unwrap() < 0.05, "{key} = {}", r[key]);
    }
}

#[test]
fn oversized_exact_leakage_is_a_resource_error() {
    let out = otwire(&["leakage", "--method", "exact", "--n", "30"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn code_entropy_rejects_beta_out_of_range() {
    assert_eq!(code(&otwire(&["code-entropy", "--beta", "0.5"])), 2);
}

#[test]
fn code_entropy_with_no_codes_is_empty() {
    let v = json(&["code-entropy", "--codes", "0"]);
    assert_eq!(v["codes_tested"], 0);
    assert_eq!(v["pass_fraction"].as_f64().unwrap(), 1.0);
}

#[test]
fn code_entropy_small_run_passes() {
    let v = json(&["code-entropy", "--codes", "10", "--subsets", "10"]);
    assert!(v["pass_fraction"].as_f64().unwrap() >= 0.9);
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "format = \"json\"\n[capacity]\neps1 = 0.2\neps2 = 0.8\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = json(&["--config", cfg, "capacity"]);
    assert_eq!(from_file["points"][0]["eps1"].as_f64().unwrap(), 0.2);
    assert_eq!(from_file["points"][0]["eps2"].as_f64().unwrap(), 0.8);

    let overridden = json(&["--config", cfg, "capacity", "--eps1", "0.7"]);
    assert_eq!(overridden["points"][0]["eps1"].as_f64().unwrap(), 0.7);
    assert_eq!(overridden["points"][0]["eps2"].as_f64().unwrap(), 0.8);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(&cfg, r#"{"capacity": {"epsilon": 0.2}}"#).unwrap();
    assert_eq!(code(&otwire(&["--config", cfg.to_str().unwrap(), "capacity"])), 2);
}

#[test]
fn output_goes_to_the_named_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap.json");
    let out = otwire(&["capacity", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
}

fn capture(dir: &Path) -> std::path::PathBuf {
    let record = dir.join("run.json");
    let out = otwire(&[
        "simulate", "--n", "500", "--trials", "3", "--seed", "4", "--capture-trial", "2", "--capture-out",
        record.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    record
}

#[test]
fn captured_run_replays() {
    let dir = tempfile::tempdir().unwrap();
    let record = capture(dir.path());
    let v = json(&["replay", "--record", record.to_str().unwrap()]);
    assert_eq!(v["transcript_matches"], true);
}

#[test]
fn tampered_record_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let record = capture(dir.path());
    let mut v: Value = serde_json::from_slice(&std::fs::read(&record).unwrap()).unwrap();
    let seed = v["params"]["seed"].as_u64().unwrap();
    v["params"]["seed"] = (seed + 1).into();
    std::fs::write(&record, serde_json::to_vec(&v).unwrap()).unwrap();
    let out = otwire(&["replay", "--record", record.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}
