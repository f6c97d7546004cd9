use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use twistlab_cli::{
    run, Check, ExperimentConfig, HarnessError, Mode, RunManifest, RunOutcome, Suite, SuiteReport, CONFIG_FILE,
    MANIFEST_FILE,
};
use twistlab_core::hyperbolicity::GridSpec;

fn twistlab(args: &[&str], dir: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_twistlab")).args(args).current_dir(dir).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.in.json");
    std::fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips_through_json(
        mode in mode(),
        m in 2usize..6,
        epsilon in 0.01f64..0.5,
        exponents in prop::collection::vec(-5i64..=5, 2..4),
        nx in 1usize..300,
        ny in 1usize..300,
        seed in any::<u64>(),
        arc in 1e-4f64..0.2,
    ) {
        let mut cfg = ExperimentConfig::new(mode);
        cfg.m = m;
        cfg.epsilon = epsilon;
        cfg.exponents = exponents;
        cfg.grid = GridSpec { nx, ny };
        cfg.seed = seed;
        cfg.arc_length = arc;
        cfg.suite = Some(Suite::Ranks);
        let text = cfg.to_json();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let err = ExperimentConfig::from_json(r#"{"mode":"classify","exponent":[1,1]}"#).unwrap_err();
    assert!(matches!(err, HarnessError::Config(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn validation_names_every_bad_field() {
    let err = ExperimentConfig::from_json(r#"{"mode":"simulate","epsilon":2.0,"iterations":0}"#).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("`epsilon`") && msg.contains("`iterations`"), "{msg}");
}

#[test]
fn classify_identity_power_is_periodic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"mode":"classify","exponents":[1,1]}"#);
    let (code, _, err) = twistlab(&["classify", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("run/classification.json")).unwrap()).unwrap();
    assert_eq!(v, serde_json::json!({ "type": "Periodic" }));
}

#[test]
fn hf_rank_three_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"mode":"hf-rank","exponents":[3,3],"iterations":3}"#);
    let (code, _, err) = twistlab(&["hf-rank", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("run/hf_rank.csv")).unwrap();
    assert_eq!(csv, "n,rank\n1,1\n2,8\n3,55\n");
    let manifest: RunManifest = serde_json::from_slice(&std::fs::read(dir.path().join("run").join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.mode, Mode::HfRank);
    let names: Vec<&str> = manifest.outputs.iter().map(|o| o.name.as_str()).collect();
    assert!(names.contains(&CONFIG_FILE) && names.contains(&"hf_rank.csv"), "{names:?}");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"mode":"simulate","samples":2,"iterations":5,"seed":1}"#);
    for (seed, out) in [("1", "a"), ("1", "b"), ("2", "c")] {
        let (code, _, err) = twistlab(&["simulate", "--config", &cfg, "--seed", seed, "--out", out], dir.path());
        assert_eq!(code, 0, "{err}");
    }
    let read = |d: &str| std::fs::read(dir.path().join(d).join("orbits.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn rejections_and_bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write_config(dir.path(), r#"{"mode":"chain-rate","exponents":[1,1]}"#);
    let (code, _, err) = twistlab(&["chain-rate", "--config", &chain, "--out", "chain"], dir.path());
    assert_eq!(code, 2);
    assert!(err.contains("rejected"), "{err}");

    let (code, _, _) = twistlab(&["classify", "--config", &chain, "--out", "x"], dir.path());
    assert_eq!(code, 2, "mode mismatch");

    let bad = write_config(dir.path(), r#"{"mode":"simulate","m":1}"#);
    let (code, _, err) = twistlab(&["simulate", "--config", &bad], dir.path());
    assert_eq!(code, 2);
    assert!(err.contains("m must be at least 2"), "{err}");
}

#[test]
fn passing_verification_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"mode":"verify","suite":"ranks"}"#);
    let (code, out, err) = twistlab(&["verify", "--config", &cfg, "--out", "v"], dir.path());
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("suite,check,samples,value,tolerance,passed\n"), "{out}");
    assert!(out.contains("ranks,square-twist 2k,101,"), "{out}");
}

#[test]
fn failed_verification_maps_to_exit_one() {
    let cfg = ExperimentConfig::new(Mode::Classify);
    let dir = tempfile::tempdir().unwrap();
    let outcome = run(&cfg, dir.path()).unwrap();
    let report = SuiteReport {
        suite: "ranks".into(),
        checks: vec![Check { name: "x".into(), samples: 1, value: 1.0, tolerance: 0.5, passed: false }],
        counterexample: Some(serde_json::json!({ "k": 1 })),
    };
    let err = RunOutcome { manifest: outcome.manifest, report: Some(report) }.into_result().unwrap_err();
    assert_eq!(err.exit_code(), 1);
}
