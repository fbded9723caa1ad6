use emergence_core::harness::*;
use std::path::Path;
use std::process::Command;

fn small_langevin(out: &Path, seed: u64) -> RunManifest {
    let cfg = ExperimentConfig::new(
        Experiment::Langevin,
        [("n-traj", "2000"), ("t-end", "2.01"), ("km-bins", "10")],
        seed,
        out,
    )
    .unwrap();
    run_experiment(&cfg).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emergence"))
}

#[test]
fn langevin_manifest_records_output_digests() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_langevin(dir.path(), 3);
    let digest = m.digest_of("km_coefficients.csv").expect("csv digest recorded");
    let bytes = std::fs::read(dir.path().join("km_coefficients.csv")).unwrap();
    assert_eq!(digest, sha256_hex(&bytes));
    assert_eq!(m.experiment, "langevin");
    assert_eq!(m.config.get("n-traj").map(String::as_str), Some("2000"));
    assert_eq!(m.config.get("diffusion").map(String::as_str), Some("0.5"));
    let path = write_manifest(&m, true).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(json["seed"], 3);
    assert!(json["outputs"].as_array().unwrap().iter().any(|o| o["file"] == "km_coefficients.csv"));
}

#[test]
fn reruns_reproduce_every_output_byte() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = small_langevin(a.path(), 11);
    let mb = small_langevin(b.path(), 11);
    assert!(!ma.outputs.is_empty());
    assert_eq!(ma.outputs, mb.outputs);
    let c = tempfile::tempdir().unwrap();
    let mc = small_langevin(c.path(), 12);
    assert_ne!(ma.digest_of("km_coefficients.csv"), mc.digest_of("km_coefficients.csv"));
}

#[test]
fn unknown_keys_are_usage_errors() {
    let e = ExperimentConfig::new(Experiment::Langevin, [("foo", "1")], 0, "out").unwrap_err();
    assert!(e.is_usage());
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("foo"), "{e}");
    let e = ConfigFile::parse("[langevin]\nfoo = 1\n").unwrap_err();
    assert!(e.is_usage() && e.to_string().contains("foo"));
}

#[test]
fn malformed_values_are_rejected() {
    for (k, v) in [("n-traj", "many"), ("dt", "-"), ("drift", "sideways")] {
        let r = ExperimentConfig::new(Experiment::Langevin, [(k, v)], 0, "out").and_then(|c| {
            let dir = tempfile::tempdir().unwrap();
            run_experiment(&ExperimentConfig { out_dir: dir.path().into(), ..c })
        });
        assert!(r.is_err(), "{k} = {v}");
    }
}

#[test]
fn config_file_grammar() {
    let cfg = ConfigFile::parse(
        "# run settings\nseed = 42\nout_dir = results\nexperiment = path-mc\n\n[path-mc]\nhbar = 0.5 # halved\nn-slices = 32\n",
    )
    .unwrap();
    assert_eq!(cfg.seed, Some(42));
    assert_eq!(cfg.out_dir.as_deref(), Some("results"));
    assert_eq!(cfg.experiment, Some(Experiment::PathMc));
    assert_eq!(cfg.section(Experiment::PathMc).len(), 2);
    assert!(cfg.section(Experiment::Langevin).is_empty());
    let e = ConfigFile::parse("seed = 1\n[langevin\n").unwrap_err();
    assert!(e.to_string().contains("line 2"), "{e}");
}

#[test]
fn every_parameter_default_resolves() {
    for exp in Experiment::ALL {
        let p = Params::resolve(exp, []).unwrap();
        for spec in param_specs(exp) {
            assert_eq!(p.raw(spec.key), spec.default, "{} {}", exp.name(), spec.key);
        }
    }
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["langevin", "--bogus", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[langevin]\nfoo = 1\n").unwrap();
    let out = bin().args(["langevin", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));

    std::fs::write(&cfg, "experiment = classical\n").unwrap();
    let out = bin().args(["langevin", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // An invalid physical parameter is a module error, not a usage error.
    let out = bin()
        .args(["langevin", "--diffusion=-1", "--out-dir"])
        .arg(dir.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_runs_with_config_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out_dir = dir.path().join("fp");
    std::fs::write(
        &cfg,
        format!(
            "seed = 5\nout_dir = {}\n[fokker-planck]\ngrid = -3:3:60\nsteps = 100\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = bin()
        .args(["fokker-planck", "--json-manifest", "--steps", "50", "--config"])
        .arg(&cfg)
        .env_remove("EMERGENCE_OUT_DIR")
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("PASS mass_conservation"), "{stdout}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 5);
    assert_eq!(json["config"]["steps"], "50");
    assert_eq!(json["config"]["grid"], "-3:3:60");
    assert!(out_dir.join("density.csv").exists());
}

#[test]
fn failing_check_exits_with_one() {
    // A coarse leapfrog step breaks the energy tolerance.
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["classical", "--dt", "0.2", "--hj-grid", "6x6", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("FAIL energy"), "{stdout}");
}

fn pipeline(overrides: &[(&str, &str)], out: &Path) -> RunManifest {
    let mut all = vec![("n-traj", "4000"), ("sweeps", "8000")];
    all.extend_from_slice(overrides);
    run_experiment(&ExperimentConfig::new(Experiment::Pipeline, all, 1, out).unwrap()).unwrap()
}

fn status(m: &RunManifest) -> Vec<StageStatus> {
    m.stages.iter().map(|s| s.status).collect()
}

#[test]
fn pipeline_passes_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let m = pipeline(&[], dir.path());
    assert_eq!(status(&m), vec![StageStatus::Passed; 5], "{}", m.to_text());
    assert!(m.passed());
    for file in ["1_hj_residual.csv", "2_action_moments.csv", "3_crosscheck.csv", "4_correlator.csv", "5_os_report.csv"] {
        assert!(m.digest_of(file).is_some(), "{file}");
    }
}

#[test]
fn noiseless_pipeline_skips_the_stochastic_stages() {
    let dir = tempfile::tempdir().unwrap();
    let m = pipeline(&[("hbar", "0")], dir.path());
    use StageStatus::*;
    assert_eq!(status(&m), vec![Passed, Passed, Skipped, Skipped, Passed], "{}", m.to_text());
    assert!(m.stages[2].reason.contains("hbar = 0"));
    assert!(m.passed());
}

#[test]
fn injected_fault_fails_its_stage_and_skips_dependants() {
    let dir = tempfile::tempdir().unwrap();
    let m = pipeline(&[("inject-fault", "stochastic")], dir.path());
    use StageStatus::*;
    assert_eq!(status(&m), vec![Passed, Failed, Skipped, Passed, Passed], "{}", m.to_text());
    assert!(!m.passed());
    assert!(m.checks.iter().any(|c| c.name.starts_with("2-action/") && !c.passed));

    let dir = tempfile::tempdir().unwrap();
    let m = pipeline(&[("inject-fault", "os-check")], dir.path());
    assert_eq!(status(&m), vec![Passed, Passed, Passed, Passed, Failed], "{}", m.to_text());
}

#[test]
fn default_pipeline_entry_point_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let m = emergence_pipeline(2, dir.path()).unwrap();
    assert_eq!(m.experiment, "pipeline");
    assert_eq!(m.stages.len(), 5);
    assert!(dir.path().join("manifest.json").exists());
}
