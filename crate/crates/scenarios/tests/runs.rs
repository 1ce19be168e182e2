use std::fs;

use dipole_squeeze::{Error, SystemParams};
use dipole_squeeze_scenarios::config::Outputs;
use dipole_squeeze_scenarios::{run_scenario, Output, RunOptions, ScenarioConfig, ScenarioError, Stage};

/// The fig3 couplings with a faster cavity and atomic damping, so a small
/// cutoff suffices.
fn light(name: &str, n_max: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(
        name,
        SystemParams {
            kappa: 2.0,
            gamma: 1000.0,
            n_max,
            ..SystemParams::fig3()
        },
    );
    cfg.grid = "-4:4:17".parse().unwrap();
    cfg
}

#[test]
fn writes_declared_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = light("light", 8);
    let summary = run_scenario(&cfg, &RunOptions::new(dir.path())).unwrap();
    let names: Vec<String> = summary
        .files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        ["light_spectrum.csv", "light_steady.csv", "light_coefficients.csv", "light_validity.csv"]
    );

    let spectrum = fs::read_to_string(dir.path().join("light_spectrum.csv")).unwrap();
    let header = spectrum.lines().next().unwrap();
    assert_eq!(
        header,
        "omega_over_kappa0,numeric_full[gamma=1000],analytic_opa[gamma_prime=0.1],numeric_full_imag_residue"
    );
    assert_eq!(spectrum.lines().count(), 18);

    let manifest = fs::read_to_string(&summary.manifest).unwrap();
    for needle in [
        "scenario = light",
        "code_version = dipole-squeeze-scenarios",
        "wall_time_s = ",
        "steady_residual = 1e-10",
        "top_sector_population = 1e-6",
        "kappa = 2 kappa0",
        "n_max = 8",
        "gamma_prime_prefactor = 1",
        "light_validity.csv",
    ] {
        assert!(manifest.contains(needle), "manifest lacks `{needle}`:\n{manifest}");
    }
}

#[test]
fn numeric_and_analytic_columns_are_close() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = light("close", 8);
    cfg.outputs = [Output::Spectrum, Output::Steady].into_iter().collect();
    run_scenario(&cfg, &RunOptions::new(dir.path())).unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("close_spectrum.csv")).unwrap();
    for rec in rdr.records() {
        let r = rec.unwrap();
        let full: f64 = r[1].parse().unwrap();
        let opa: f64 = r[2].parse().unwrap();
        let residue: f64 = r[3].parse().unwrap();
        // the fourth-order gain overestimates the numeric one by a few percent
        assert!((full - opa).abs() < 0.08, "{r:?}");
        assert!(residue.abs() < 1e-8);
    }
    let steady = fs::read_to_string(dir.path().join("close_steady.csv")).unwrap();
    assert!(steady.starts_with("quantity,numeric_full,analytic_opa\nmean_photon_number,"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = light("again", 8);
    cfg.motion = Some(dipole_squeeze::MotionParams::with_default_phases(1250.0, 0.2).unwrap());
    run_scenario(&cfg, &RunOptions::new(a.path())).unwrap();
    run_scenario(&cfg, &RunOptions::new(b.path())).unwrap();
    for f in ["spectrum", "steady", "coefficients", "validity"] {
        let name = format!("again_{f}.csv");
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
    }
    let spectrum = fs::read_to_string(a.path().join("again_spectrum.csv")).unwrap();
    assert!(spectrum
        .lines()
        .next()
        .unwrap()
        .contains("analytic_motion[k_qbar=0.2],langevin_oracle[secular;k_qbar=0.2]"));
}

#[test]
fn analytic_outputs_skip_the_master_equation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = light("coeffs", 40);
    cfg.params = SystemParams::fig4();
    cfg.params.n_max = 40;
    cfg.outputs = [Output::Coefficients, Output::Validity].into_iter().collect();
    // n_max = 40 would need gigabytes if the Liouvillian were built
    run_scenario(&cfg, &RunOptions::new(dir.path())).unwrap();
    let text = fs::read_to_string(dir.path().join("coeffs_coefficients.csv")).unwrap();
    assert!(text.contains("regime,mixed"));
    assert!(text.contains("alpha_bar,50"));
}

#[test]
fn small_cutoff_is_reported_with_scenario_and_stage() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new("tight", SystemParams { n_max: 3, ..SystemParams::fig3() });
    cfg.outputs = Outputs::only(Output::Steady);
    let err = run_scenario(&cfg, &RunOptions::new(dir.path())).unwrap_err();
    assert_eq!(err.scenario(), "tight");
    assert_eq!(err.stage(), Stage::Truncation);
    assert!(matches!(err.library(), Some(Error::TruncationInsufficient { .. })));
    let msg = err.to_string();
    assert!(msg.contains("tight") && msg.contains("truncation"), "{msg}");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0, "nothing written on failure");
}

#[test]
fn invalid_config_is_rejected_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = light("bad", 8);
    cfg.params.kappa = f64::NAN;
    let err = run_scenario(&cfg, &RunOptions::new(dir.path())).unwrap_err();
    assert!(matches!(err, ScenarioError::Config { .. }));
    assert_eq!(err.stage(), Stage::Config);
}
