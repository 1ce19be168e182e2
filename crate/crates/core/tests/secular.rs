use dipole_squeeze::liouville::{OmegaGrid, DEFAULT_PHASE};
use dipole_squeeze::motion::{
    averaged_drift, averaged_noise_correlation, averaged_noise_weight, integrate_moments,
    integrate_periodic_moments, langevin_output_spectrum, secular_average, LinearLangevinModel,
    PeriodicCorrection,
};
use dipole_squeeze::opa::{analytic_spectrum, motion_scaled, MotionParams};
use dipole_squeeze::system::SystemParams;
use num_complex::Complex64;

fn setup(k_qbar: f64, nu: f64) -> (LinearLangevinModel, PeriodicCorrection) {
    let p = SystemParams::fig3();
    let motion = MotionParams::with_default_phases(nu, k_qbar).unwrap();
    let corr = PeriodicCorrection::for_system(&p, 0.5, motion).unwrap();
    let detuning = corr.theta - motion_scaled(corr.theta, k_qbar);
    (LinearLangevinModel::parametric(0.5, detuning, 1.0, 0.0).unwrap(), corr)
}

#[test]
fn averaged_moments_track_the_periodic_equations() {
    let (m, corr) = setup(0.3, 1250.0);
    let z = Complex64::new(1.0, 0.5);
    let a0 = [z, z.conj()];
    let t_end = 4.0;
    let periodic = integrate_periodic_moments(&m, &corr, a0, t_end, 200);
    let averaged = integrate_moments(&averaged_drift(&m, &corr).unwrap(), a0, t_end, 20_000);
    let frozen = integrate_moments(&m, a0, t_end, 20_000);
    let err = (periodic[0] - averaged[0]).norm().max((periodic[1] - averaged[1]).norm());
    let effect = (frozen[0] - averaged[0]).norm();
    // the averaged drift captures the bulk of what the vibration does
    assert!(err <= 0.1 * effect, "err {err:e} vs motion effect {effect:e}");
    assert!((periodic[1] - periodic[0].conj()).norm() <= 1e-12);
}

#[test]
fn triangle_correlation_integrates_to_white_noise_weight() {
    let kappa_prime = 1.3;
    for period in [0.01, 0.1, 1.0] {
        // exact for a piecewise-linear integrand sampled on its kinks
        let n = 2000;
        let h = 2.0 * period / n as f64;
        let t_prime = 0.37;
        let mut sum = 0.0;
        for i in 0..=n {
            let t = t_prime - period + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * averaged_noise_correlation(t, t_prime, period, kappa_prime).unwrap();
        }
        let integral = sum * h;
        assert!((integral - averaged_noise_weight(kappa_prime)).abs() <= 1e-10);
        let peak = averaged_noise_correlation(t_prime, t_prime, period, kappa_prime).unwrap();
        assert!((peak - 2.0 * kappa_prime / period).abs() <= 1e-12 * peak);
    }
}

#[test]
fn secular_spectrum_is_continuous_in_amplitude() {
    let grid = OmegaGrid::default();
    let compensated = LinearLangevinModel::parametric(0.5, 0.0, 1.0, 0.0).unwrap();
    let mut prev: Option<Vec<f64>> = None;
    for i in 0..=8 {
        let k = 0.05 * i as f64;
        let (_, corr) = setup(k, 1250.0);
        let avg = secular_average(&compensated, &corr).unwrap();
        let s: Vec<f64> = langevin_output_spectrum(&avg, DEFAULT_PHASE, &grid)
            .unwrap()
            .values()
            .collect();
        if let Some(p) = &prev {
            let step = s.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(step <= 0.01, "k_qbar={k}: jump {step}");
        }
        prev = Some(s);
    }
}

#[test]
fn averaged_model_is_the_reduced_gain_amplifier() {
    let grid = OmegaGrid::default();
    let (m, corr) = setup(0.3, 1250.0);
    let compensated = LinearLangevinModel::parametric(0.5, 0.0, 1.0, 0.0).unwrap();
    let avg = secular_average(&compensated, &corr).unwrap();
    let oracle = langevin_output_spectrum(&avg, DEFAULT_PHASE, &grid).unwrap();
    let exact = analytic_spectrum(0.4775, 1.0, 1.0, &grid).unwrap();
    for (a, b) in oracle.values().zip(exact.values()) {
        assert!((a - b).abs() <= 1e-12);
    }
    // raw average of a light-shift-compensated drift lands on the same model
    let raw = averaged_drift(&m, &corr).unwrap();
    assert!((raw.alpha() - 0.4775).abs() <= 1e-14);
    assert!(raw.detuning().abs() <= 1e-12);
}

#[test]
fn vibration_enlarges_the_stable_region() {
    let (_, corr) = setup(0.3, 1250.0);
    let above = LinearLangevinModel::parametric(1.02, 0.0, 1.0, 0.0).unwrap();
    assert!(!above.is_stable());
    assert!(secular_average(&above, &corr).unwrap().is_stable());
}
