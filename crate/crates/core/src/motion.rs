//! Linear Langevin description of the parametric regime, including the
//! period-averaged effect of atomic vibration in the trap.

use num_complex::Complex64;

use crate::error::{Error, Instability, Result};
use crate::liouville::{OmegaGrid, Provenance, SpectrumPoint, SpectrumSeries};
use crate::opa::{motion_scaled, EffectiveCoefficients, MotionParams};
use crate::system::{PatternLabel, SystemParams};

/// 2x2 complex matrix acting on `(a, a^dag)`.
pub type Mat2 = [[Complex64; 2]; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);
const CONJ_PAIR_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mat_add(a: &Mat2, b: &Mat2, scale: f64) -> Mat2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j] * scale;
        }
    }
    out
}

fn mat_vec(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Eigenvalues of a 2x2 matrix.
pub fn eigenvalues(m: &Mat2) -> [Complex64; 2] {
    let half_tr = (m[0][0] + m[1][1]) * 0.5;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (half_tr * half_tr - det).sqrt();
    [half_tr + disc, half_tr - disc]
}

/// `dA/dt = drift A + noise`, with vacuum inputs through the mirror (rate
/// `kappa`) and through emission-induced damping (rate `gamma_prime`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearLangevinModel {
    drift: Mat2,
    kappa: f64,
    gamma_prime: f64,
}

impl LinearLangevinModel {
    pub fn new(drift: Mat2, kappa: f64, gamma_prime: f64) -> Result<Self> {
        let pair = (drift[1][1] - drift[0][0].conj())
            .norm()
            .max((drift[1][0] - drift[0][1].conj()).norm());
        let scale = drift.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        if pair > CONJ_PAIR_TOL * scale {
            return Err(Error::invalid(
                "drift",
                "must couple (a, a^dag) as a conjugate pair",
            ));
        }
        if !(kappa >= 0.0) || !(gamma_prime >= 0.0) {
            return Err(Error::invalid("rates", "kappa and gamma' must be >= 0"));
        }
        Ok(Self {
            drift,
            kappa,
            gamma_prime,
        })
    }

    /// Parametric drift with gain `alpha`, total damping `kappa + gamma'`
    /// and residual detuning `theta - delta_c`.
    pub fn parametric(alpha: f64, detuning: f64, kappa: f64, gamma_prime: f64) -> Result<Self> {
        let kp = kappa + gamma_prime;
        let drift = [
            [c(-kp) - I * detuning, -I * alpha],
            [I * alpha, c(-kp) + I * detuning],
        ];
        Self::new(drift, kappa, gamma_prime)
    }

    pub fn drift(&self) -> &Mat2 {
        &self.drift
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    pub fn kappa_prime(&self) -> f64 {
        -self.drift[0][0].re
    }

    /// Parametric gain read back from the drift.
    pub fn alpha(&self) -> f64 {
        self.drift[1][0].im
    }

    /// `theta - delta_c` read back from the drift.
    pub fn detuning(&self) -> f64 {
        -self.drift[0][0].im
    }

    pub fn eigenvalues(&self) -> [Complex64; 2] {
        eigenvalues(&self.drift)
    }

    pub fn max_real_part(&self) -> f64 {
        let [a, b] = self.eigenvalues();
        a.re.max(b.re)
    }

    pub fn is_stable(&self) -> bool {
        self.max_real_part() < 0.0
    }
}

/// Drift of the fluctuation equations in the parametric regime.
pub fn build_drift(p: &SystemParams, eff: &EffectiveCoefficients) -> Result<LinearLangevinModel> {
    if p.geometry().label != PatternLabel::HalfLambda {
        log::warn!("drift built outside the half-wavelength pattern; linear drive ignored");
    }
    LinearLangevinModel::parametric(
        eff.alpha_bar,
        eff.theta_bar - p.delta_c,
        p.kappa,
        eff.gamma_prime,
    )
}

/// Oscillating part of the coefficients generated by atomic vibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicCorrection {
    pub v: Mat2,
    pub b: [Complex64; 2],
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub motion: MotionParams,
}

impl PeriodicCorrection {
    pub fn new(theta: f64, alpha: f64, beta: f64, motion: MotionParams) -> Result<Self> {
        motion.validate()?;
        let v = [
            [I * (theta / 2.0), I * (alpha / 2.0)],
            [-I * (alpha / 2.0), -I * (theta / 2.0)],
        ];
        Ok(Self {
            v,
            b: [-I * beta, I * beta],
            theta,
            alpha,
            beta,
            motion,
        })
    }

    /// `theta = 2 g^2 / Delta`, `beta = g Omega / Delta` and the parametric gain
    /// of the half-wavelength pattern.
    pub fn for_system(p: &SystemParams, alpha: f64, motion: MotionParams) -> Result<Self> {
        if p.delta == 0.0 {
            return Err(Error::invalid("delta", "must be nonzero"));
        }
        Self::new(2.0 * p.g * p.g / p.delta, alpha, p.g * p.omega / p.delta, motion)
    }

    fn k2q2(&self) -> f64 {
        self.motion.k_qbar * self.motion.k_qbar
    }

    /// `sum_j cos^2(nu t + phi_j)`.
    fn envelope(&self, t: f64) -> (f64, f64) {
        let c1 = (self.motion.nu * t + self.motion.phi1).cos();
        let c2 = (self.motion.nu * t + self.motion.phi2).cos();
        (c1 * c1, c2 * c2)
    }

    /// Spectral norm of `V`.
    pub fn v_norm(&self) -> f64 {
        0.5 * (self.theta.abs() + self.alpha.abs())
    }
}

/// `M + k^2 qbar^2 V`: the period average without touching the cavity detuning.
pub fn averaged_drift(model: &LinearLangevinModel, corr: &PeriodicCorrection) -> Result<LinearLangevinModel> {
    let drift = mat_add(model.drift(), &corr.v, corr.k2q2());
    LinearLangevinModel::new(drift, model.kappa(), model.gamma_prime())
}

/// Period-averaged model with `alpha -> alpha (1 - k^2 qbar^2/2)`. The light
/// shift is reduced by the same factor and the cavity detuning is moved along
/// with it, `delta_c -> delta_c + (theta~ - theta)`, so the residual detuning
/// `theta - delta_c` is unchanged.
pub fn secular_average(model: &LinearLangevinModel, corr: &PeriodicCorrection) -> Result<LinearLangevinModel> {
    let alpha = motion_scaled(model.alpha(), corr.motion.k_qbar);
    LinearLangevinModel::parametric(alpha, model.detuning(), model.kappa(), model.gamma_prime())
}

/// Sizes of the terms dropped by the averaging, each relative to `|alpha|/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DroppedTerms {
    /// Micromotion feeding back through the drift.
    pub c: f64,
    /// Second order in the vibration amplitude.
    pub d: f64,
    /// Rectified linear drive, at the worst phase difference.
    pub e: f64,
}

impl DroppedTerms {
    pub fn max(&self) -> f64 {
        self.c.max(self.d).max(self.e)
    }
}

pub fn dropped_terms(model: &LinearLangevinModel, corr: &PeriodicCorrection) -> DroppedTerms {
    let nu = corr.motion.nu;
    let half_alpha = 0.5 * corr.alpha.abs();
    let c = corr.theta.abs() * model.kappa_prime().max(model.detuning().abs()) / (8.0 * nu);
    let d = 1.5 * corr.k2q2() * corr.v_norm().powi(2) / nu;
    let e = corr.k2q2() * (corr.theta * corr.beta).abs() / (16.0 * nu);
    if half_alpha == 0.0 {
        return DroppedTerms {
            c: f64::INFINITY,
            d: f64::INFINITY,
            e: f64::INFINITY,
        };
    }
    DroppedTerms {
        c: c / half_alpha,
        d: d / half_alpha,
        e: e / half_alpha,
    }
}

/// Mean amplitudes `(<a>, <a^dag>)` under the full periodic coefficients,
/// fixed-step RK4 with `steps_per_period` steps per vibration period.
pub fn integrate_periodic_moments(
    model: &LinearLangevinModel,
    corr: &PeriodicCorrection,
    a0: [Complex64; 2],
    t_end: f64,
    steps_per_period: usize,
) -> [Complex64; 2] {
    let period = 2.0 * std::f64::consts::PI / corr.motion.nu;
    let steps = ((t_end / period) * steps_per_period as f64).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let k2q2 = corr.k2q2();
    let rhs = |t: f64, a: [Complex64; 2]| -> [Complex64; 2] {
        let (e1, e2) = corr.envelope(t);
        let m = mat_add(model.drift(), &corr.v, k2q2 * (e1 + e2));
        let mut out = mat_vec(&m, a);
        let force = k2q2 * (e2 - e1);
        out[0] += corr.b[0] * force;
        out[1] += corr.b[1] * force;
        out
    };
    rk4(rhs, a0, h, steps)
}

/// Same initial value problem under a constant drift.
pub fn integrate_moments(model: &LinearLangevinModel, a0: [Complex64; 2], t_end: f64, steps: usize) -> [Complex64; 2] {
    let h = t_end / steps.max(1) as f64;
    rk4(|_, a| mat_vec(model.drift(), a), a0, h, steps.max(1))
}

fn rk4(
    f: impl Fn(f64, [Complex64; 2]) -> [Complex64; 2],
    mut y: [Complex64; 2],
    h: f64,
    steps: usize,
) -> [Complex64; 2] {
    let axpy = |y: [Complex64; 2], k: [Complex64; 2], s: f64| [y[0] + k[0] * s, y[1] + k[1] * s];
    let mut t = 0.0;
    for _ in 0..steps {
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, axpy(y, k1, h / 2.0));
        let k3 = f(t + h / 2.0, axpy(y, k2, h / 2.0));
        let k4 = f(t + h, axpy(y, k3, h));
        for i in 0..2 {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        t += h;
    }
    y
}

/// Quadrature spectrum of the transmitted field from the linear model.
pub fn langevin_output_spectrum(
    model: &LinearLangevinModel,
    phase: f64,
    omega_grid: &OmegaGrid,
) -> Result<SpectrumSeries> {
    if !model.is_stable() {
        return Err(Error::Unstable(Instability::NonHurwitzDrift {
            max_real_part: model.max_real_part(),
        }));
    }
    let m = model.drift();
    let two_kappa = 2.0 * model.kappa();
    let cross = (two_kappa * 2.0 * model.gamma_prime()).sqrt();
    let em = Complex64::from_polar(1.0, -phase);
    let ep = em.conj();
    let points = omega_grid
        .values()
        .iter()
        .map(|&w| {
            // first column of (i w - M)^{-1}
            let a = I * w - m[0][0];
            let b = -m[0][1];
            let cc = -m[1][0];
            let d = I * w - m[1][1];
            let det = a * d - b * cc;
            let (g11, g21) = (d / det, -cc / det);
            let mirror = em * (g11 * two_kappa - 1.0) + ep * g21 * two_kappa;
            let emission = (em * g11 + ep * g21) * cross;
            SpectrumPoint {
                omega: w,
                s: mirror.norm_sqr() + emission.norm_sqr(),
                imag_residue: 0.0,
            }
        })
        .collect();
    SpectrumSeries::new(phase, Provenance::LangevinOracle, points)
}

/// Correlation `<eta~(t) eta~^dag(t')>` of white noise of strength `2 kappa'`
/// averaged over windows of length `period`.
pub fn averaged_noise_correlation(t: f64, t_prime: f64, period: f64, kappa_prime: f64) -> Result<f64> {
    if !(period > 0.0) {
        return Err(Error::invalid("period", "must be > 0"));
    }
    let overlap = period - (t - t_prime).abs();
    if overlap <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * kappa_prime / (period * period) * overlap)
}

/// Integral of the averaged correlation over `t`; independent of the window.
pub fn averaged_noise_weight(kappa_prime: f64) -> f64 {
    2.0 * kappa_prime
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opa::{analytic_spectrum, effective_coefficients};

    #[test]
    fn compensated_without_gain_is_pure_damping() {
        let m = LinearLangevinModel::parametric(0.0, 0.0, 0.7, 0.3).unwrap();
        assert_eq!(m.drift()[0][0], c(-1.0));
        assert_eq!(m.drift()[1][1], c(-1.0));
        assert_eq!(m.drift()[0][1], c(0.0) * I);
        assert_eq!(m.kappa_prime(), 1.0);
    }

    #[test]
    fn eigenvalues_straddle_gain() {
        let m = LinearLangevinModel::parametric(0.5, 0.0, 1.0, 0.0).unwrap();
        let mut ev: Vec<f64> = m.eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 1.5).abs() < 1e-14 && (ev[1] + 0.5).abs() < 1e-14);
        assert!(m.is_stable());
        let hot = LinearLangevinModel::parametric(1.5, 0.0, 1.0, 0.0).unwrap();
        assert!(!hot.is_stable());
        assert!(matches!(
            langevin_output_spectrum(&hot, 0.0, &OmegaGrid::default()),
            Err(Error::Unstable(Instability::NonHurwitzDrift { .. }))
        ));
    }

    #[test]
    fn non_conjugate_drift_is_rejected() {
        let mut d = *LinearLangevinModel::parametric(0.5, 0.2, 1.0, 0.0).unwrap().drift();
        d[1][1] = d[0][0];
        assert!(LinearLangevinModel::new(d, 1.0, 0.0).is_err());
    }

    #[test]
    fn drift_from_operating_point() {
        let p = SystemParams::fig3();
        let eff = effective_coefficients(&p).unwrap();
        let m = build_drift(&p, &eff).unwrap();
        assert!((m.alpha() - 0.5).abs() < 1e-14);
        assert!((m.detuning() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_reproduces_closed_form() {
        let grid = OmegaGrid::default();
        let m = LinearLangevinModel::parametric(0.5, 0.0, 1.0, 0.0).unwrap();
        let s = langevin_output_spectrum(&m, std::f64::consts::FRAC_PI_4, &grid).unwrap();
        let exact = analytic_spectrum(0.5, 1.0, 1.0, &grid).unwrap();
        for (a, b) in s.values().zip(exact.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
        let vacuum = LinearLangevinModel::parametric(0.0, 0.3, 1.0, 0.4).unwrap();
        let flat = langevin_output_spectrum(&vacuum, 0.2, &grid).unwrap();
        assert!(flat.values().all(|v| (v - 1.0).abs() <= 1e-13));
    }

    fn fig8_correction(nu: f64) -> (LinearLangevinModel, PeriodicCorrection) {
        let p = SystemParams::fig3();
        let motion = MotionParams::with_default_phases(nu, 0.3).unwrap();
        let corr = PeriodicCorrection::for_system(&p, 0.5, motion).unwrap();
        // detuning compensated for the reduced light shift
        let detuning = corr.theta - motion_scaled(corr.theta, 0.3);
        let m = LinearLangevinModel::parametric(0.5, detuning, 1.0, 0.0).unwrap();
        (m, corr)
    }

    #[test]
    fn secular_average_scales_gain() {
        let (m, corr) = fig8_correction(1250.0);
        let avg = secular_average(&m, &corr).unwrap();
        assert!((avg.alpha() - 0.4775).abs() < 1e-14);
        assert_eq!(avg.detuning(), m.detuning());
        let still = PeriodicCorrection {
            motion: MotionParams::with_default_phases(1250.0, 0.0).unwrap(),
            ..corr
        };
        assert_eq!(secular_average(&m, &still).unwrap(), m);
        assert_eq!(averaged_drift(&m, &still).unwrap(), m);
    }

    #[test]
    fn dropped_terms_are_small_for_fast_traps() {
        let (m, corr) = fig8_correction(1250.0);
        let t = dropped_terms(&m, &corr);
        assert!((t.c - 0.01125).abs() < 1e-12, "{t:?}");
        assert!((t.e - 0.05625).abs() < 1e-12, "{t:?}");
        assert!(t.max() <= 0.1, "{t:?}");
        let (m, slow) = fig8_correction(50.0);
        assert!(dropped_terms(&m, &slow).max() > 0.1);
    }

    #[test]
    fn triangle_correlation() {
        assert_eq!(averaged_noise_correlation(0.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(averaged_noise_correlation(3.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((averaged_noise_correlation(0.3, 0.3, 0.5, 1.5).unwrap() - 6.0).abs() < 1e-14);
        assert!(averaged_noise_correlation(0.0, 0.0, 0.0, 1.0).is_err());
        assert_eq!(averaged_noise_weight(1.5), 3.0);
    }
}
