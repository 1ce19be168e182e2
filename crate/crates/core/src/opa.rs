//! Closed forms of the dispersive two-atom model: effective coefficients,
//! the below-threshold parametric amplifier, and regime/validity checks.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Instability, Result};
use crate::liouville::{OmegaGrid, Provenance, SpectrumSeries, DEFAULT_PHASE};
use crate::system::{coupling_constants, SystemParams};

/// One coefficient "dominates" another when larger by this factor.
pub const DOMINANCE_RATIO: f64 = 10.0;
/// Coefficients below this fraction of their natural scale count as zero.
const NEGLIGIBLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// A linear drive of the field dominates.
    Linear,
    /// Intensity-dependent phase shift dominates.
    Kerr,
    /// Two-photon (parametric) driving dominates.
    Opa,
    Mixed,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Linear => "linear",
            Regime::Kerr => "kerr",
            Regime::Opa => "opa",
            Regime::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    /// Light shift of the cavity mode.
    pub theta_bar: f64,
    pub beta_bar: f64,
    pub chi_bar: f64,
    pub alpha_bar: f64,
    pub gamma_prime: f64,
    pub kappa_prime: f64,
    pub regime: Regime,
}

impl EffectiveCoefficients {
    /// Replaces the emission-induced damping, keeping `kappa' = kappa + gamma'`.
    pub fn with_gamma_prime(self, kappa: f64, gamma_prime: f64) -> Self {
        Self {
            gamma_prime,
            kappa_prime: kappa + gamma_prime,
            ..self
        }
    }

    pub fn is_stable(&self) -> bool {
        self.alpha_bar.abs() < self.kappa_prime
    }
}

/// Labels the dominant process among linear drive, Kerr and parametric terms.
/// `beta_scale`, `chi_scale`, `alpha_scale` set what counts as zero.
pub fn classify_regime(
    beta: f64,
    chi: f64,
    alpha: f64,
    scales: (f64, f64, f64),
) -> Regime {
    let zero = |x: f64, s: f64| x.abs() <= NEGLIGIBLE * s;
    let (b, c, a) = (beta.abs(), chi.abs(), alpha.abs());
    if !zero(beta, scales.0) {
        return if b >= DOMINANCE_RATIO * c.max(a) {
            Regime::Linear
        } else {
            Regime::Mixed
        };
    }
    match (zero(chi, scales.1), zero(alpha, scales.2)) {
        (true, true) => Regime::Linear,
        _ if c >= DOMINANCE_RATIO * a => Regime::Kerr,
        _ if a >= DOMINANCE_RATIO * c => Regime::Opa,
        _ => Regime::Mixed,
    }
}

/// `prefactor * gamma * g^2 / Delta^2`.
pub fn gamma_prime(p: &SystemParams, prefactor: f64) -> f64 {
    prefactor * p.gamma * p.g * p.g / (p.delta * p.delta)
}

/// Fourth-order effective coefficients, with `gamma'` at prefactor 1.
pub fn effective_coefficients(p: &SystemParams) -> Result<EffectiveCoefficients> {
    p.validate()?;
    let d = p.delta;
    if d == 0.0 {
        return Err(Error::invalid("delta", "dispersive coefficients need delta != 0"));
    }
    if d.abs() < 10.0 * p.g.max(p.omega) {
        log::warn!(
            "|delta| = {} is not large against g = {}, omega = {}",
            d.abs(),
            p.g,
            p.omega
        );
    }
    let (gp, gm) = coupling_constants(p.kx1, p.kx2, p.g);
    // g+^2 - g-^2 = 2 g^2 cos kx1 cos kx2, evaluated without cancellation
    let diff = 2.0 * p.g * p.g * p.kx1.cos() * p.kx2.cos();
    let d3 = d * d * d;
    let theta_bar = (gp * gp + gm * gm) / d;
    let beta_bar = SQRT_2 * p.omega * gp / d;
    let chi_bar = diff * diff / d3;
    let alpha_bar = 2.0 * p.omega * p.omega * diff / d3;
    let g2 = p.g * p.g;
    let scales = (
        2.0 * (p.omega * p.g / d).abs(),
        4.0 * g2 * g2 / d3.abs(),
        4.0 * p.omega * p.omega * g2 / d3.abs(),
    );
    let regime = classify_regime(beta_bar, chi_bar, alpha_bar, scales);
    let gp_rate = gamma_prime(p, 1.0);
    Ok(EffectiveCoefficients {
        theta_bar,
        beta_bar,
        chi_bar,
        alpha_bar,
        gamma_prime: gp_rate,
        kappa_prime: p.kappa + gp_rate,
        regime,
    })
}

fn check_below_threshold(alpha: f64, kappa_prime: f64) -> Result<()> {
    if !(kappa_prime > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(
            "kappa_prime",
            format!("need finite alpha and kappa' > 0, got alpha={alpha}, kappa'={kappa_prime}"),
        ));
    }
    if alpha.abs() >= kappa_prime {
        return Err(Error::Unstable(Instability::AboveThreshold { alpha, kappa_prime }));
    }
    Ok(())
}

/// Stationary photon number `alpha^2 / (2 (kappa'^2 - alpha^2))`.
pub fn opa_photon_number(alpha: f64, kappa_prime: f64) -> Result<f64> {
    check_below_threshold(alpha, kappa_prime)?;
    Ok(alpha * alpha / (2.0 * (kappa_prime * kappa_prime - alpha * alpha)))
}

/// Intracavity variance of the squeezed quadrature, `kappa' / (kappa' + alpha)`.
pub fn opa_quadrature_variance(alpha: f64, kappa_prime: f64) -> Result<f64> {
    check_below_threshold(alpha, kappa_prime)?;
    Ok(kappa_prime / (kappa_prime + alpha))
}

/// Pointwise `1 - 4 kappa alpha / ((kappa' + alpha)^2 + omega^2)`, no checks.
pub fn opa_spectrum_value(alpha: f64, kappa: f64, kappa_prime: f64, omega: f64) -> f64 {
    let s = kappa_prime + alpha;
    1.0 - 4.0 * kappa * alpha / (s * s + omega * omega)
}

/// Pointwise first-order motion-corrected spectrum, no checks.
pub fn motion_spectrum_value(
    alpha: f64,
    kappa: f64,
    kappa_prime: f64,
    k_qbar: f64,
    omega: f64,
) -> f64 {
    let s = kappa_prime + alpha;
    let den = s * s + omega * omega;
    let eps = 0.5 * k_qbar * k_qbar;
    let num = alpha * alpha - kappa_prime * kappa_prime - omega * omega;
    1.0 - (4.0 * kappa * alpha / den) * (1.0 + num / den * eps)
}

/// Coupling-type coefficient reduced by the averaged `cos^2` of the vibration:
/// `x (1 - k^2 qbar^2 / 2)`.
pub fn motion_scaled(x: f64, k_qbar: f64) -> f64 {
    x * (1.0 - 0.5 * k_qbar * k_qbar)
}

fn check_spectrum_inputs(kappa: f64, kappa_prime: f64) -> Result<()> {
    if !(kappa >= 0.0) {
        return Err(Error::invalid("kappa", "must be >= 0"));
    }
    if kappa_prime < kappa {
        return Err(Error::invalid(
            "kappa_prime",
            format!("kappa' = {kappa_prime} is below kappa = {kappa}"),
        ));
    }
    Ok(())
}

pub fn analytic_spectrum(
    alpha: f64,
    kappa: f64,
    kappa_prime: f64,
    omega_grid: &OmegaGrid,
) -> Result<SpectrumSeries> {
    check_spectrum_inputs(kappa, kappa_prime)?;
    check_below_threshold(alpha, kappa_prime)?;
    SpectrumSeries::from_fn(DEFAULT_PHASE, Provenance::AnalyticOpa, omega_grid, |w| {
        opa_spectrum_value(alpha, kappa, kappa_prime, w)
    })
}

pub fn motion_spectrum(
    alpha: f64,
    kappa: f64,
    kappa_prime: f64,
    k_qbar: f64,
    omega_grid: &OmegaGrid,
) -> Result<SpectrumSeries> {
    check_spectrum_inputs(kappa, kappa_prime)?;
    check_k_qbar(k_qbar)?;
    check_below_threshold(alpha, kappa_prime)?;
    SpectrumSeries::from_fn(DEFAULT_PHASE, Provenance::AnalyticMotion, omega_grid, |w| {
        motion_spectrum_value(alpha, kappa, kappa_prime, k_qbar, w)
    })
}

fn check_k_qbar(k_qbar: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k_qbar) {
        return Err(Error::invalid("k_qbar", format!("must lie in [0, 1), got {k_qbar}")));
    }
    Ok(())
}

/// Harmonic oscillation of both atoms about their mean positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    /// Trap frequency.
    pub nu: f64,
    /// Amplitude times wave number; equal for both atoms.
    pub k_qbar: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl MotionParams {
    pub fn new(nu: f64, k_qbar: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let m = Self {
            nu,
            k_qbar,
            phi1,
            phi2,
        };
        m.validate()?;
        Ok(m)
    }

    /// Incommensurate phases used for validation runs.
    pub fn with_default_phases(nu: f64, k_qbar: f64) -> Result<Self> {
        Self::new(nu, k_qbar, 0.0, std::f64::consts::PI / 7.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::invalid("nu", format!("must be > 0, got {}", self.nu)));
        }
        check_k_qbar(self.k_qbar)?;
        if !self.phi1.is_finite() || !self.phi2.is_finite() {
            return Err(Error::invalid("phi", "phases must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
}

impl Verdict {
    pub fn from_ratio(ratio: f64) -> Self {
        if ratio >= 10.0 {
            Verdict::Pass
        } else if ratio >= 3.0 {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Marginal => "marginal",
            Verdict::Fail => "fail",
        }
    }
}

/// One `large >> small` premise with its margin `large / small`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityCheck {
    pub name: &'static str,
    pub large: f64,
    pub small: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

impl ValidityCheck {
    fn new(name: &'static str, large: f64, small: f64) -> Self {
        let ratio = if small == 0.0 {
            f64::INFINITY
        } else {
            large / small
        };
        Self {
            name,
            large,
            small,
            ratio,
            verdict: Verdict::from_ratio(ratio),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
    /// `|alpha_bar| < kappa'` with `gamma'` at prefactor 1.
    pub stable: bool,
    /// `gamma g^2 / Delta^2`.
    pub gamma_prime_formula: f64,
    /// Half of the formula value, the convention of the published operating points.
    pub gamma_prime_half: f64,
}

impl ValidityReport {
    pub fn check(&self, name: &str) -> Option<&ValidityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn worst(&self) -> Verdict {
        self.checks
            .iter()
            .map(|c| c.verdict)
            .max_by_key(|v| match v {
                Verdict::Pass => 0,
                Verdict::Marginal => 1,
                Verdict::Fail => 2,
            })
            .unwrap_or(Verdict::Pass)
    }
}

/// Evaluates the premises of the dispersive and secular approximations.
pub fn validity_report(p: &SystemParams, m: Option<&MotionParams>) -> ValidityReport {
    let ad = p.delta.abs();
    let g2 = p.g * p.g;
    let light_shift = g2 / ad;
    let mut checks = vec![
        ValidityCheck::new(
            "detuning_dominates",
            ad,
            p.g.max(p.omega).max(p.delta_c.abs()).max(p.gamma).max(p.kappa),
        ),
        ValidityCheck::new("light_shift_over_kappa", light_shift, p.kappa),
        ValidityCheck::new("light_shift_over_gamma", light_shift, p.gamma),
        ValidityCheck::new("pump_shift_over_gamma", p.omega * p.omega / ad, p.gamma),
    ];
    let coeffs = effective_coefficients(p).ok();
    if let Some(m) = m {
        let kq2 = m.k_qbar * m.k_qbar;
        let field_rate = coeffs
            .map(|c| c.alpha_bar.abs().max(c.kappa_prime))
            .unwrap_or(f64::INFINITY);
        checks.push(ValidityCheck::new("trap_over_field_rates", m.nu, field_rate));
        checks.push(ValidityCheck::new("trap_over_light_shift", m.nu, light_shift));
        let ratio_term = if p.omega == 0.0 {
            f64::INFINITY
        } else {
            kq2 / 8.0 * (g2 * p.delta / (p.omega * p.omega)).abs()
        };
        checks.push(ValidityCheck::new("trap_over_kerr_modulation", m.nu, ratio_term));
        let drive_term = if p.omega == 0.0 {
            f64::INFINITY
        } else {
            kq2 / 16.0 * (p.g * p.delta / p.omega).abs()
        };
        checks.push(ValidityCheck::new("trap_over_drive_modulation", m.nu, drive_term));
    }
    ValidityReport {
        checks,
        stable: coeffs.map(|c| c.is_stable()).unwrap_or(false),
        gamma_prime_formula: gamma_prime(p, 1.0),
        gamma_prime_half: gamma_prime(p, 0.5),
    }
}
