//! One-parameter sweeps of a scenario.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use dipole_squeeze::opa::{
    gamma_prime, motion_scaled, motion_spectrum_value, opa_photon_number,
    opa_quadrature_variance, opa_spectrum_value,
};
use dipole_squeeze::{Error, SystemParams};

use crate::config::{check_range, ScenarioConfig};
use crate::output::{num, opt_num, Manifest, Table};
use crate::run::{coefficients_for, emit, NumericSteady, RunSummary, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Kappa,
    Gamma,
    GammaPrime,
    /// Laser Rabi frequency.
    Omega,
    G,
    Kx2,
    KQbar,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 7] = [
        SweepParameter::Kappa,
        SweepParameter::Gamma,
        SweepParameter::GammaPrime,
        SweepParameter::Omega,
        SweepParameter::G,
        SweepParameter::Kx2,
        SweepParameter::KQbar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Kappa => "kappa",
            SweepParameter::Gamma => "gamma",
            SweepParameter::GammaPrime => "gamma_prime",
            SweepParameter::Omega => "omega",
            SweepParameter::G => "g",
            SweepParameter::Kx2 => "kx2",
            SweepParameter::KQbar => "k_qbar",
        }
    }

    fn column(self) -> String {
        match self {
            SweepParameter::Kx2 => "kx2_rad".into(),
            SweepParameter::KQbar => "k_qbar".into(),
            p => format!("{}_over_kappa0", p.name()),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
                format!("unknown sweep parameter `{s}`; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Also solve the full master equation at every point.
    pub numeric: bool,
    pub gamma_prime_prefactor: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            numeric: true,
            gamma_prime_prefactor: 1.0,
        }
    }
}

/// The configuration at one sweep point.
pub fn apply(
    param: SweepParameter,
    value: f64,
    cfg: &ScenarioConfig,
    prefactor: f64,
) -> Result<ScenarioConfig, ScenarioError> {
    let mut c = cfg.clone();
    let p = &mut c.params;
    match param {
        SweepParameter::Kappa => p.kappa = value,
        SweepParameter::Gamma => {
            p.gamma = value;
            c.gamma_prime_override = None;
        }
        SweepParameter::GammaPrime => {
            let per_gamma = gamma_prime(&SystemParams { gamma: 1.0, ..*p }, prefactor);
            if !(per_gamma > 0.0) {
                return Err(ScenarioError::Unsupported {
                    scenario: cfg.name.clone(),
                    reason: "sweeping gamma' needs g > 0 and a positive prefactor".into(),
                });
            }
            p.gamma = value / per_gamma;
            c.gamma_prime_override = Some(value);
        }
        SweepParameter::Omega => p.omega = value,
        SweepParameter::G => p.g = value,
        SweepParameter::Kx2 => p.kx2 = value,
        SweepParameter::KQbar => match c.motion.as_mut() {
            Some(m) => m.k_qbar = value,
            None => {
                return Err(ScenarioError::Unsupported {
                    scenario: cfg.name.clone(),
                    reason: "sweeping k_qbar needs the motion.* keys".into(),
                })
            }
        },
    }
    c.validate().map_err(|source| ScenarioError::Config {
        scenario: cfg.name.clone(),
        source,
    })?;
    Ok(c)
}

pub fn header(param: SweepParameter) -> Vec<String> {
    let analytic = if param == SweepParameter::KQbar {
        "analytic_motion"
    } else {
        "analytic_opa"
    };
    let mut h = vec![
        param.column(),
        "numeric_full[S0]".to_string(),
        "numeric_full[mean_photon_number]".to_string(),
        "numeric_full[variance]".to_string(),
    ];
    for q in ["S0", "mean_photon_number", "variance"] {
        h.push(format!("{analytic}[{q}]"));
    }
    h.extend(
        ["alpha_bar", "kappa_prime", "regime", "stable", "numeric_status"].map(String::from),
    );
    h
}

/// One row per value. Numeric points that fail for physical reasons
/// (cutoff too small, no unique steady state) are left blank and tagged in
/// `numeric_status`; analytic columns are blank above threshold.
pub fn sweep(
    param: SweepParameter,
    values: &[f64],
    cfg: &ScenarioConfig,
    opts: &SweepOptions,
) -> Result<Table, ScenarioError> {
    let name = cfg.name.as_str();
    check_range(values).map_err(|source| ScenarioError::Range {
        scenario: name.to_string(),
        source,
    })?;
    let mut table = Table::new(header(param));
    for &v in values {
        let point = apply(param, v, cfg, opts.gamma_prime_prefactor)?;
        let p = &point.params;
        let eff = coefficients_for(p, point.gamma_prime_override, opts.gamma_prime_prefactor, name)?;

        let (numeric, status) = if !opts.numeric {
            (None, "skipped".to_string())
        } else if param == SweepParameter::KQbar {
            // the master equation has no atomic motion
            (None, "not_applicable".to_string())
        } else {
            match numeric_point(p, name) {
                Ok(vals) => (Some(vals), "ok".to_string()),
                Err(e) => match e.library() {
                    Some(lib @ (Error::TruncationInsufficient { .. }
                    | Error::DegenerateSteadyState { .. }
                    | Error::Unstable(_))) => {
                        log::warn!("{name}: {param} = {v}: {lib}");
                        (None, status_tag(lib).to_string())
                    }
                    _ => return Err(e),
                },
            }
        };

        let k_qbar = point.motion.map(|m| m.k_qbar).filter(|_| param == SweepParameter::KQbar);
        let alpha = k_qbar.map_or(eff.alpha_bar, |k| motion_scaled(eff.alpha_bar, k));
        let stable = eff.kappa_prime > alpha.abs();
        let analytic = if stable {
            let s0 = match k_qbar {
                Some(k) => motion_spectrum_value(eff.alpha_bar, p.kappa, eff.kappa_prime, k, 0.0),
                None => opa_spectrum_value(eff.alpha_bar, p.kappa, eff.kappa_prime, 0.0),
            };
            let n = opa_photon_number(alpha, eff.kappa_prime).ok();
            let var = opa_quadrature_variance(alpha, eff.kappa_prime).ok();
            [Some(s0), n, var]
        } else {
            [None; 3]
        };

        let mut row = vec![num(v)];
        let nums = numeric.map_or([None; 3], |[a, b, c]| [Some(a), Some(b), Some(c)]);
        row.extend(nums.iter().map(|x| opt_num(*x)));
        row.extend(analytic.iter().map(|x| opt_num(*x)));
        row.push(num(eff.alpha_bar));
        row.push(num(eff.kappa_prime));
        row.push(eff.regime.label().to_string());
        row.push(stable.to_string());
        row.push(status);
        table.push(row);
    }
    Ok(table)
}

fn numeric_point(p: &SystemParams, name: &str) -> Result<[f64; 3], ScenarioError> {
    let n = NumericSteady::solve(p, name)?;
    Ok([n.s0(name)?, n.photon_number(), n.variance()])
}

fn status_tag(e: &Error) -> &'static str {
    match e {
        Error::TruncationInsufficient { .. } => "truncation_insufficient",
        Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
        _ => "unstable",
    }
}

/// Writes `<name>_sweep_<param>.csv` and its manifest.
pub fn run_sweep(
    param: SweepParameter,
    values: &[f64],
    cfg: &ScenarioConfig,
    opts: &SweepOptions,
    out_dir: &Path,
) -> Result<RunSummary, ScenarioError> {
    let started = Instant::now();
    let table = sweep(param, values, cfg, opts)?;
    let prefix = format!("{}_sweep_{}", cfg.name, param.name());
    let mut manifest = Manifest::new(&prefix);
    manifest.section("config", cfg.to_text());
    let vals: Vec<String> = values.iter().map(|v| num(*v)).collect();
    manifest.section(
        "sweep",
        format!(
            "parameter = {param}\nvalues = {}\nnumeric = {}\ngamma_prime_prefactor = {}\n",
            vals.join(", "),
            opts.numeric,
            opts.gamma_prime_prefactor
        ),
    );
    emit(&prefix, vec![("data", table)], manifest, out_dir, started)
}
