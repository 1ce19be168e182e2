//! Running one configured scenario into CSV files and a manifest.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dipole_squeeze::liouville::{
    check_truncation, mean_photon_number, output_squeezing_spectrum, quadrature_variance,
    steady_state_with_report, SteadyStateReport, DEFAULT_PHASE, TAIL_LIMIT,
};
use dipole_squeeze::motion::{
    langevin_output_spectrum, secular_average, LinearLangevinModel, PeriodicCorrection,
};
use dipole_squeeze::opa::{
    analytic_spectrum, gamma_prime, motion_spectrum, opa_photon_number,
    opa_quadrature_variance, validity_report,
};
use dipole_squeeze::quantum::DensityMatrix;
use dipole_squeeze::system::coupling_constants;
use dipole_squeeze::{
    effective_coefficients, EffectiveCoefficients, MotionParams, OmegaGrid, SpectrumSeries,
    SystemModel, SystemParams,
};
use thiserror::Error;

use crate::config::{ConfigError, GridSpecError, Output, ScenarioConfig};
use crate::output::{num, write_atomic, Manifest, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Model,
    SteadyState,
    Truncation,
    Spectrum,
    Coefficients,
    Analytic,
    Motion,
    Validity,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "configuration",
            Stage::Model => "model construction",
            Stage::SteadyState => "steady state",
            Stage::Truncation => "truncation check",
            Stage::Spectrum => "numeric spectrum",
            Stage::Coefficients => "effective coefficients",
            Stage::Analytic => "analytic model",
            Stage::Motion => "motion correction",
            Stage::Validity => "validity report",
            Stage::Write => "output",
        })
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario `{scenario}`: {stage} failed: {source}")]
    Library {
        scenario: String,
        stage: Stage,
        #[source]
        source: dipole_squeeze::Error,
    },
    #[error("scenario `{scenario}`: bad configuration: {source}")]
    Config {
        scenario: String,
        #[source]
        source: ConfigError,
    },
    #[error("scenario `{scenario}`: bad range: {source}")]
    Range {
        scenario: String,
        #[source]
        source: GridSpecError,
    },
    #[error("scenario `{scenario}`: {reason}")]
    Unsupported { scenario: String, reason: String },
    #[error("scenario `{scenario}`: cannot write {}: {source}", path.display())]
    Io {
        scenario: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario `{scenario}`: cannot encode {}: {source}", path.display())]
    Csv {
        scenario: String,
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl ScenarioError {
    pub fn scenario(&self) -> &str {
        match self {
            ScenarioError::Library { scenario, .. }
            | ScenarioError::Config { scenario, .. }
            | ScenarioError::Range { scenario, .. }
            | ScenarioError::Unsupported { scenario, .. }
            | ScenarioError::Io { scenario, .. }
            | ScenarioError::Csv { scenario, .. } => scenario,
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            ScenarioError::Library { stage, .. } => *stage,
            ScenarioError::Config { .. }
            | ScenarioError::Range { .. }
            | ScenarioError::Unsupported { .. } => Stage::Config,
            ScenarioError::Io { .. } | ScenarioError::Csv { .. } => Stage::Write,
        }
    }

    /// The library error underneath, if any.
    pub fn library(&self) -> Option<&dipole_squeeze::Error> {
        match self {
            ScenarioError::Library { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub(crate) trait AtStage<T> {
    fn at(self, scenario: &str, stage: Stage) -> Result<T, ScenarioError>;
}

impl<T> AtStage<T> for dipole_squeeze::Result<T> {
    fn at(self, scenario: &str, stage: Stage) -> Result<T, ScenarioError> {
        self.map_err(|source| ScenarioError::Library {
            scenario: scenario.to_string(),
            stage,
            source,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Multiplies `gamma g^2 / Delta^2` when no explicit `gamma_prime` is set.
    pub gamma_prime_prefactor: f64,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            gamma_prime_prefactor: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Steady state of the full master equation together with its diagnostics.
pub struct NumericSteady {
    pub model: SystemModel,
    pub rho: DensityMatrix,
    pub report: SteadyStateReport,
    pub tail: f64,
}

impl NumericSteady {
    pub fn solve(p: &SystemParams, scenario: &str) -> Result<Self, ScenarioError> {
        let model = SystemModel::new(*p).at(scenario, Stage::Model)?;
        let (rho, report) =
            steady_state_with_report(&model.liouvillian).at(scenario, Stage::SteadyState)?;
        let tail = check_truncation(&rho, TAIL_LIMIT).at(scenario, Stage::Truncation)?;
        log::debug!(
            "{scenario}: steady state residual {:.2e}, tail {tail:.2e}",
            report.relative_residual
        );
        Ok(Self {
            model,
            rho,
            report,
            tail,
        })
    }

    pub fn photon_number(&self) -> f64 {
        mean_photon_number(&self.rho, &self.model.ops).expect("operators match the state")
    }

    pub fn variance(&self) -> f64 {
        quadrature_variance(&self.rho, &self.model.ops, DEFAULT_PHASE)
            .expect("operators match the state")
    }

    pub fn spectrum(&self, grid: &OmegaGrid, scenario: &str) -> Result<SpectrumSeries, ScenarioError> {
        output_squeezing_spectrum(
            &self.model.liouvillian,
            &self.rho,
            self.model.params.kappa,
            DEFAULT_PHASE,
            grid,
        )
        .at(scenario, Stage::Spectrum)
    }

    /// `S(0)` from a single resolvent solve.
    pub fn s0(&self, scenario: &str) -> Result<f64, ScenarioError> {
        let grid = OmegaGrid::single(0.0).at(scenario, Stage::Spectrum)?;
        Ok(self.spectrum(&grid, scenario)?.points()[0].s)
    }
}

/// Effective coefficients with `gamma'` either fixed or derived from `gamma`.
pub fn coefficients_for(
    p: &SystemParams,
    gamma_prime_override: Option<f64>,
    prefactor: f64,
    scenario: &str,
) -> Result<EffectiveCoefficients, ScenarioError> {
    let eff = effective_coefficients(p).at(scenario, Stage::Coefficients)?;
    let gp = gamma_prime_override.unwrap_or_else(|| gamma_prime(p, prefactor));
    Ok(eff.with_gamma_prime(p.kappa, gp))
}

/// Secular-averaged linear model of a resonant amplifier with vibrating atoms.
pub fn averaged_motion_model(
    p: &SystemParams,
    eff: &EffectiveCoefficients,
    motion: MotionParams,
) -> dipole_squeeze::Result<LinearLangevinModel> {
    let bare = LinearLangevinModel::parametric(eff.alpha_bar, 0.0, p.kappa, eff.gamma_prime)?;
    let corr = PeriodicCorrection::for_system(p, eff.alpha_bar, motion)?;
    secular_average(&bare, &corr)
}

pub(crate) fn write_table(
    table: &Table,
    path: &Path,
    scenario: &str,
) -> Result<(), ScenarioError> {
    let bytes = table.to_csv().map_err(|source| ScenarioError::Csv {
        scenario: scenario.to_string(),
        path: path.to_path_buf(),
        source,
    })?;
    write_file(path, &bytes, scenario)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8], scenario: &str) -> Result<(), ScenarioError> {
    write_atomic(path, bytes).map_err(|source| ScenarioError::Io {
        scenario: scenario.to_string(),
        path: path.to_path_buf(),
        source,
    })
}

/// Writes each table as `<prefix>_<suffix>.csv`, then the manifest.
pub(crate) fn emit(
    prefix: &str,
    tables: Vec<(&str, Table)>,
    mut manifest: Manifest,
    out_dir: &Path,
    started: Instant,
) -> Result<RunSummary, ScenarioError> {
    let mut files = Vec::new();
    for (suffix, table) in &tables {
        let path = out_dir.join(format!("{prefix}_{suffix}.csv"));
        write_table(table, &path, prefix)?;
        files.push(path);
    }
    manifest.files = files.clone();
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    let path = out_dir.join(format!("{prefix}_manifest.txt"));
    write_file(&path, manifest.render().as_bytes(), prefix)?;
    log::info!("{prefix}: wrote {} files to {}", files.len() + 1, out_dir.display());
    Ok(RunSummary {
        files,
        manifest: path,
    })
}

pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary, ScenarioError> {
    let started = Instant::now();
    let name = cfg.name.as_str();
    cfg.validate().map_err(|source| ScenarioError::Config {
        scenario: name.to_string(),
        source,
    })?;
    let p = &cfg.params;
    let eff = coefficients_for(p, cfg.gamma_prime_override, opts.gamma_prime_prefactor, name)?;

    let mut tables = Vec::new();
    let numeric = if cfg.outputs.contains(Output::Spectrum) || cfg.outputs.contains(Output::Steady) {
        Some(NumericSteady::solve(p, name)?)
    } else {
        None
    };

    for out in cfg.outputs.iter() {
        let table = match out {
            Output::Spectrum => spectrum_table(cfg, &eff, numeric.as_ref().expect("solved"))?,
            Output::Steady => steady_table(name, &eff, numeric.as_ref().expect("solved"))?,
            Output::Coefficients => coefficient_table(p, &eff),
            Output::Validity => validity_table(cfg),
        };
        tables.push((out.name(), table));
    }

    let mut manifest = Manifest::new(name);
    manifest.section("config", cfg.to_text());
    let mut opts_text = String::new();
    let _ = writeln!(opts_text, "gamma_prime_prefactor = {}", opts.gamma_prime_prefactor);
    let _ = writeln!(opts_text, "gamma_prime_used = {}", eff.gamma_prime);
    let _ = writeln!(
        opts_text,
        "gamma_prime_source = {}",
        if cfg.gamma_prime_override.is_some() { "fixed" } else { "derived" }
    );
    let _ = writeln!(opts_text, "quadrature_phase = {DEFAULT_PHASE}");
    manifest.section("options", opts_text);
    if let Some(n) = &numeric {
        manifest.section(
            "steady_state",
            format!(
                "relative_residual = {:e}\npivot_ratio = {:e}\nraw_hermiticity_defect = {:e}\nblock_size = {}\ntop_sector_population = {:e}\n",
                n.report.relative_residual,
                n.report.pivot_ratio,
                n.report.raw_hermiticity_defect,
                n.report.block_size,
                n.tail
            ),
        );
    }
    emit(name, tables, manifest, &opts.out_dir, started)
}

fn spectrum_table(
    cfg: &ScenarioConfig,
    eff: &EffectiveCoefficients,
    numeric: &NumericSteady,
) -> Result<Table, ScenarioError> {
    let name = cfg.name.as_str();
    let p = &cfg.params;
    let grid = cfg.grid.to_grid();
    let full = numeric.spectrum(&grid, name)?;
    let opa = analytic_spectrum(eff.alpha_bar, p.kappa, eff.kappa_prime, &grid)
        .at(name, Stage::Analytic)?;
    let mut header = vec![
        "omega_over_kappa0".to_string(),
        format!("{}[gamma={}]", full.provenance(), p.gamma),
        format!("{}[gamma_prime={}]", opa.provenance(), eff.gamma_prime),
    ];
    let mut series = vec![full.clone(), opa];
    if let Some(m) = cfg.motion {
        let moved = motion_spectrum(eff.alpha_bar, p.kappa, eff.kappa_prime, m.k_qbar, &grid)
            .at(name, Stage::Motion)?;
        let averaged = averaged_motion_model(p, eff, m).at(name, Stage::Motion)?;
        let oracle =
            langevin_output_spectrum(&averaged, DEFAULT_PHASE, &grid).at(name, Stage::Motion)?;
        header.push(format!("{}[k_qbar={}]", moved.provenance(), m.k_qbar));
        header.push(format!("{}[secular;k_qbar={}]", oracle.provenance(), m.k_qbar));
        series.push(moved);
        series.push(oracle);
    }
    header.push(format!("{}_imag_residue", full.provenance()));
    let mut table = Table::new(header);
    for (i, w) in grid.values().iter().enumerate() {
        let mut row = vec![num(*w)];
        row.extend(series.iter().map(|s| num(s.points()[i].s)));
        row.push(num(full.points()[i].imag_residue));
        table.push(row);
    }
    Ok(table)
}

fn steady_table(
    name: &str,
    eff: &EffectiveCoefficients,
    n: &NumericSteady,
) -> Result<Table, ScenarioError> {
    let n0 = opa_photon_number(eff.alpha_bar, eff.kappa_prime).at(name, Stage::Analytic)?;
    let v0 = opa_quadrature_variance(eff.alpha_bar, eff.kappa_prime).at(name, Stage::Analytic)?;
    let mut t = Table::new(["quantity", "numeric_full", "analytic_opa"]);
    let mut row = |q: &str, a: String, b: String| t.push(vec![q.to_string(), a, b]);
    row("mean_photon_number", num(n.photon_number()), num(n0));
    row("quadrature_variance", num(n.variance()), num(v0));
    row("excited_population", num(n.rho.excited_population()), String::new());
    row("top_sector_population", num(n.tail), String::new());
    Ok(t)
}

fn coefficient_table(p: &SystemParams, eff: &EffectiveCoefficients) -> Table {
    let (gp, gm) = coupling_constants(p.kx1, p.kx2, p.g);
    let mut t = Table::new(["coefficient", "value"]);
    for (k, v) in [
        ("g_plus", gp),
        ("g_minus", gm),
        ("theta_bar", eff.theta_bar),
        ("beta_bar", eff.beta_bar),
        ("chi_bar", eff.chi_bar),
        ("alpha_bar", eff.alpha_bar),
        ("gamma_prime", eff.gamma_prime),
        ("kappa_prime", eff.kappa_prime),
    ] {
        t.push(vec![k.to_string(), num(v)]);
    }
    t.push(vec!["regime".into(), eff.regime.label().into()]);
    t.push(vec!["stable".into(), eff.is_stable().to_string()]);
    t
}

fn validity_table(cfg: &ScenarioConfig) -> Table {
    let report = validity_report(&cfg.params, cfg.motion.as_ref());
    let mut t = Table::new(["check", "large", "small", "ratio", "verdict"]);
    for c in &report.checks {
        t.push(vec![
            c.name.to_string(),
            num(c.large),
            num(c.small),
            num(c.ratio),
            c.verdict.label().to_string(),
        ]);
    }
    t
}
