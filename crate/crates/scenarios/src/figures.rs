//! Built-in figure datasets.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use dipole_squeeze::liouville::DEFAULT_PHASE;
use dipole_squeeze::motion::langevin_output_spectrum;
use dipole_squeeze::opa::{
    analytic_spectrum, gamma_prime, motion_spectrum, opa_quadrature_variance,
};
use dipole_squeeze::{Error, MotionParams, SpectrumSeries, SystemParams};

use crate::config::{GridSpec, ScenarioConfig};
use crate::output::{num, opt_num, Manifest, Table};
use crate::run::{averaged_motion_model, coefficients_for, emit, AtStage, NumericSteady, RunSummary, Stage};

/// Fixed emission damping quoted with the `gamma = 1e4` curves.
pub const EMISSION_GAMMA_PRIME: f64 = 0.5;
pub const EMISSION_GAMMA: f64 = 1e4;
/// Trap frequency for the vibrating-atom dataset.
pub const FIG8_NU: f64 = 1250.0;
pub const FIG8_K_QBAR: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
        }
    }

    /// Default abscissa: frequency for spectra, the swept rate otherwise.
    pub fn default_grid(self) -> GridSpec {
        match self {
            Figure::Fig3 | Figure::Fig8 => GridSpec::default(),
            Figure::Fig4 => GridSpec {
                start: -500.0,
                stop: 500.0,
                count: 201,
            },
            Figure::Fig5 | Figure::Fig7 => GridSpec {
                start: 0.6,
                stop: 3.0,
                count: 13,
            },
            // below gamma ~ 3e3 the kappa = 1/2 curve is close enough to
            // threshold that n_max = 15 no longer holds the photon tail
            Figure::Fig6 => GridSpec {
                start: 4e3,
                stop: 2e4,
                count: 9,
            },
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure `{s}`; expected one of fig3..fig8"))
    }
}

#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub n_max: usize,
    pub grid: Option<GridSpec>,
    /// Multiplies `gamma g^2 / Delta^2` wherever a figure derives `gamma'`
    /// from `gamma` (fig4, fig6) or `gamma` from `gamma'` (fig7). Defaults:
    /// 1/2 for fig6, matching the `gamma = 1e4 <-> gamma' = 1/2` pairing of
    /// the emission curves, and 1 elsewhere.
    pub gamma_prime_prefactor: Option<f64>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            n_max: 15,
            grid: None,
            gamma_prime_prefactor: None,
        }
    }
}

/// One figure's table plus a description of every parameter set used.
pub struct FigureData {
    pub figure: Figure,
    pub table: Table,
    pub parameters: Vec<ScenarioConfig>,
    pub notes: String,
}

pub fn figure_data(fig: Figure, opts: &FigureOptions) -> Result<FigureData, crate::ScenarioError> {
    let grid = opts.grid.unwrap_or_else(|| fig.default_grid());
    let n_max = opts.n_max;
    match fig {
        Figure::Fig3 => spectra_pair(fig, SystemParams { n_max, ..SystemParams::fig3() }, grid, |_| {
            EMISSION_GAMMA_PRIME
        }),
        Figure::Fig4 => {
            let pre = opts.gamma_prime_prefactor.unwrap_or(1.0);
            spectra_pair(fig, SystemParams { n_max, ..SystemParams::fig4() }, grid, |p| {
                gamma_prime(p, pre)
            })
        }
        Figure::Fig5 => fig5(grid, n_max),
        Figure::Fig6 => fig6(grid, n_max, opts.gamma_prime_prefactor.unwrap_or(0.5)),
        Figure::Fig7 => fig7(grid, n_max, opts.gamma_prime_prefactor.unwrap_or(1.0)),
        Figure::Fig8 => fig8(grid, n_max),
    }
}

pub fn run_figure(
    fig: Figure,
    opts: &FigureOptions,
    out_dir: &Path,
) -> Result<RunSummary, crate::ScenarioError> {
    let started = Instant::now();
    let data = figure_data(fig, opts)?;
    let mut manifest = Manifest::new(fig.name());
    let mut o = String::new();
    let _ = writeln!(o, "n_max = {}", opts.n_max);
    let _ = writeln!(o, "grid = {}", opts.grid.unwrap_or_else(|| fig.default_grid()));
    if let Some(pre) = opts.gamma_prime_prefactor {
        let _ = writeln!(o, "gamma_prime_prefactor = {pre}");
    }
    let _ = writeln!(o, "quadrature_phase = {DEFAULT_PHASE}");
    manifest.section("options", o);
    if !data.notes.is_empty() {
        manifest.section("notes", data.notes);
    }
    for cfg in &data.parameters {
        manifest.section(&format!("parameters.{}", cfg.name), cfg.to_text());
    }
    emit(fig.name(), vec![("data", data.table)], manifest, out_dir, started)
}

fn config(name: &str, p: SystemParams, grid: GridSpec, gamma_prime: Option<f64>) -> ScenarioConfig {
    ScenarioConfig {
        grid,
        gamma_prime_override: gamma_prime,
        ..ScenarioConfig::new(name, p)
    }
}

/// Numeric and analytic spectra without emission and at `gamma = 1e4`.
fn spectra_pair(
    fig: Figure,
    base: SystemParams,
    grid: GridSpec,
    emission_gamma_prime: impl Fn(&SystemParams) -> f64,
) -> Result<FigureData, crate::ScenarioError> {
    let name = fig.name();
    let omegas = grid.to_grid();
    let lossy = SystemParams {
        gamma: EMISSION_GAMMA,
        ..base
    };
    let mut header = vec!["omega_over_kappa0".to_string()];
    let mut series: Vec<SpectrumSeries> = Vec::new();
    let mut parameters = Vec::new();
    for (tag, p, gp) in [("gamma0", base, 0.0), ("emission", lossy, emission_gamma_prime(&lossy))] {
        let eff = coefficients_for(&p, Some(gp), 1.0, name)?;
        let full = NumericSteady::solve(&p, name)?.spectrum(&omegas, name)?;
        let opa = analytic_spectrum(eff.alpha_bar, p.kappa, eff.kappa_prime, &omegas)
            .at(name, Stage::Analytic)?;
        header.push(format!("{}[gamma={}]", full.provenance(), p.gamma));
        header.push(format!("{}[gamma_prime={gp}]", opa.provenance()));
        series.push(full);
        series.push(opa);
        parameters.push(config(&format!("{name}_{tag}"), p, grid, Some(gp)));
    }
    Ok(FigureData {
        figure: fig,
        table: columns(header, omegas.values(), &series),
        parameters,
        notes: String::new(),
    })
}

fn columns(header: Vec<String>, x: &[f64], series: &[SpectrumSeries]) -> Table {
    let mut t = Table::new(header);
    for (i, w) in x.iter().enumerate() {
        let mut row = vec![num(*w)];
        row.extend(series.iter().map(|s| num(s.points()[i].s)));
        t.push(row);
    }
    t
}

fn analytic_s0(alpha: f64, kappa: f64, kappa_prime: f64, name: &str) -> Result<f64, crate::ScenarioError> {
    // routes through the checked constructor so threshold crossings surface
    let grid = dipole_squeeze::OmegaGrid::single(0.0).at(name, Stage::Analytic)?;
    analytic_spectrum(alpha, kappa, kappa_prime, &grid)
        .at(name, Stage::Analytic)
        .map(|s| s.points()[0].s)
}

/// Numeric point of a trend dataset. A cutoff that is too small for this
/// point blanks it and records why, instead of aborting the whole curve.
fn trend_point(
    p: &SystemParams,
    name: &str,
    skipped: &mut Vec<String>,
) -> Result<Option<NumericSteady>, crate::ScenarioError> {
    match NumericSteady::solve(p, name) {
        Ok(n) => Ok(Some(n)),
        Err(e) => match e.library() {
            Some(lib @ Error::TruncationInsufficient { .. }) => {
                log::warn!("{name}: kappa = {}, gamma = {}: {lib}", p.kappa, p.gamma);
                skipped.push(format!(
                    "skipped numeric point kappa = {}, gamma = {}: {lib}",
                    p.kappa, p.gamma
                ));
                Ok(None)
            }
            _ => Err(e),
        },
    }
}

fn s0_of(n: &Option<NumericSteady>, name: &str) -> Result<Option<f64>, crate::ScenarioError> {
    n.as_ref().map(|n| n.s0(name)).transpose()
}

fn with_skipped(mut notes: String, skipped: &[String]) -> String {
    for s in skipped {
        notes.push_str(s);
        notes.push('\n');
    }
    notes
}

/// `S(0)` against `kappa` at fixed gain, without emission and at `gamma = 1e4`.
fn fig5(grid: GridSpec, n_max: usize) -> Result<FigureData, crate::ScenarioError> {
    let name = "fig5";
    let mut t = Table::new([
        "kappa_over_kappa0".to_string(),
        "numeric_full[S0;gamma=0]".to_string(),
        "analytic_opa[S0;gamma_prime=0]".to_string(),
        format!("numeric_full[S0;gamma={EMISSION_GAMMA}]"),
        format!("analytic_opa[S0;gamma_prime={EMISSION_GAMMA_PRIME}]"),
    ]);
    let mut skipped = Vec::new();
    for kappa in grid.values() {
        let mut row = vec![num(kappa)];
        for (gamma, gp) in [(0.0, 0.0), (EMISSION_GAMMA, EMISSION_GAMMA_PRIME)] {
            let p = SystemParams {
                kappa,
                gamma,
                n_max,
                ..SystemParams::fig3()
            };
            let eff = coefficients_for(&p, Some(gp), 1.0, name)?;
            let n = trend_point(&p, name, &mut skipped)?;
            row.push(opt_num(s0_of(&n, name)?));
            row.push(num(analytic_s0(eff.alpha_bar, kappa, eff.kappa_prime, name)?));
        }
        t.push(row);
    }
    let base = SystemParams { n_max, ..SystemParams::fig3() };
    Ok(FigureData {
        figure: Figure::Fig5,
        table: t,
        parameters: vec![
            config("fig5_gamma0", base, grid, Some(0.0)),
            config(
                "fig5_emission",
                SystemParams { gamma: EMISSION_GAMMA, ..base },
                grid,
                Some(EMISSION_GAMMA_PRIME),
            ),
        ],
        notes: with_skipped(
            "abscissa is kappa, which replaces kappa in the parameter blocks\n".into(),
            &skipped,
        ),
    })
}

/// `S(0)` against `gamma` for two cavity decay rates.
fn fig6(grid: GridSpec, n_max: usize, prefactor: f64) -> Result<FigureData, crate::ScenarioError> {
    let name = "fig6";
    let kappas = [1.0, 0.5];
    let mut header = vec!["gamma_over_kappa0".to_string()];
    for k in kappas {
        header.push(format!("numeric_full[S0;kappa={k}]"));
        header.push(format!("analytic_opa[S0;kappa={k}]"));
    }
    let mut t = Table::new(header);
    let mut skipped = Vec::new();
    for gamma in grid.values() {
        let mut row = vec![num(gamma)];
        for kappa in kappas {
            let p = SystemParams {
                kappa,
                gamma,
                n_max,
                ..SystemParams::fig3()
            };
            let eff = coefficients_for(&p, None, prefactor, name)?;
            let n = trend_point(&p, name, &mut skipped)?;
            row.push(opt_num(s0_of(&n, name)?));
            row.push(num(analytic_s0(eff.alpha_bar, kappa, eff.kappa_prime, name)?));
        }
        t.push(row);
    }
    let base = SystemParams { n_max, ..SystemParams::fig3() };
    Ok(FigureData {
        figure: Figure::Fig6,
        table: t,
        parameters: kappas
            .iter()
            .map(|&kappa| config(&format!("fig6_kappa{kappa}"), SystemParams { kappa, ..base }, grid, None))
            .collect(),
        notes: with_skipped(
            format!(
                "abscissa is gamma, which replaces gamma in the parameter blocks; analytic gamma' = {prefactor} gamma g^2 / Delta^2\n"
            ),
            &skipped,
        ),
    })
}

/// `S(0)` and the squeezed-quadrature variance against `kappa' = kappa + gamma'`,
/// once with `gamma' = 0` and once with `kappa = gamma' = kappa'/2`.
fn fig7(grid: GridSpec, n_max: usize, prefactor: f64) -> Result<FigureData, crate::ScenarioError> {
    let name = "fig7";
    let base = SystemParams { n_max, ..SystemParams::fig3() };
    let mut t = Table::new([
        "kappa_prime_over_kappa0",
        "numeric_full[S0;gamma_prime=0]",
        "analytic_opa[S0;gamma_prime=0]",
        "numeric_full[S0;kappa=gamma_prime]",
        "analytic_opa[S0;kappa=gamma_prime]",
        "numeric_full[variance;gamma_prime=0]",
        "numeric_full[variance;kappa=gamma_prime]",
        "analytic_opa[variance]",
    ]);
    // gamma realising a given gamma' through the model's own mapping
    let per_gamma = gamma_prime(&SystemParams { gamma: 1.0, ..base }, prefactor);
    if !(per_gamma > 0.0) {
        return Err(crate::ScenarioError::Unsupported {
            scenario: name.into(),
            reason: "gamma' mapping vanishes; need g > 0 and a positive prefactor".into(),
        });
    }
    let alpha = coefficients_for(&base, Some(0.0), 1.0, name)?.alpha_bar;
    let mut skipped = Vec::new();
    for kp in grid.values() {
        let closed = SystemParams { kappa: kp, ..base };
        let split = SystemParams {
            kappa: kp / 2.0,
            gamma: kp / 2.0 / per_gamma,
            ..base
        };
        let a = trend_point(&closed, name, &mut skipped)?;
        let b = trend_point(&split, name, &mut skipped)?;
        let var = opa_quadrature_variance(alpha, kp).at(name, Stage::Analytic)?;
        t.push(vec![
            num(kp),
            opt_num(s0_of(&a, name)?),
            num(analytic_s0(alpha, kp, kp, name)?),
            opt_num(s0_of(&b, name)?),
            num(analytic_s0(alpha, kp / 2.0, kp, name)?),
            opt_num(a.as_ref().map(NumericSteady::variance)),
            opt_num(b.as_ref().map(NumericSteady::variance)),
            num(var),
        ]);
    }
    Ok(FigureData {
        figure: Figure::Fig7,
        table: t,
        parameters: vec![config("fig7_base", base, grid, None)],
        notes: with_skipped(
            format!(
                "abscissa is kappa'; split curve uses kappa = kappa'/2 and gamma = (kappa'/2) Delta^2 / ({prefactor} g^2)\n"
            ),
            &skipped,
        ),
    })
}

/// Amplifier spectrum with and without the vibration correction, and the
/// secular-averaged Langevin model as an independent route.
fn fig8(grid: GridSpec, n_max: usize) -> Result<FigureData, crate::ScenarioError> {
    let name = "fig8";
    let p = SystemParams { n_max, ..SystemParams::fig3() };
    let motion = MotionParams::with_default_phases(FIG8_NU, FIG8_K_QBAR).at(name, Stage::Motion)?;
    let eff = coefficients_for(&p, Some(0.0), 1.0, name)?;
    let omegas = grid.to_grid();
    let moved = motion_spectrum(eff.alpha_bar, p.kappa, eff.kappa_prime, FIG8_K_QBAR, &omegas)
        .at(name, Stage::Motion)?;
    let still = analytic_spectrum(eff.alpha_bar, p.kappa, eff.kappa_prime, &omegas)
        .at(name, Stage::Analytic)?;
    let averaged = averaged_motion_model(&p, &eff, motion).at(name, Stage::Motion)?;
    let oracle = langevin_output_spectrum(&averaged, DEFAULT_PHASE, &omegas).at(name, Stage::Motion)?;
    let header = vec![
        "omega_over_kappa0".to_string(),
        format!("{}[k_qbar={FIG8_K_QBAR}]", moved.provenance()),
        format!("{}[k_qbar=0]", still.provenance()),
        format!("{}[secular;k_qbar={FIG8_K_QBAR}]", oracle.provenance()),
    ];
    Ok(FigureData {
        figure: Figure::Fig8,
        table: columns(header, omegas.values(), &[moved, still, oracle]),
        parameters: vec![ScenarioConfig {
            motion: Some(motion),
            ..config("fig8", p, grid, Some(0.0))
        }],
        notes: String::new(),
    })
}
