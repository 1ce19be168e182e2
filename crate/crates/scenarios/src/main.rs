use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dipole_squeeze_scenarios::config::{parse_range, PRESETS};
use dipole_squeeze_scenarios::{
    parse, preset, run_figure, run_scenario, run_sweep, Figure, FigureOptions, GridSpec, Output,
    Outputs, RunOptions, RunSummary, ScenarioConfig, SweepOptions, SweepParameter,
};

#[derive(Parser)]
#[command(name = "dipole-squeeze", version, about = "Squeezing spectra of two driven atoms in a cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every output listed in the scenario.
    Run(ScenarioArgs),
    /// Numeric and analytic output spectra.
    Spectrum(ScenarioArgs),
    /// Steady-state photon number and quadrature variance.
    Steady(ScenarioArgs),
    /// Effective parametric-amplifier coefficients and regime.
    Coefficients(ScenarioArgs),
    /// Scale-separation checks of the effective model.
    Validity(ScenarioArgs),
    /// Regenerate one of the built-in figure datasets.
    Figure(FigureArgs),
    /// Sweep one parameter and tabulate S(0), photon number and variance.
    Sweep(SweepArgs),
    /// Print a built-in scenario in config-file form.
    Preset { name: String },
}

#[derive(Args)]
struct Common {
    /// Photon-number cutoff.
    #[arg(long)]
    n_max: Option<usize>,
    /// start:stop:count, in units of kappa0.
    #[arg(long)]
    grid: Option<GridSpec>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Factor in gamma' = factor * gamma g^2 / Delta^2.
    #[arg(long)]
    gamma_prime_prefactor: Option<f64>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FigureArgs {
    /// fig3 .. fig8
    figure: Figure,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    parameter: SweepParameter,
    /// start:stop:count or a comma-separated increasing list.
    #[arg(long)]
    range: String,
    /// Skip the full master-equation solves.
    #[arg(long)]
    analytic_only: bool,
    #[command(flatten)]
    scenario: ScenarioArgs,
}

fn load(args: &ScenarioArgs) -> Result<ScenarioConfig, String> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        (None, Some(name)) => preset(name).ok_or_else(|| {
            format!("unknown preset `{name}`; available: {}", PRESETS.join(", "))
        })?,
        (None, None) => unreachable!("clap requires one of --config, --preset"),
    };
    if let Some(n) = args.common.n_max {
        cfg.params.n_max = n;
    }
    if let Some(g) = args.common.grid {
        cfg.grid = g;
    }
    Ok(cfg)
}

fn run_options(c: &Common) -> RunOptions {
    RunOptions {
        out_dir: c.out.clone(),
        gamma_prime_prefactor: c.gamma_prime_prefactor.unwrap_or(1.0),
    }
}

fn single(args: &ScenarioArgs, only: Option<Output>) -> Result<RunSummary, String> {
    let mut cfg = load(args)?;
    if let Some(o) = only {
        cfg.outputs = Outputs::only(o);
    }
    run_scenario(&cfg, &run_options(&args.common)).map_err(|e| e.to_string())
}

fn dispatch(cmd: Command) -> Result<Option<RunSummary>, String> {
    let summary = match cmd {
        Command::Run(a) => single(&a, None)?,
        Command::Spectrum(a) => single(&a, Some(Output::Spectrum))?,
        Command::Steady(a) => single(&a, Some(Output::Steady))?,
        Command::Coefficients(a) => single(&a, Some(Output::Coefficients))?,
        Command::Validity(a) => single(&a, Some(Output::Validity))?,
        Command::Figure(a) => {
            let opts = FigureOptions {
                n_max: a.common.n_max.unwrap_or(15),
                grid: a.common.grid,
                gamma_prime_prefactor: a.common.gamma_prime_prefactor,
            };
            run_figure(a.figure, &opts, &a.common.out).map_err(|e| e.to_string())?
        }
        Command::Sweep(a) => {
            let cfg = load(&a.scenario)?;
            let values = parse_range(&a.range).map_err(|e| format!("--range: {e}"))?;
            let opts = SweepOptions {
                numeric: !a.analytic_only,
                gamma_prime_prefactor: a.scenario.common.gamma_prime_prefactor.unwrap_or(1.0),
            };
            run_sweep(a.parameter, &values, &cfg, &opts, &a.scenario.common.out)
                .map_err(|e| e.to_string())?
        }
        Command::Preset { name } => {
            let cfg = preset(&name).ok_or_else(|| {
                format!("unknown preset `{name}`; available: {}", PRESETS.join(", "))
            })?;
            print!("{cfg}");
            return Ok(None);
        }
    };
    Ok(Some(summary))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Some(summary)) => {
            for f in summary.files.iter().chain(std::iter::once(&summary.manifest)) {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
