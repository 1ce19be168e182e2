//! Figure datasets, parameter sweeps and scenario files for `dipole-squeeze`.
//!
//! Every run writes CSV tables plus a plain-text manifest. Files are written
//! to a temporary name and renamed into place.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod figures;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{parse, preset, ConfigError, GridSpec, Output, Outputs, ScenarioConfig};
pub use figures::{figure_data, run_figure, Figure, FigureOptions};
pub use run::{run_scenario, RunOptions, RunSummary, ScenarioError, Stage};
pub use sweep::{run_sweep, sweep, SweepOptions, SweepParameter};
