//! Two driven atoms in a single-mode cavity: full master-equation numerics
//! for the squeezed output field, and the closed forms of the dispersive
//! (parametric-amplifier) limit they are compared against.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod liouville;
pub mod motion;
pub mod opa;
pub mod quantum;
pub mod symmetry;
pub mod system;

pub use error::{Error, Instability, Result};
pub use liouville::{
    output_squeezing_spectrum, steady_state, OmegaGrid, Provenance, SpectrumPoint, SpectrumSeries,
};
pub use opa::{effective_coefficients, EffectiveCoefficients, MotionParams, Regime};
pub use system::{SystemModel, SystemParams};
