pub mod resolvent;
mod spectrum;
mod stats;
mod steady;

pub use spectrum::{
    output_squeezing_spectrum, OmegaGrid, Provenance, SpectrumPoint, SpectrumSeries,
    DEFAULT_PHASE,
};
pub use stats::{
    coherent_amplitudes, expectation, mean_photon_number, nearest_coherent_state,
    quadrature_variance, CoherentFit,
};
pub use steady::{
    check_truncation, steady_state, steady_state_with_report, SteadyStateReport,
    PIVOT_RATIO_FLOOR, RAW_HERMITICITY_TOL, RESIDUAL_TOL, TAIL_LIMIT,
};
