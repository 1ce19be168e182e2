use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a dynamical problem has no usable stationary solution.
#[derive(Debug, Clone, PartialEq)]
pub enum Instability {
    /// The linear solve for the steady state did not satisfy `L rho = 0`.
    SteadyStateResidual { residual: f64, tolerance: f64 },
    /// Parametric gain at or above the total field damping.
    AboveThreshold { alpha: f64, kappa_prime: f64 },
    /// A drift matrix has an eigenvalue with non-negative real part.
    NonHurwitzDrift { max_real_part: f64 },
}

impl std::fmt::Display for Instability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::SteadyStateResidual { residual, tolerance } => write!(
                f,
                "steady-state residual {residual:.3e} exceeds {tolerance:.3e}"
            ),
            Self::AboveThreshold { alpha, kappa_prime } => write!(
                f,
                "parametric gain alpha = {alpha} is not below kappa' = {kappa_prime}"
            ),
            Self::NonHurwitzDrift { max_real_part } => write!(
                f,
                "drift has an eigenvalue with real part {max_real_part:.3e} >= 0"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not hermitian (max |A - A^H| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("not a physical density matrix: {what} = {value:.3e}")]
    NotPhysical { what: &'static str, value: f64 },

    #[error("steady state is not unique (smallest relative pivot {pivot_ratio:.3e})")]
    DegenerateSteadyState { pivot_ratio: f64 },

    #[error("unstable: {0}")]
    Unstable(Instability),

    #[error("resolvent is singular at omega = {omega}")]
    ResolventSingular { omega: f64 },

    #[error("photon cutoff too small: population {tail:.3e} in the top Fock sector exceeds {limit:.1e}")]
    TruncationInsufficient { tail: f64, limit: f64 },

    #[error("eigenvalue computation failed to converge")]
    NoConvergence,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
