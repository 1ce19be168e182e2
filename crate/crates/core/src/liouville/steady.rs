use faer::linalg::solvers::Solve;
use faer::{Col, Mat};
use num_complex::Complex64;

use crate::error::{Error, Instability, Result};
use crate::quantum::{devectorize, hermiticity_defect, DensityMatrix, Operator};
use crate::symmetry::{Sector, SectorBasis};
use crate::system::SuperOperator;

/// Smallest admissible `min|U_kk| / max|U_kk|` of the bordered system.
pub const PIVOT_RATIO_FLOOR: f64 = 1e-14;
/// `||L vec(rho)||_inf <= RESIDUAL_TOL * ||L||_inf`.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Anti-Hermitian part tolerated before symmetrization.
pub const RAW_HERMITICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateReport {
    /// `||L vec(rho)||_inf / ||L||_inf`.
    pub relative_residual: f64,
    pub pivot_ratio: f64,
    pub raw_hermiticity_defect: f64,
    /// Side of the linear system actually solved.
    pub block_size: usize,
}

/// Basis of the block holding the steady state: the even exchange sector
/// when the generator declares a symmetry, everything otherwise.
pub(crate) fn steady_block(l: &SuperOperator) -> SectorBasis {
    match l.symmetry() {
        Some(sym) => sym.sector_basis(l.space(), Sector::Even),
        None => SectorBasis::full(l.size()),
    }
}

/// Largest population tolerated in the highest photon-number sector.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Returns the top-sector population, or an error if it exceeds `limit`.
pub fn check_truncation(rho: &DensityMatrix, limit: f64) -> Result<f64> {
    let tail = rho.top_sector_population();
    if !(tail <= limit) {
        return Err(Error::TruncationInsufficient { tail, limit });
    }
    Ok(tail)
}

pub fn steady_state(l: &SuperOperator) -> Result<DensityMatrix> {
    steady_state_with_report(l).map(|(rho, _)| rho)
}

/// Solves `L vec(rho) = 0` with `Tr rho = 1` by replacing one equation with
/// the trace condition.
pub fn steady_state_with_report(l: &SuperOperator) -> Result<(DensityMatrix, SteadyStateReport)> {
    let d = l.space().dim();
    let basis = steady_block(l);
    let n = basis.len();
    let mut a = basis.restrict_matrix(l.matrix());
    let t = basis.trace_row(d);

    // Any equation carrying trace weight can be traded for the trace condition.
    let r = (0..n)
        .find(|&i| t[i].norm() > 0.0)
        .ok_or(Error::DegenerateSteadyState { pivot_ratio: 0.0 })?;
    for j in 0..n {
        a[(r, j)] = t[j];
    }
    let mut rhs = Col::<Complex64>::zeros(n);
    rhs[r] = Complex64::new(1.0, 0.0);

    let lu = a.partial_piv_lu();
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..n {
        let p = u[(k, k)].norm();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(pivot_ratio >= PIVOT_RATIO_FLOOR) {
        return Err(Error::DegenerateSteadyState { pivot_ratio });
    }
    let x = lu.solve(&rhs);
    if (0..n).any(|i| !x[i].is_finite()) {
        return Err(Error::DegenerateSteadyState { pivot_ratio });
    }

    let v = basis.embed(x.as_ref());
    let lv: Col<Complex64> = l.matrix() * &v;
    let norm_l = l.norm_inf();
    let res = (0..lv.nrows()).map(|i| lv[i].norm()).fold(0.0, f64::max);
    let relative_residual = if norm_l > 0.0 { res / norm_l } else { res };
    if relative_residual > RESIDUAL_TOL {
        return Err(Error::Unstable(Instability::SteadyStateResidual {
            residual: relative_residual,
            tolerance: RESIDUAL_TOL,
        }));
    }

    let raw = devectorize(v.as_ref(), d)?;
    let raw_defect = hermiticity_defect(raw.as_ref());
    if raw_defect > RAW_HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect: raw_defect });
    }
    let sym = Mat::from_fn(d, d, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)].conj()));
    let rho = DensityMatrix::new(Operator::new(l.space(), sym)?)?;
    Ok((
        rho,
        SteadyStateReport {
            relative_residual,
            pivot_ratio,
            raw_hermiticity_defect: raw_defect,
            block_size: n,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{AtomState, BasisState};
    use crate::system::{SystemModel, SystemParams};

    fn dark(gamma: f64) -> SystemParams {
        SystemParams {
            g: 0.0,
            omega: 0.0,
            gamma,
            n_max: 3,
            ..SystemParams::fig3()
        }
    }

    #[test]
    fn dark_cavity_relaxes_to_ground_vacuum() {
        let model = SystemModel::new(dark(1.0)).unwrap();
        let rho = steady_state(&model.liouvillian).unwrap();
        let ground = DensityMatrix::basis_state(
            model.liouvillian.space(),
            BasisState {
                atom1: AtomState::Ground,
                atom2: AtomState::Ground,
                photons: 0,
            },
        );
        assert!(rho.operator().max_abs_diff(ground.operator()) <= 1e-12);
    }

    #[test]
    fn undamped_dark_atoms_have_no_unique_steady_state() {
        let model = SystemModel::new(dark(0.0)).unwrap();
        let err = steady_state(&model.liouvillian).unwrap_err();
        assert!(
            matches!(err, Error::DegenerateSteadyState { .. }),
            "unexpected {err:?}"
        );
    }

    #[test]
    fn driven_steady_state_meets_residual_bound() {
        let p = SystemParams {
            n_max: 4,
            gamma: 50.0,
            ..SystemParams::fig3()
        };
        let model = SystemModel::new(p).unwrap();
        let (rho, report) = steady_state_with_report(&model.liouvillian).unwrap();
        assert!(report.relative_residual <= RESIDUAL_TOL);
        assert!((rho.operator().trace().re - 1.0).abs() <= 1e-12);
        assert!(report.block_size < model.liouvillian.size());
        // same answer without the symmetry split
        let plain = model.liouvillian.clone().with_symmetry(None);
        let (rho_full, full_report) = steady_state_with_report(&plain).unwrap();
        assert_eq!(full_report.block_size, plain.size());
        assert!(rho.operator().max_abs_diff(rho_full.operator()) <= 1e-10);
    }
}
