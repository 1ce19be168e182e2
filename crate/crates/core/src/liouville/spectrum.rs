use faer::{Col, Mat};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{
    build_operator_set, quadrature, trace_functional, vectorize, DensityMatrix, Operator,
};
use crate::symmetry::{Sector, SectorBasis};
use crate::system::SuperOperator;

use super::resolvent::{DirectResolvent, HessenbergResolvent, ShiftedResolvent};

/// Quadrature angle of maximal squeezing for the OPA-like regime.
pub const DEFAULT_PHASE: f64 = std::f64::consts::FRAC_PI_4;
/// Grids at least this long amortize a Hessenberg reduction.
const HESSENBERG_MIN_SHIFTS: usize = 8;
/// Relative size below which a source block is treated as absent.
const BLOCK_NEGLIGIBLE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    NumericFull,
    AnalyticOpa,
    AnalyticMotion,
    LangevinOracle,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::NumericFull => "numeric_full",
            Provenance::AnalyticOpa => "analytic_opa",
            Provenance::AnalyticMotion => "analytic_motion",
            Provenance::LangevinOracle => "langevin_oracle",
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Strictly increasing frequency grid, in units of the reference decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaGrid {
    values: Vec<f64>,
}

impl OmegaGrid {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("omega_grid", "empty"));
        }
        if values.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("omega_grid", "non-finite frequency"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("omega_grid", "not strictly increasing"));
        }
        Ok(Self { values })
    }

    /// `count` evenly spaced points from `start` to `stop` inclusive.
    pub fn uniform(start: f64, stop: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(Error::invalid("omega_grid", "zero points")),
            1 if start == stop => Self::from_values(vec![start]),
            1 => Err(Error::invalid("omega_grid", "one point needs start == stop")),
            _ => {
                if !(start < stop) {
                    return Err(Error::invalid("omega_grid", "start must be below stop"));
                }
                let step = (stop - start) / (count - 1) as f64;
                let mut v: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
                v[count - 1] = stop;
                Self::from_values(v)
            }
        }
    }

    pub fn single(omega: f64) -> Result<Self> {
        Self::from_values(vec![omega])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Default for OmegaGrid {
    /// 201 points over [-5, 5].
    fn default() -> Self {
        Self::uniform(-5.0, 5.0, 201).expect("static grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub s: f64,
    /// Imaginary part left over by the numerical route; zero for closed forms.
    pub imag_residue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    phase: f64,
    provenance: Provenance,
    points: Vec<SpectrumPoint>,
}

impl SpectrumSeries {
    pub fn new(phase: f64, provenance: Provenance, points: Vec<SpectrumPoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].omega <= w[0].omega) {
            return Err(Error::invalid("spectrum", "omega not strictly increasing"));
        }
        if let Some(p) = points.iter().find(|p| !p.s.is_finite() || !p.omega.is_finite()) {
            return Err(Error::NotPhysical {
                what: "spectrum value",
                value: p.s,
            });
        }
        Ok(Self {
            phase,
            provenance,
            points,
        })
    }

    /// Builds a closed-form series by evaluating `f` on every grid point.
    pub fn from_fn(
        phase: f64,
        provenance: Provenance,
        grid: &OmegaGrid,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let points = grid
            .values()
            .iter()
            .map(|&omega| SpectrumPoint {
                omega,
                s: f(omega),
                imag_residue: 0.0,
            })
            .collect();
        Self::new(phase, provenance, points)
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.omega)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.s)
    }

    /// Value at a grid frequency (exact match within 1e-12).
    pub fn at(&self, omega: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.omega - omega).abs() <= 1e-12 * (1.0 + omega.abs()))
            .map(|p| p.s)
    }

    pub fn max_imag_residue(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.imag_residue.abs())
            .fold(0.0, f64::max)
    }

    pub fn min(&self) -> Option<SpectrumPoint> {
        self.points
            .iter()
            .copied()
            .min_by(|a, b| a.s.total_cmp(&b.s))
    }
}

/// One invariant block of the bilinear form `F(w) = c^T (L - i w)^{-1} b`.
struct Block {
    solver: Box<dyn ShiftedResolvent>,
}

fn build_blocks(
    l: &SuperOperator,
    rho: &DensityMatrix,
    c: &Col<Complex64>,
    b: &Col<Complex64>,
    shifts: usize,
) -> Vec<Block> {
    let d = l.space().dim();
    let bases: Vec<(SectorBasis, bool)> = match l.symmetry() {
        Some(sym) => Sector::BOTH
            .iter()
            .map(|&s| (sym.sector_basis(l.space(), s), s == Sector::Even))
            .collect(),
        None => vec![(SectorBasis::full(l.size()), true)],
    };
    let b_norm = (0..b.nrows()).map(|i| b[i].norm()).fold(0.0, f64::max);
    let vec_rho = vectorize(rho.matrix());

    let mut blocks = Vec::new();
    for (basis, holds_steady_state) in bases {
        let bs = basis.restrict(b.as_ref());
        let bs_norm = (0..bs.nrows()).map(|i| bs[i].norm()).fold(0.0, f64::max);
        if bs_norm <= BLOCK_NEGLIGIBLE * b_norm {
            continue;
        }
        let cs = basis.restrict(c.as_ref());
        let mut a: Mat<Complex64> = basis.restrict_matrix(l.matrix());
        if holds_steady_state {
            // L + vec(rho) t^T: moves the zero eigenvalue to Tr(rho) = 1 and
            // leaves the action on traceless vectors untouched.
            let r = basis.restrict(vec_rho.as_ref());
            let t = basis.trace_row(d);
            for j in 0..a.ncols() {
                if t[j].norm() == 0.0 {
                    continue;
                }
                for i in 0..a.nrows() {
                    a[(i, j)] += r[i] * t[j];
                }
            }
        }
        log::debug!(
            "resolvent block of size {} (steady block: {holds_steady_state})",
            a.nrows()
        );
        let solver: Box<dyn ShiftedResolvent> = if shifts >= HESSENBERG_MIN_SHIFTS {
            Box::new(HessenbergResolvent::new(a, cs.as_ref(), bs.as_ref()))
        } else {
            Box::new(DirectResolvent::new(a, cs.as_ref(), bs.as_ref()))
        };
        blocks.push(Block { solver });
    }
    blocks
}

/// Squeezing spectrum of the output quadrature at angle `phase`, from the
/// quantum-regression resolvent of `l` around `rho_st`.
pub fn output_squeezing_spectrum(
    l: &SuperOperator,
    rho_st: &DensityMatrix,
    kappa: f64,
    phase: f64,
    omega_grid: &OmegaGrid,
) -> Result<SpectrumSeries> {
    if rho_st.space() != l.space() {
        return Err(Error::DimensionMismatch {
            expected: l.space().dim(),
            found: rho_st.space().dim(),
        });
    }
    if !(kappa >= 0.0) || !phase.is_finite() {
        return Err(Error::invalid("kappa/phase", "must be finite, kappa >= 0"));
    }
    let space = l.space();
    let ops = build_operator_set(space);
    let mean_a = rho_st.expectation(&ops.a)?;
    let id = Operator::identity(space);
    let da = &ops.a - &id.scale(mean_a);
    let da_dag = da.adjoint();
    let rho = rho_st.operator();
    let e_minus = Complex64::from_polar(1.0, -phase);
    let source = &(&da * rho).scale(e_minus) + &(rho * &da_dag).scale(e_minus.conj());
    let mean_x = rho_st.expectation(&quadrature(phase, &ops))?.re;
    let dx = &quadrature(phase, &ops) - &id.scale(Complex64::new(mean_x, 0.0));

    let b = vectorize(source.matrix());
    let c = trace_functional(dx.matrix());

    // F(w) and F(-w) are both needed; F(-w) = conj F(w) holds only for the
    // exact solution, so its violation doubles as an accuracy probe.
    let omegas = omega_grid.values();
    let blocks = build_blocks(l, rho_st, &c, &b, 2 * omegas.len());
    let f = |w: f64| -> Result<Complex64> {
        let shift = Complex64::new(0.0, w);
        blocks.iter().try_fold(Complex64::new(0.0, 0.0), |acc, blk| {
            blk.solver
                .eval(shift)
                .map(|v| acc + v)
                .ok_or(Error::ResolventSingular { omega: w })
        })
    };
    let points = omegas
        .par_iter()
        .map(|&w| -> Result<SpectrumPoint> {
            let s = Complex64::new(1.0, 0.0) - 2.0 * kappa * (f(w)? + f(-w)?);
            Ok(SpectrumPoint {
                omega: w,
                s: s.re,
                imag_residue: s.im,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumSeries::new(phase, Provenance::NumericFull, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::steady_state;
    use crate::system::{SystemModel, SystemParams};

    #[test]
    fn grid_validation() {
        assert!(OmegaGrid::uniform(0.0, 1.0, 0).is_err());
        assert!(OmegaGrid::uniform(1.0, 0.0, 5).is_err());
        assert!(OmegaGrid::uniform(0.0, 1.0, 1).is_err());
        assert_eq!(OmegaGrid::uniform(2.0, 2.0, 1).unwrap().values(), &[2.0]);
        assert!(OmegaGrid::from_values(vec![0.0, 0.0]).is_err());
        assert!(OmegaGrid::from_values(vec![0.0, f64::NAN]).is_err());
        let g = OmegaGrid::default();
        assert_eq!(g.len(), 201);
        assert_eq!(g.values()[0], -5.0);
        assert_eq!(g.values()[200], 5.0);
        assert!((g.values()[100]).abs() < 1e-15);
    }

    #[test]
    fn series_rejects_disorder_and_nan() {
        let pt = |omega, s| SpectrumPoint {
            omega,
            s,
            imag_residue: 0.0,
        };
        assert!(SpectrumSeries::new(0.0, Provenance::AnalyticOpa, vec![pt(1.0, 1.0), pt(0.0, 1.0)]).is_err());
        assert!(SpectrumSeries::new(0.0, Provenance::AnalyticOpa, vec![pt(0.0, f64::NAN)]).is_err());
        let s = SpectrumSeries::new(0.0, Provenance::AnalyticOpa, vec![pt(0.0, 0.5), pt(1.0, 0.25)]).unwrap();
        assert_eq!(s.at(1.0), Some(0.25));
        assert_eq!(s.at(0.5), None);
        assert_eq!(s.min().unwrap().omega, 1.0);
        assert_eq!(Provenance::LangevinOracle.tag(), "langevin_oracle");
    }

    fn small_driven(n_max: usize) -> SystemParams {
        SystemParams {
            n_max,
            gamma: 200.0,
            ..SystemParams::fig3()
        }
    }

    #[test]
    fn dark_cavity_output_is_vacuum() {
        let p = SystemParams {
            g: 0.0,
            omega: 0.0,
            gamma: 1.0,
            n_max: 3,
            ..SystemParams::fig3()
        };
        let model = SystemModel::new(p).unwrap();
        let rho = steady_state(&model.liouvillian).unwrap();
        let grid = OmegaGrid::uniform(-3.0, 3.0, 13).unwrap();
        let s = output_squeezing_spectrum(&model.liouvillian, &rho, 1.0, DEFAULT_PHASE, &grid)
            .unwrap();
        for p in s.points() {
            assert!((p.s - 1.0).abs() <= 1e-12, "{p:?}");
        }
    }

    #[test]
    fn solver_routes_agree() {
        let model = SystemModel::new(small_driven(4)).unwrap();
        let rho = steady_state(&model.liouvillian).unwrap();
        let grid = OmegaGrid::uniform(-2.0, 1.5, 8).unwrap();
        let many = output_squeezing_spectrum(&model.liouvillian, &rho, 1.0, 0.4, &grid).unwrap();
        let plain = model.liouvillian.clone().with_symmetry(None);
        let unsplit = output_squeezing_spectrum(&plain, &rho, 1.0, 0.4, &grid).unwrap();
        for (i, &w) in grid.values().iter().enumerate() {
            let single = output_squeezing_spectrum(
                &model.liouvillian,
                &rho,
                1.0,
                0.4,
                &OmegaGrid::single(w).unwrap(),
            )
            .unwrap();
            let a = many.points()[i].s;
            assert!((a - single.points()[0].s).abs() <= 1e-9);
            assert!((a - unsplit.points()[i].s).abs() <= 1e-9);
        }
        assert!(many.max_imag_residue() <= 1e-8);
    }

    #[test]
    fn mismatched_state_is_rejected() {
        let model = SystemModel::new(small_driven(2)).unwrap();
        let other = SystemModel::new(small_driven(3)).unwrap();
        let rho = steady_state(&other.liouvillian).unwrap();
        let err = output_squeezing_spectrum(
            &model.liouvillian,
            &rho,
            1.0,
            DEFAULT_PHASE,
            &OmegaGrid::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
