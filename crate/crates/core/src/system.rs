//! Physical parameters, the Hamiltonian and the Lindblad generator.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use faer::{Col, Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{
    add_sandwich, devectorize, vectorize, Atom, HilbertSpace, Operator, OperatorSet,
    SparseEntries,
};
use crate::symmetry::ExchangeSymmetry;

/// All rates are angular frequencies in units of a reference rate `kappa0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Laser-atom detuning `omega_L - omega_0`.
    pub delta: f64,
    /// Laser-cavity detuning `omega_L - omega_c`.
    pub delta_c: f64,
    /// Vacuum coupling amplitude; atom `j` couples with `g cos(k x_j)`.
    pub g: f64,
    /// Laser Rabi frequency.
    pub omega: f64,
    /// Spontaneous emission rate (population decay).
    pub gamma: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    pub kx1: f64,
    pub kx2: f64,
    pub n_max: usize,
}

impl SystemParams {
    /// Operating point of the squeezing figures: half-wavelength pattern,
    /// `alpha = kappa0 / 2`, no spontaneous emission.
    pub fn fig3() -> Self {
        Self {
            delta: -1.25e5,
            delta_c: -24.0,
            g: 1.25e3,
            omega: 1.25e4,
            gamma: 0.0,
            kappa: 1.0,
            kx1: 0.0,
            kx2: PI,
            n_max: 15,
        }
    }

    /// Stronger coupling where the Kerr term competes with the parametric one.
    pub fn fig4() -> Self {
        Self {
            g: 1.25e4,
            kappa: 100.0,
            delta_c: -2400.0,
            ..Self::fig3()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("delta", self.delta),
            ("delta_c", self.delta_c),
            ("g", self.g),
            ("omega", self.omega),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("kx1", self.kx1),
            ("kx2", self.kx2),
        ];
        for (name, v) in rates {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("g", self.g),
            ("omega", self.omega),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if self.n_max < 1 {
            return Err(Error::invalid("n_max", "photon cutoff must be at least 1"));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(self.n_max)
    }

    /// `g cos(k x_j)`.
    pub fn local_coupling(&self, j: Atom) -> f64 {
        match j {
            Atom::One => self.g * self.kx1.cos(),
            Atom::Two => self.g * self.kx2.cos(),
        }
    }

    pub fn geometry(&self) -> PatternGeometry {
        PatternGeometry::classify(self.kx1, self.kx2)
    }

    pub fn exchange_symmetry(&self) -> Option<ExchangeSymmetry> {
        ExchangeSymmetry::detect(self.kx1.cos(), self.kx2.cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternLabel {
    /// Atoms at antinodes a whole number of wavelengths apart.
    Lambda,
    /// Atoms at antinodes an odd number of half wavelengths apart.
    HalfLambda,
    Custom,
}

/// Atomic positions along the cavity axis, as phases `k x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternGeometry {
    pub label: PatternLabel,
    pub kx1: f64,
    pub kx2: f64,
}

/// Tolerance on `|cos(k x)| = 1` when naming a pattern.
const ANTINODE_TOL: f64 = 1e-12;

impl PatternGeometry {
    /// Both atoms at antinodes with equal sign of `cos(k x)`.
    pub fn lambda(periods: i32) -> Self {
        Self {
            label: PatternLabel::Lambda,
            kx1: 0.0,
            kx2: 2.0 * PI * periods as f64,
        }
    }

    /// Both atoms at antinodes with opposite sign of `cos(k x)`.
    pub fn half_lambda(half_periods_odd: i32) -> Result<Self> {
        if half_periods_odd % 2 == 0 {
            return Err(Error::invalid(
                "half_periods_odd",
                "must be odd to place the atoms in anti-phase",
            ));
        }
        Ok(Self {
            label: PatternLabel::HalfLambda,
            kx1: 0.0,
            kx2: PI * half_periods_odd as f64,
        })
    }

    pub fn classify(kx1: f64, kx2: f64) -> Self {
        let (c1, c2) = (kx1.cos(), kx2.cos());
        let at_antinodes =
            (c1.abs() - 1.0).abs() <= ANTINODE_TOL && (c2.abs() - 1.0).abs() <= ANTINODE_TOL;
        let label = if !at_antinodes {
            PatternLabel::Custom
        } else if c1.signum() == c2.signum() {
            PatternLabel::Lambda
        } else {
            PatternLabel::HalfLambda
        };
        Self { label, kx1, kx2 }
    }
}

/// Collective couplings `g± = (g / sqrt 2)(cos k x1 ± cos k x2)` to the
/// symmetric and antisymmetric Dicke states.
pub fn coupling_constants(kx1: f64, kx2: f64, g: f64) -> (f64, f64) {
    let (c1, c2) = (kx1.cos(), kx2.cos());
    (g * FRAC_1_SQRT_2 * (c1 + c2), g * FRAC_1_SQRT_2 * (c1 - c2))
}

fn check_space(p: &SystemParams, ops: &OperatorSet) -> Result<()> {
    p.validate()?;
    let expected = p.space()?;
    if ops.space() != expected {
        return Err(Error::DimensionMismatch {
            expected: expected.dim(),
            found: ops.space().dim(),
        });
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `H / hbar` in the frame rotating at the laser frequency, atoms pinned.
pub fn build_hamiltonian(p: &SystemParams, ops: &OperatorSet) -> Result<Operator> {
    check_space(p, ops)?;
    let mut h = ops.number.scale(real(-p.delta_c));
    for j in Atom::BOTH {
        let s = ops.sigma(j);
        let sd = ops.sigma_dag(j);
        let gj = p.local_coupling(j);
        let projector = sd * s;
        h = &h + &projector.scale(real(-p.delta));
        h = &h + &(sd + s).scale(real(p.omega));
        let exchange = &(&ops.a_dag * s) + &(sd * &ops.a);
        h = &h + &exchange.scale(real(gj));
    }
    Ok(h)
}

/// Matrix of a Lindblad generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    space: HilbertSpace,
    matrix: Mat<Complex64>,
    symmetry: Option<ExchangeSymmetry>,
}

impl SuperOperator {
    pub fn new(space: HilbertSpace, matrix: Mat<Complex64>) -> Result<Self> {
        let n = space.dim() * space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            space,
            matrix,
            symmetry: None,
        })
    }

    /// Declares an exchange symmetry the generator is known to commute with.
    pub fn with_symmetry(mut self, symmetry: Option<ExchangeSymmetry>) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn symmetry(&self) -> Option<ExchangeSymmetry> {
        self.symmetry
    }

    /// Side of the matrix, `dim^2`.
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let m = &self.matrix;
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `L rho` as an operator.
    pub fn apply(&self, rho: MatRef<'_, Complex64>) -> Result<Mat<Complex64>> {
        let d = self.space.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        let v = vectorize(rho);
        let out: Col<Complex64> = &self.matrix * &v;
        devectorize(out.as_ref(), d)
    }
}

/// Accumulates the dissipator `rate (2 C rho C^H - C^H C rho - rho C^H C)`.
fn add_dissipator(target: &mut Mat<Complex64>, rate: f64, c: &Operator) {
    if rate == 0.0 {
        return;
    }
    let d = c.space().dim();
    let id = SparseEntries::identity(d);
    let jump = SparseEntries::from_dense(c.matrix());
    let c_dag = c.adjoint();
    let jump_dag = SparseEntries::from_dense(c_dag.matrix());
    let cdc = &c_dag * c;
    let cdc_sparse = SparseEntries::from_dense(cdc.matrix());
    add_sandwich(target, real(2.0 * rate), &jump, &jump_dag);
    add_sandwich(target, real(-rate), &cdc_sparse, &id);
    add_sandwich(target, real(-rate), &id, &cdc_sparse);
}

/// The full generator: coherent part, cavity decay at rate `kappa`, and
/// spontaneous emission at rate `gamma` for each atom. The recoil-displaced
/// state in the emission term is replaced by `rho` itself (atoms pinned).
pub fn build_liouvillian(p: &SystemParams, ops: &OperatorSet) -> Result<SuperOperator> {
    let h = build_hamiltonian(p, ops)?;
    let space = ops.space();
    let d = space.dim();
    let mut l = Mat::<Complex64>::zeros(d * d, d * d);
    let id = SparseEntries::identity(d);
    let hs = SparseEntries::from_dense(h.matrix());
    // -i [H, rho] = -i H rho + i rho H
    add_sandwich(&mut l, Complex64::new(0.0, -1.0), &hs, &id);
    add_sandwich(&mut l, Complex64::new(0.0, 1.0), &id, &hs);
    add_dissipator(&mut l, p.kappa, &ops.a);
    for j in Atom::BOTH {
        add_dissipator(&mut l, 0.5 * p.gamma, ops.sigma(j));
    }
    Ok(SuperOperator::new(space, l)?.with_symmetry(p.exchange_symmetry()))
}

/// The operators and generator of one parameter set, built together.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub params: SystemParams,
    pub ops: OperatorSet,
    pub hamiltonian: Operator,
    pub liouvillian: SuperOperator,
}

impl SystemModel {
    pub fn new(params: SystemParams) -> Result<Self> {
        params.validate()?;
        let ops = crate::quantum::build_operator_set(params.space()?);
        let hamiltonian = build_hamiltonian(&params, &ops)?;
        let liouvillian = build_liouvillian(&params, &ops)?;
        Ok(Self {
            params,
            ops,
            hamiltonian,
            liouvillian,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_operator_set, AtomState, BasisState};

    fn small(n_max: usize) -> SystemParams {
        SystemParams {
            delta: -3.0,
            delta_c: 0.7,
            g: 1.1,
            omega: 0.6,
            gamma: 0.4,
            kappa: 0.9,
            kx1: 0.3,
            kx2: 1.9,
            n_max,
        }
    }

    #[test]
    fn coupling_constants_patterns() {
        let g = 2.5;
        let (gp, gm) = coupling_constants(0.0, 2.0 * PI, g);
        assert!((gp - 2f64.sqrt() * g).abs() < 1e-14 && gm.abs() < 1e-14);
        let (gp, gm) = coupling_constants(0.0, PI, g);
        assert!(gp.abs() < 1e-14 && (gm - 2f64.sqrt() * g).abs() < 1e-14);
        let (gp, gm) = coupling_constants(0.0, PI / 2.0, g);
        assert!((gp - g / 2f64.sqrt()).abs() < 1e-14);
        assert!((gm - g / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn geometry_labels() {
        assert_eq!(PatternGeometry::lambda(3).label, PatternLabel::Lambda);
        assert_eq!(
            PatternGeometry::classify(0.0, 2.0 * PI).label,
            PatternLabel::Lambda
        );
        assert_eq!(
            PatternGeometry::classify(PI, 4.0 * PI).label,
            PatternLabel::HalfLambda
        );
        assert_eq!(
            PatternGeometry::classify(0.0, 1.0).label,
            PatternLabel::Custom
        );
        assert!(PatternGeometry::half_lambda(2).is_err());
        let g = PatternGeometry::half_lambda(3).unwrap();
        assert!((g.kx1.cos() + g.kx2.cos()).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_rates() {
        let mut p = small(2);
        p.kappa = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "kappa", .. })
        ));
        let mut p = small(2);
        p.delta = f64::NAN;
        assert!(p.validate().is_err());
        let mut p = small(2);
        p.n_max = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn hamiltonian_vanishes_without_drive_or_detuning() {
        let p = SystemParams {
            delta: 0.0,
            delta_c: 0.0,
            g: 0.0,
            omega: 0.0,
            ..small(3)
        };
        let ops = build_operator_set(p.space().unwrap());
        let h = build_hamiltonian(&p, &ops).unwrap();
        assert_eq!(h.max_abs_diff(&Operator::zeros(ops.space())), 0.0);
    }

    #[test]
    fn mismatched_operator_space_is_rejected() {
        let p = small(3);
        let ops = build_operator_set(HilbertSpace::new(2).unwrap());
        assert!(matches!(
            build_hamiltonian(&p, &ops),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dark_vacuum_is_a_null_vector() {
        let p = SystemParams {
            g: 0.0,
            omega: 0.0,
            ..small(3)
        };
        let model = SystemModel::new(p).unwrap();
        let space = model.ops.space();
        let gg0 = BasisState {
            atom1: AtomState::Ground,
            atom2: AtomState::Ground,
            photons: 0,
        };
        let rho = Operator::outer(space, gg0, gg0);
        let out = model.liouvillian.apply(rho.matrix()).unwrap();
        assert_eq!(out.norm_max(), 0.0);
    }
}
