use std::ops::{Add, Mul, Sub};

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use super::space::{BasisState, HilbertSpace};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used by [`Operator::require_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - a^H`.
pub fn hermiticity_defect(a: MatRef<'_, Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..=j.min(a.nrows() - 1) {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A dense operator on the two-atom-plus-cavity space.
#[derive(Debug, Clone)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Mat<Complex64>,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: Mat<Complex64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if matrix.nrows() != d {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        Self {
            space,
            matrix: Mat::zeros(space.dim(), space.dim()),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self {
            space,
            matrix: Mat::from_fn(space.dim(), space.dim(), |i, j| if i == j { ONE } else { ZERO }),
        }
    }

    /// `|ket><bra|` for product basis states.
    pub fn outer(space: HilbertSpace, ket: BasisState, bra: BasisState) -> Self {
        let mut op = Self::zeros(space);
        op.matrix[(space.index(ket), space.index(bra))] = ONE;
        op
    }

    pub(crate) fn from_fn(
        space: HilbertSpace,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        Self {
            space,
            matrix: Mat::from_fn(space.dim(), space.dim(), f),
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<Complex64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Operator {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint().to_owned(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Operator {
        Self {
            space: self.space,
            matrix: Mat::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
                factor * self.matrix[(i, j)]
            }),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(self.matrix.as_ref())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(self.matrix.as_ref(), other.matrix.as_ref())
    }

    /// Trace over both atoms; the result acts on the Fock space.
    pub fn partial_trace_atoms(&self) -> Mat<Complex64> {
        let f = self.space.fock_dim();
        Mat::from_fn(f, f, |m, n| {
            (0..4).map(|a| self.matrix[(a * f + m, a * f + n)]).sum()
        })
    }

    /// Trace over the field; the result acts on atom 1 ⊗ atom 2.
    pub fn partial_trace_field(&self) -> Mat<Complex64> {
        let f = self.space.fock_dim();
        Mat::from_fn(4, 4, |a, b| (0..f).map(|n| self.matrix[(a * f + n, b * f + n)]).sum())
    }

    fn check_same_space(&self, other: &Operator) {
        assert_eq!(
            self.space, other.space,
            "operators live on different Hilbert spaces"
        );
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator {
            space: self.space,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator {
            space: self.space,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Tolerances a [`DensityMatrix`] must satisfy.
pub const TRACE_TOL: f64 = 1e-10;
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_FLOOR: f64 = -1e-8;

/// A validated state: unit trace, hermitian, positive up to numerical noise.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: Operator,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let trace = op.trace();
        let trace_err = (trace - ONE).norm();
        if trace_err > TRACE_TOL {
            return Err(Error::NotPhysical {
                what: "|trace - 1|",
                value: trace_err,
            });
        }
        let defect = op.hermiticity_defect();
        if defect > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotPhysical {
                what: "hermiticity defect",
                value: defect,
            });
        }
        let eigenvalues = op
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::NoConvergence)?;
        let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
        if min_eigenvalue < POSITIVITY_FLOOR {
            return Err(Error::NotPhysical {
                what: "minimum eigenvalue",
                value: min_eigenvalue,
            });
        }
        Ok(Self { op, min_eigenvalue })
    }

    /// `|state><state|`.
    pub fn basis_state(space: HilbertSpace, state: BasisState) -> Self {
        Self {
            op: Operator::outer(space, state, state),
            min_eigenvalue: 0.0,
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn space(&self) -> HilbertSpace {
        self.op.space
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.op.matrix()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `Tr(A rho)`.
    pub fn expectation(&self, a: &Operator) -> Result<Complex64> {
        if a.space != self.op.space {
            return Err(Error::DimensionMismatch {
                expected: self.op.space.dim(),
                found: a.space.dim(),
            });
        }
        let rho = &self.op.matrix;
        let a = &a.matrix;
        let d = rho.nrows();
        let mut acc = ZERO;
        for j in 0..d {
            for i in 0..d {
                acc += a[(j, i)] * rho[(i, j)];
            }
        }
        Ok(acc)
    }

    /// Population of each Fock state `|n>`, summed over the atoms.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let reduced = self.op.partial_trace_atoms();
        (0..reduced.nrows()).map(|n| reduced[(n, n)].re).collect()
    }

    /// Population of the highest retained photon number.
    pub fn top_sector_population(&self) -> f64 {
        *self.photon_distribution().last().expect("fock_dim >= 2")
    }

    /// `<sigma_1^H sigma_1 + sigma_2^H sigma_2>`.
    pub fn excited_population(&self) -> f64 {
        let space = self.op.space;
        space
            .states()
            .enumerate()
            .map(|(i, s)| {
                let excitations = [s.atom1, s.atom2]
                    .iter()
                    .filter(|a| **a == super::space::AtomState::Excited)
                    .count();
                excitations as f64 * self.op.matrix[(i, i)].re
            })
            .sum()
    }
}
