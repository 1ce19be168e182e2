//! Column-stacking vectorization and the superoperator identity
//! `vec(A rho B) = (B^T ⊗ A) vec(rho)`.

use faer::{Col, ColRef, Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stacks the columns of a square matrix: entry `(i, j)` lands at `i + j d`.
pub fn vectorize(m: MatRef<'_, Complex64>) -> Col<Complex64> {
    let d = m.nrows();
    assert_eq!(d, m.ncols(), "vectorize expects a square matrix");
    Col::from_fn(d * d, |k| m[(k % d, k / d)])
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: ColRef<'_, Complex64>, dim: usize) -> Result<Mat<Complex64>> {
    if v.nrows() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: v.nrows(),
        });
    }
    Ok(Mat::from_fn(dim, dim, |i, j| v[i + j * dim]))
}

/// Coefficients `c` such that `c^T vec(Y) = Tr(A Y)`, i.e. `vec(A^T)`.
pub fn trace_functional(a: MatRef<'_, Complex64>) -> Col<Complex64> {
    vectorize(a.transpose())
}

/// Dense `B^T ⊗ A`, the matrix of `rho -> A rho B`.
pub fn sandwich(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut out = Mat::zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
    add_sandwich(
        &mut out,
        Complex64::new(1.0, 0.0),
        &SparseEntries::from_dense(a),
        &SparseEntries::from_dense(b),
    );
    out
}

/// Dense `I ⊗ A`, the matrix of `rho -> A rho`.
pub fn left(a: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let id = Mat::<Complex64>::identity(a.nrows(), a.nrows());
    sandwich(a, id.as_ref())
}

/// Dense `B^T ⊗ I`, the matrix of `rho -> rho B`.
pub fn right(b: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let id = Mat::<Complex64>::identity(b.nrows(), b.nrows());
    sandwich(id.as_ref(), b)
}

/// Nonzero entries of a square matrix, for cheap Kronecker accumulation.
#[derive(Debug, Clone)]
pub struct SparseEntries {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseEntries {
    pub fn from_dense(m: MatRef<'_, Complex64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `target += coeff (B^T ⊗ A)`.
pub fn add_sandwich(
    target: &mut Mat<Complex64>,
    coeff: Complex64,
    a: &SparseEntries,
    b: &SparseEntries,
) {
    let d = a.dim;
    assert_eq!(target.nrows(), d * b.dim);
    for &(l, j, b_lj) in &b.entries {
        // (B^T)[j, l] = B[l, j]
        let w = coeff * b_lj;
        for &(i, k, a_ik) in &a.entries {
            target[(j * d + i, l * d + k)] += w * a_ik;
        }
    }
}
