//! Bilinear resolvent forms `c^T (A - s I)^{-1} b` for many shifts `s`.
//!
//! One unitary Hessenberg reduction `A = Q H Q^H` is shared by every shift;
//! each shift then costs a single O(n^2) elimination sweep on `H - s I`
//! that never stores the triangular factor.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::hessenberg;
use faer::linalg::householder;
use faer::linalg::solvers::Solve;
use faer::{Col, ColRef, Conj, Mat, Par};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Evaluates `c^T (A - s I)^{-1} b` for arbitrary complex shifts.
pub trait ShiftedResolvent: Sync {
    /// `None` when `A - s I` is numerically singular.
    fn eval(&self, shift: Complex64) -> Option<Complex64>;
}

#[derive(Debug, Clone)]
pub struct HessenbergResolvent {
    n: usize,
    /// Row-major upper Hessenberg factor.
    rows: Vec<Complex64>,
    /// `Q^T c`.
    left: Vec<Complex64>,
    /// `Q^H b`.
    right: Vec<Complex64>,
}

impl HessenbergResolvent {
    pub fn new(mut a: Mat<Complex64>, c: ColRef<'_, Complex64>, b: ColRef<'_, Complex64>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        assert_eq!(c.nrows(), n);
        assert_eq!(b.nrows(), n);
        if n < 2 {
            return Self {
                n,
                rows: (0..n).map(|_| a[(0, 0)]).collect(),
                left: (0..n).map(|i| c[i]).collect(),
                right: (0..n).map(|i| b[i]).collect(),
            };
        }
        let par = Par::Seq;
        let bs = faer::linalg::qr::no_pivoting::factor::recommended_block_size::<Complex64>(
            n - 1,
            n - 1,
        );
        let mut reflectors = Mat::<Complex64>::zeros(bs, n - 1);
        {
            let req = hessenberg::hessenberg_in_place_scratch::<Complex64>(
                n,
                bs,
                par,
                Default::default(),
            );
            let mut mem = MemBuffer::new(req);
            hessenberg::hessenberg_in_place(
                a.as_mut(),
                reflectors.as_mut(),
                par,
                MemStack::new(&mut mem),
                Default::default(),
            );
        }

        // Row vectors x^T are multiplied on the right by Q: (x^T Q)^T = Q^T x.
        let apply_q = |x: Vec<Complex64>| -> Vec<Complex64> {
            let mut row = Mat::<Complex64>::from_fn(1, n, |_, j| x[j]);
            let req = householder::apply_block_householder_sequence_on_the_right_in_place_scratch::<
                Complex64,
            >(n - 1, bs, 1);
            let mut mem = MemBuffer::new(req);
            householder::apply_block_householder_sequence_on_the_right_in_place_with_conj(
                a.as_ref().submatrix(1, 0, n - 1, n - 1),
                reflectors.as_ref(),
                Conj::No,
                row.as_mut().submatrix_mut(0, 1, 1, n - 1),
                par,
                MemStack::new(&mut mem),
            );
            (0..n).map(|j| row[(0, j)]).collect()
        };
        let left = apply_q((0..n).map(|i| c[i]).collect());
        // Q^H b = conj(Q^T conj(b))
        let right = apply_q((0..n).map(|i| b[i].conj()).collect())
            .into_iter()
            .map(|z| z.conj())
            .collect();

        let mut rows = vec![ZERO; n * n];
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                rows[i * n + j] = a[(i, j)];
            }
        }
        Self {
            n,
            rows,
            left,
            right,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl ShiftedResolvent for HessenbergResolvent {
    fn eval(&self, shift: Complex64) -> Option<Complex64> {
        let n = self.n;
        if n == 0 {
            return Some(ZERO);
        }
        let row = |i: usize| &self.rows[i * n..(i + 1) * n];
        // Gaussian elimination with adjacent-row pivoting on H - sI. Row k
        // of U is `cur[k..]` at step k; the forward solve U^T w = left runs
        // alongside, so value = w^T y needs no back substitution.
        let mut cur: Vec<Complex64> = row(0).to_vec();
        cur[0] -= shift;
        let mut nxt = vec![ZERO; n];
        let mut acc = vec![ZERO; n];
        let mut rhs = self.right[0];
        let mut value = ZERO;
        for k in 0..n {
            if k + 1 == n {
                let piv = cur[k];
                if piv.norm() == 0.0 || !piv.is_finite() {
                    return None;
                }
                let w = (self.left[k] - acc[k]) / piv;
                value += w * rhs;
                break;
            }
            nxt[k..].copy_from_slice(&row(k + 1)[k..]);
            nxt[k + 1] -= shift;
            let mut rhs_next = self.right[k + 1];
            if nxt[k].norm() > cur[k].norm() {
                std::mem::swap(&mut cur, &mut nxt);
                std::mem::swap(&mut rhs, &mut rhs_next);
            }
            let piv = cur[k];
            if piv.norm() == 0.0 || !piv.is_finite() {
                return None;
            }
            let m = nxt[k] / piv;
            let w = (self.left[k] - acc[k]) / piv;
            value += w * rhs;
            for j in k + 1..n {
                let u = cur[j];
                acc[j] += u * w;
                nxt[j] -= m * u;
            }
            rhs = rhs_next - m * rhs;
            std::mem::swap(&mut cur, &mut nxt);
        }
        value.is_finite().then_some(value)
    }
}

/// One LU factorization per shift; the reference route for few shifts.
#[derive(Debug, Clone)]
pub struct DirectResolvent {
    a: Mat<Complex64>,
    c: Col<Complex64>,
    b: Col<Complex64>,
}

impl DirectResolvent {
    pub fn new(a: Mat<Complex64>, c: ColRef<'_, Complex64>, b: ColRef<'_, Complex64>) -> Self {
        Self {
            a,
            c: c.to_owned(),
            b: b.to_owned(),
        }
    }
}

impl ShiftedResolvent for DirectResolvent {
    fn eval(&self, shift: Complex64) -> Option<Complex64> {
        let n = self.a.nrows();
        let mut shifted = self.a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let lu = shifted.partial_piv_lu();
        let u = lu.U();
        if (0..n).any(|i| u[(i, i)].norm() == 0.0) {
            return None;
        }
        let y = lu.solve(&self.b);
        let value: Complex64 = (0..n).map(|i| self.c[i] * y[i]).sum();
        value.is_finite().then_some(value)
    }
}
