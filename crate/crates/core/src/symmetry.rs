//! Atom-exchange symmetry of the Liouvillian.
//!
//! When `cos(k x2) = ± cos(k x1)` the unitary `U = SWAP ⊗ (±1)^{a^H a}`
//! commutes with the Hamiltonian, and `rho -> U rho U^H` commutes with the
//! dissipators. Operator space then splits into an even and an odd sector of
//! (almost) equal size, which halves the side of every dense solve.

use std::f64::consts::FRAC_1_SQRT_2;

use faer::{Col, ColRef, Mat, MatRef};
use num_complex::Complex64;

use crate::quantum::HilbertSpace;

/// Largest `|cos(k x1) ∓ cos(k x2)|` still treated as exchange symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Sign picked up by the field under the exchange operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldParity {
    /// `cos(k x1) = cos(k x2)`: the field is untouched.
    Even,
    /// `cos(k x1) = -cos(k x2)`: the field picks up `(-1)^n`.
    Odd,
}

/// Eigenvalue of `rho -> U rho U^H` selecting a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Even, Sector::Odd];

    fn sign(self) -> f64 {
        match self {
            Sector::Even => 1.0,
            Sector::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeSymmetry {
    pub field: FieldParity,
}

impl ExchangeSymmetry {
    /// Checks the two single-atom cavity couplings for exchange symmetry.
    pub fn detect(cos_kx1: f64, cos_kx2: f64) -> Option<Self> {
        if (cos_kx1 - cos_kx2).abs() <= SYMMETRY_TOL {
            Some(Self {
                field: FieldParity::Even,
            })
        } else if (cos_kx1 + cos_kx2).abs() <= SYMMETRY_TOL {
            Some(Self {
                field: FieldParity::Odd,
            })
        } else {
            None
        }
    }

    /// `U |i> = sign |image>` for a product basis state.
    pub fn map_state(&self, space: HilbertSpace, index: usize) -> (usize, f64) {
        let mut s = space.state(index);
        std::mem::swap(&mut s.atom1, &mut s.atom2);
        let sign = match self.field {
            FieldParity::Odd if s.photons % 2 == 1 => -1.0,
            _ => 1.0,
        };
        (space.index(s), sign)
    }

    /// Orthonormal real basis of one sector of vectorized operator space.
    pub fn sector_basis(&self, space: HilbertSpace, sector: Sector) -> SectorBasis {
        let d = space.dim();
        let image: Vec<(usize, f64)> = (0..d).map(|i| self.map_state(space, i)).collect();
        let want = sector.sign();
        let mut vectors = Vec::with_capacity(d * d / 2 + d);
        for k in 0..d * d {
            let (i, j) = (k % d, k / d);
            let (pi, si) = image[i];
            let (pj, sj) = image[j];
            let k_img = pi + pj * d;
            let s = si * sj;
            if k_img == k {
                if s == want {
                    vectors.push(SectorVector::single(k));
                }
            } else if k < k_img {
                // U e_k = s e_k', so e_k + want * s * e_k' has eigenvalue want
                vectors.push(SectorVector::pair(k, k_img, want * s));
            }
        }
        SectorBasis {
            kind: BasisKind::Sector(sector),
            full_dim: d * d,
            vectors,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct SectorVector {
    first: (usize, f64),
    second: Option<(usize, f64)>,
}

impl SectorVector {
    fn single(k: usize) -> Self {
        Self {
            first: (k, 1.0),
            second: None,
        }
    }

    fn pair(k: usize, other: usize, sign: f64) -> Self {
        Self {
            first: (k, FRAC_1_SQRT_2),
            second: Some((other, sign * FRAC_1_SQRT_2)),
        }
    }

    fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        std::iter::once(self.first).chain(self.second)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Full,
    Sector(Sector),
}

/// Columns of an isometry `B` from a block into full operator space.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    kind: BasisKind,
    full_dim: usize,
    vectors: Vec<SectorVector>,
}

impl SectorBasis {
    /// The trivial decomposition: the whole operator space.
    pub fn full(full_dim: usize) -> Self {
        Self {
            kind: BasisKind::Full,
            full_dim,
            vectors: (0..full_dim).map(SectorVector::single).collect(),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// `B^T M B`.
    pub fn restrict_matrix(&self, m: MatRef<'_, Complex64>) -> Mat<Complex64> {
        assert_eq!(m.nrows(), self.full_dim);
        if self.kind == BasisKind::Full {
            return m.to_owned();
        }
        let n = self.len();
        let mut out = Mat::zeros(n, n);
        for (b, vb) in self.vectors.iter().enumerate() {
            for (q, cq) in vb.entries() {
                let col = m.col(q);
                for (a, va) in self.vectors.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (p, cp) in va.entries() {
                        acc += col[p] * cp;
                    }
                    out[(a, b)] += acc * cq;
                }
            }
        }
        out
    }

    /// `B^T x`.
    pub fn restrict(&self, x: ColRef<'_, Complex64>) -> Col<Complex64> {
        assert_eq!(x.nrows(), self.full_dim);
        Col::from_fn(self.len(), |a| {
            self.vectors[a].entries().map(|(p, cp)| x[p] * cp).sum()
        })
    }

    /// `B y`.
    pub fn embed(&self, y: ColRef<'_, Complex64>) -> Col<Complex64> {
        assert_eq!(y.nrows(), self.len());
        let mut x = Col::zeros(self.full_dim);
        for (a, va) in self.vectors.iter().enumerate() {
            for (p, cp) in va.entries() {
                x[p] += y[a] * cp;
            }
        }
        x
    }

    /// Restricted trace functional: `t^T y = Tr(devec(B y))` for operators of side `dim`.
    pub fn trace_row(&self, dim: usize) -> Col<Complex64> {
        Col::from_fn(self.len(), |a| {
            let w: f64 = self.vectors[a]
                .entries()
                .filter(|(p, _)| p % dim == p / dim)
                .map(|(_, cp)| cp)
                .sum();
            Complex64::new(w, 0.0)
        })
    }
}
