//! Finite-dimensional operator algebra for two atoms and one cavity mode.

mod operator;
mod ops;
mod space;
mod vectorize;

pub use operator::{
    hermiticity_defect, max_abs_diff, DensityMatrix, Operator, DENSITY_HERMITIAN_TOL,
    HERMITIAN_TOL, POSITIVITY_FLOOR, TRACE_TOL,
};
pub use ops::{build_operator_set, quadrature, OperatorSet};
pub use space::{Atom, AtomState, BasisState, HilbertSpace};
pub use vectorize::{
    add_sandwich, devectorize, left, right, sandwich, trace_functional, vectorize,
    SparseEntries,
};
