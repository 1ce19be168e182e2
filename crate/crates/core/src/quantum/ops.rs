use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::operator::Operator;
use super::space::{Atom, AtomState, HilbertSpace};

/// The elementary operators of the model, all on one [`HilbertSpace`].
#[derive(Debug, Clone)]
pub struct OperatorSet {
    space: HilbertSpace,
    pub a: Operator,
    pub a_dag: Operator,
    /// `a^H a`.
    pub number: Operator,
    sigma: [Operator; 2],
    sigma_dag: [Operator; 2],
    /// `(sigma_1 + sigma_2) / sqrt 2`, lowering into the symmetric Dicke state.
    pub s_plus: Operator,
    /// `(sigma_1 - sigma_2) / sqrt 2`, lowering into the antisymmetric Dicke state.
    pub s_minus: Operator,
    pub identity: Operator,
}

impl OperatorSet {
    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    /// Atomic lowering operator `|g><e|` of atom `j`.
    pub fn sigma(&self, j: Atom) -> &Operator {
        &self.sigma[slot(j)]
    }

    pub fn sigma_dag(&self, j: Atom) -> &Operator {
        &self.sigma_dag[slot(j)]
    }
}

fn slot(j: Atom) -> usize {
    match j {
        Atom::One => 0,
        Atom::Two => 1,
    }
}

pub fn build_operator_set(space: HilbertSpace) -> OperatorSet {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    // <row| a |col> = sqrt(n_col) when atoms agree and n_row = n_col - 1
    let a = Operator::from_fn(space, |r, c| {
        let (sr, sc) = (space.state(r), space.state(c));
        if sr.atom1 == sc.atom1 && sr.atom2 == sc.atom2 && sr.photons + 1 == sc.photons {
            Complex64::new((sc.photons as f64).sqrt(), 0.0)
        } else {
            zero
        }
    });
    let lowering = |j: Atom| {
        Operator::from_fn(space, |r, c| {
            let (sr, sc) = (space.state(r), space.state(c));
            let (target_r, target_c, other_r, other_c) = match j {
                Atom::One => (sr.atom1, sc.atom1, sr.atom2, sc.atom2),
                Atom::Two => (sr.atom2, sc.atom2, sr.atom1, sc.atom1),
            };
            if target_r == AtomState::Ground
                && target_c == AtomState::Excited
                && other_r == other_c
                && sr.photons == sc.photons
            {
                one
            } else {
                zero
            }
        })
    };
    let sigma = [lowering(Atom::One), lowering(Atom::Two)];
    let sigma_dag = [sigma[0].adjoint(), sigma[1].adjoint()];
    let inv_sqrt2 = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let s_plus = (&sigma[0] + &sigma[1]).scale(inv_sqrt2);
    let s_minus = (&sigma[0] - &sigma[1]).scale(inv_sqrt2);
    let a_dag = a.adjoint();
    // exact integers rather than the rounded product a^H a
    let number = Operator::from_fn(space, |r, c| {
        if r == c {
            Complex64::new(space.state(r).photons as f64, 0.0)
        } else {
            zero
        }
    });

    OperatorSet {
        space,
        a,
        a_dag,
        number,
        sigma,
        sigma_dag,
        s_plus,
        s_minus,
        identity: Operator::identity(space),
    }
}

/// `X(phi) = a e^{-i phi} + a^H e^{i phi}`.
pub fn quadrature(phase: f64, ops: &OperatorSet) -> Operator {
    let rot = Complex64::from_polar(1.0, phase);
    &ops.a.scale(rot.conj()) + &ops.a_dag.scale(rot)
}
