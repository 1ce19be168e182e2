use crate::error::{Error, Result};

/// Internal state of one two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomState {
    Ground,
    Excited,
}

impl AtomState {
    pub const ALL: [AtomState; 2] = [AtomState::Ground, AtomState::Excited];

    fn index(self) -> usize {
        match self {
            AtomState::Ground => 0,
            AtomState::Excited => 1,
        }
    }

    fn from_index(i: usize) -> Self {
        if i == 0 {
            AtomState::Ground
        } else {
            AtomState::Excited
        }
    }
}

/// Which of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    One,
    Two,
}

impl Atom {
    pub const BOTH: [Atom; 2] = [Atom::One, Atom::Two];
}

/// A product basis label `|s1 s2, n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub atom1: AtomState,
    pub atom2: AtomState,
    pub photons: usize,
}

/// Two atoms and one truncated cavity mode.
///
/// Tensor order is fixed as atom 1 ⊗ atom 2 ⊗ field, so the flat index of
/// `|s1 s2, n>` is `(2 s1 + s2)(n_max + 1) + n` with `g = 0`, `e = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub const ATOM_COUNT: usize = 2;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "photon cutoff must be at least 1"));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        4 * self.fock_dim()
    }

    pub fn index(&self, state: BasisState) -> usize {
        debug_assert!(state.photons <= self.n_max);
        (2 * state.atom1.index() + state.atom2.index()) * self.fock_dim() + state.photons
    }

    pub fn state(&self, index: usize) -> BasisState {
        debug_assert!(index < self.dim());
        let atoms = index / self.fock_dim();
        BasisState {
            atom1: AtomState::from_index(atoms / 2),
            atom2: AtomState::from_index(atoms % 2),
            photons: index % self.fock_dim(),
        }
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(move |i| self.state(i))
    }
}
