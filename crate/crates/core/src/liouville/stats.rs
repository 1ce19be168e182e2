use faer::MatRef;
use num_complex::Complex64;

use crate::error::Result;
use crate::quantum::{quadrature, DensityMatrix, Operator, OperatorSet};

pub fn expectation(rho: &DensityMatrix, a: &Operator) -> Result<Complex64> {
    rho.expectation(a)
}

pub fn mean_photon_number(rho: &DensityMatrix, ops: &OperatorSet) -> Result<f64> {
    Ok(rho.expectation(&ops.number)?.re)
}

/// `<X^2> - <X>^2` for `X = a e^{-i phase} + a^dag e^{i phase}` (vacuum = 1).
pub fn quadrature_variance(rho: &DensityMatrix, ops: &OperatorSet, phase: f64) -> Result<f64> {
    let x = quadrature(phase, ops);
    let mean = rho.expectation(&x)?.re;
    let second = rho.expectation(&(&x * &x))?.re;
    Ok(second - mean * mean)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentFit {
    pub amplitude: Complex64,
    pub fidelity: f64,
}

/// Truncated, renormalized coherent-state amplitudes `<n|beta>`.
pub fn coherent_amplitudes(beta: Complex64, fock_dim: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(fock_dim);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..fock_dim {
        if n > 0 {
            term *= beta / (n as f64).sqrt();
        }
        c.push(term);
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|z| *z /= norm);
    c
}

fn overlap(field: MatRef<'_, Complex64>, beta: Complex64) -> f64 {
    let c = coherent_amplitudes(beta, field.nrows());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..c.len() {
        for j in 0..c.len() {
            acc += c[i].conj() * field[(i, j)] * c[j];
        }
    }
    acc.re
}

/// Best `<beta| rho_field |beta>` over coherent amplitudes, seeded at `Tr(a rho)`.
pub fn nearest_coherent_state(rho: &DensityMatrix, ops: &OperatorSet) -> Result<CoherentFit> {
    let field = rho.operator().partial_trace_atoms();
    let mut beta = rho.expectation(&ops.a)?;
    let mut best = overlap(field.as_ref(), beta);
    let mut step = 0.1 * beta.norm().max(0.1);
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    while step > 1e-9 {
        let mut moved = false;
        for d in dirs {
            let trial = beta + d * step;
            let f = overlap(field.as_ref(), trial);
            if f > best {
                best = f;
                beta = trial;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(CoherentFit {
        amplitude: beta,
        fidelity: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_operator_set, AtomState, BasisState, HilbertSpace};
    use faer::Mat;

    fn fock(space: HilbertSpace, photons: usize) -> DensityMatrix {
        DensityMatrix::basis_state(
            space,
            BasisState {
                atom1: AtomState::Ground,
                atom2: AtomState::Ground,
                photons,
            },
        )
    }

    #[test]
    fn basic_expectations() {
        let space = HilbertSpace::new(4).unwrap();
        let ops = build_operator_set(space);
        let rho = fock(space, 2);
        assert_eq!(expectation(&rho, &ops.identity).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(expectation(&rho, &ops.number).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(mean_photon_number(&rho, &ops).unwrap(), 2.0);
        // Fock states: <X^2> = 2n + 1
        assert!((quadrature_variance(&rho, &ops, 0.3).unwrap() - 5.0).abs() <= 1e-12);
    }

    #[test]
    fn mismatched_space_is_an_error() {
        let rho = fock(HilbertSpace::new(2).unwrap(), 0);
        let ops = build_operator_set(HilbertSpace::new(3).unwrap());
        assert!(expectation(&rho, &ops.number).is_err());
    }

    #[test]
    fn coherent_state_is_recovered() {
        let space = HilbertSpace::new(12).unwrap();
        let ops = build_operator_set(space);
        let beta = Complex64::new(0.6, -0.35);
        let c = coherent_amplitudes(beta, space.fock_dim());
        let f = space.fock_dim();
        // ground atoms, coherent field
        let m = Mat::from_fn(space.dim(), space.dim(), |i, j| {
            if i < f && j < f {
                c[i] * c[j].conj()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rho = DensityMatrix::new(Operator::new(space, m).unwrap()).unwrap();
        let fit = nearest_coherent_state(&rho, &ops).unwrap();
        assert!((fit.fidelity - 1.0).abs() <= 1e-10);
        assert!((fit.amplitude - beta).norm() <= 1e-6);
        assert!((quadrature_variance(&rho, &ops, 1.0).unwrap() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn fock_state_is_far_from_coherent() {
        let space = HilbertSpace::new(6).unwrap();
        let ops = build_operator_set(space);
        let fit = nearest_coherent_state(&fock(space, 1), &ops).unwrap();
        // max_beta |beta|^2 e^{-|beta|^2} = 1/e
        assert!((fit.fidelity - (-1.0f64).exp()).abs() <= 1e-3);
    }
}
