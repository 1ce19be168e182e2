use dipole_squeeze::liouville::{steady_state, steady_state_with_report, RESIDUAL_TOL};
use dipole_squeeze::quantum::{trace_functional, vectorize, DensityMatrix, Operator};
use dipole_squeeze::system::{SuperOperator, SystemModel, SystemParams};
use faer::{Col, Mat};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Moderate rates so that everything relaxes well before t = 50.
fn relaxing(n_max: usize, kx2: f64, gamma: f64) -> SystemParams {
    SystemParams {
        delta: -200.0,
        delta_c: -4.0,
        g: 20.0,
        omega: 40.0,
        gamma,
        kappa: 1.0,
        kx1: 0.0,
        kx2,
        n_max,
    }
}

fn random_density(rng: &mut StdRng, d: usize) -> Mat<Complex64> {
    let a = Mat::from_fn(d, d, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let rho = &a * a.adjoint();
    let tr: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
    Mat::from_fn(d, d, |i, j| rho[(i, j)] / tr)
}

fn trace_distance(a: &Mat<Complex64>, b: &Mat<Complex64>) -> f64 {
    let diff = a - b;
    let ev = diff.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    0.5 * ev.iter().map(|x| x.abs()).sum::<f64>()
}

fn to_nalgebra(m: &SuperOperator, t: f64) -> DMatrix<Complex64> {
    let a = m.matrix();
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * t)
}

#[test]
fn long_time_propagation_reaches_the_steady_state() {
    let mut rng = StdRng::seed_from_u64(7);
    for (n_max, kx2, gamma) in [(2, std::f64::consts::PI, 5.0), (3, 0.4, 2.0), (4, std::f64::consts::PI, 5.0)] {
        let model = SystemModel::new(relaxing(n_max, kx2, gamma)).unwrap();
        let rho_st = steady_state(&model.liouvillian).unwrap();
        let d = model.liouvillian.space().dim();
        let propagator = to_nalgebra(&model.liouvillian, 50.0).exp();
        for _ in 0..2 {
            let rho0 = random_density(&mut rng, d);
            let v0 = vectorize(rho0.as_ref());
            let v = nalgebra::DVector::from_fn(v0.nrows(), |i, _| v0[i]);
            let out = &propagator * v;
            let rho_t = Mat::from_fn(d, d, |i, j| out[i + j * d]);
            let dist = trace_distance(&rho_t, &rho_st.matrix().to_owned());
            assert!(dist <= 1e-6, "n_max={n_max} kx2={kx2}: trace distance {dist:e}");
        }
    }
}

fn check_preservation(l: &SuperOperator, rho: &Mat<Complex64>) {
    let d = l.space().dim();
    let out = l.apply(rho.as_ref()).unwrap();
    let scale = l.norm_inf();
    let tr: Complex64 = (0..d).map(|i| out[(i, i)]).sum();
    assert!(tr.norm() <= 1e-12 * scale, "trace drift {tr}");
    let defect = dipole_squeeze::quantum::hermiticity_defect(out.as_ref());
    assert!(defect <= 1e-12 * scale, "hermiticity defect {defect:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        n_max in 1usize..4,
        kx2 in 0.0f64..6.3,
        gamma in 0.0f64..50.0,
        kappa in 0.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let p = SystemParams { kappa, ..relaxing(n_max, kx2, gamma) };
        let model = SystemModel::new(p).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let d = model.liouvillian.space().dim();
        check_preservation(&model.liouvillian, &random_density(&mut rng, d));
        // the trace functional annihilates every column
        let t = trace_functional(Mat::<Complex64>::identity(d, d).as_ref());
        let row: Col<Complex64> = model.liouvillian.matrix().transpose() * &t;
        let worst = (0..row.nrows()).map(|i| row[i].norm()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12 * model.liouvillian.norm_inf());
    }

    #[test]
    fn steady_states_are_physical(
        n_max in 1usize..4,
        kx2 in 0.0f64..6.3,
        gamma in 0.5f64..50.0,
    ) {
        let model = SystemModel::new(relaxing(n_max, kx2, gamma)).unwrap();
        let (rho, report) = steady_state_with_report(&model.liouvillian).unwrap();
        prop_assert!(report.relative_residual <= RESIDUAL_TOL);
        prop_assert!(rho.min_eigenvalue() >= -1e-8);
        prop_assert!((rho.operator().trace().re - 1.0).abs() <= 1e-10);
        let again = DensityMatrix::new(Operator::new(rho.space(), rho.matrix().to_owned()).unwrap());
        prop_assert!(again.is_ok());
    }
}
