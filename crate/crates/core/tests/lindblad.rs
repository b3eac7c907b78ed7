// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use ndarray::Array2;
use pmme_core::linalg::{frobenius_norm, kron, transpose};
use pmme_core::{damping_basis, devectorize, markov_propagate, vectorize, DensityMatrix, LindbladSpec};
use proptest::prelude::*;

#[test]
fn amplitude_damping_moves_excited_population() {
    let mut f = Array2::zeros((2, 2));
    f[[0, 1]] = c(1.0, 0.0);
    let l = pmme_core::build_generator(&LindbladSpec::new(2).unwrap().with_operator(f, 1.0).unwrap()).unwrap();
    let mut excited = Array2::zeros((2, 2));
    excited[[1, 1]] = c(1.0, 0.0);
    let out = l.apply(&excited).unwrap();
    let mut expected = Array2::zeros((2, 2));
    expected[[0, 0]] = c(1.0, 0.0);
    expected[[1, 1]] = c(-1.0, 0.0);
    assert!(max_abs(&(out - expected)) < 1e-15);
}

#[test]
fn identity_vectorizes_column_major() {
    let v = vectorize(&pmme_core::linalg::identity(2)).unwrap();
    assert_eq!(v.to_vec(), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
}

#[test]
fn sandwich_matches_kronecker_form() {
    let mut rng = rng(7);
    for _ in 0..20 {
        let (a, x, b) = (random_matrix(&mut rng, 2), random_matrix(&mut rng, 2), random_matrix(&mut rng, 2));
        let direct = vectorize(&a.dot(&x).dot(&b)).unwrap();
        let via = kron(&transpose(&b), &a).dot(&vectorize(&x).unwrap());
        assert!((direct - via).iter().all(|z| z.norm() < 1e-14));
        assert_eq!(devectorize(&vectorize(&x).unwrap()).unwrap(), x);
    }
}

#[test]
fn markov_matches_runge_kutta() {
    let mut rng = rng(11);
    for n in [2, 3] {
        let l = random_generator(&mut rng, n);
        let rho0 = random_state(&mut rng, n);
        let t = 1.3;
        let exact = markov_propagate(&l, &rho0, t).unwrap();
        let oracle = rk4_markov(&l, rho0.matrix(), t, 4000);
        assert!(max_abs(&(exact.matrix() - &oracle)) < 1e-8, "n = {n}");
    }
}

#[test]
fn dephasing_coherence_decays_exponentially() {
    let rho0 = DensityMatrix::bloch(1.0, 0.0, 0.0).unwrap();
    let l = dephasing(1.0);
    for t in [0.0_f64, 0.5, 2.0] {
        let rho = markov_propagate(&l, &rho0, t).unwrap();
        assert!((rho.bloch_vector().unwrap()[0] - (-t).exp()).abs() < 1e-13);
    }
    assert_eq!(markov_propagate(&l, &rho0, 0.0).unwrap().matrix(), rho0.matrix());
}

#[test]
fn random_basis_is_complete() {
    let mut rng = rng(3);
    for n in [2, 3] {
        let l = random_generator(&mut rng, n);
        let basis = damping_basis(&l).unwrap();
        assert!(basis.biorthogonality_residual() < 1e-10);
        assert!(basis.eigen_residual(&l).unwrap() < 1e-10);
        for _ in 0..100 {
            let x = random_matrix(&mut rng, n);
            assert!(basis.completeness_residual(&x).unwrap() < 1e-8);
        }
        let lambdas = basis.eigenvalues();
        assert!(lambdas.iter().all(|z| z.re <= 1e-10));
        for z in lambdas {
            assert!(lambdas.iter().any(|w| (w - z.conj()).norm() < 1e-9), "spectrum not conjugation closed");
        }
    }
}

#[test]
fn conjugate_eigenvalues_have_adjoint_eigenoperators() {
    let mut rng = rng(5);
    let l = random_generator(&mut rng, 3);
    let basis = damping_basis(&l).unwrap();
    let lambdas = basis.eigenvalues();
    for (i, z) in lambdas.iter().enumerate() {
        if z.im.abs() < 1e-9 {
            continue;
        }
        let j = lambdas.iter().position(|w| (w - z.conj()).norm() < 1e-12).unwrap();
        let r_adj = pmme_core::linalg::dagger(&basis.right()[i]);
        assert!(frobenius_norm(&(r_adj - &basis.right()[j])) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_property(seed in any::<u64>(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0, big in any::<bool>()) {
        let mut rng = rng(seed);
        let n = if big { 3 } else { 2 };
        let l = random_generator(&mut rng, n);
        let joint = l.exp(t1 + t2).unwrap();
        let split = l.exp(t1).unwrap().compose(&l.exp(t2).unwrap()).unwrap();
        prop_assert!(max_abs(&(joint.matrix() - split.matrix())) < 1e-10);
    }

    #[test]
    fn markov_preserves_trace(seed in any::<u64>(), t in 0.0f64..5.0) {
        let mut rng = rng(seed);
        let l = random_generator(&mut rng, 3);
        prop_assert!(l.trace_annihilation_residual().unwrap() < 1e-12);
        let rho = markov_propagate(&l, &random_state(&mut rng, 3), t).unwrap();
        prop_assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
    }
}
