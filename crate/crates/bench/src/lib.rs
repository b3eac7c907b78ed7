// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic fixtures shared by the benchmarks.

use ndarray::Array2;
use pmme_core::linalg::{dagger, trace};
use pmme_core::{build_generator, Complex64, ComplexMatrix, DensityMatrix, LindbladSpec, MemoryKernel, Superoperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    Array2::from_shape_fn((n, n), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Two random jump operators plus a random Hamiltonian.
pub fn generator(n: usize, seed: u64) -> Superoperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = LindbladSpec::new(n).expect("valid dimension");
    for _ in 0..2 {
        let rate = rng.random_range(0.2..1.0);
        spec.push(random_matrix(&mut rng, n), rate).expect("matching dimension");
    }
    let m = random_matrix(&mut rng, n);
    let h = (&m + &dagger(&m)).mapv(|z| z * 0.5);
    build_generator(&spec)
        .and_then(|l| l.add(&Superoperator::hamiltonian(&h)?))
        .expect("valid generator")
}

pub fn state(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_matrix(&mut rng, n);
    let rho = g.dot(&dagger(&g));
    let tr = trace(&rho);
    DensityMatrix::new(rho.mapv(|z| z / tr)).expect("positive by construction")
}

/// Named kernels with rates on the scale `r`.
pub fn kernels(r: f64) -> Vec<(&'static str, MemoryKernel)> {
    vec![
        ("exponential", MemoryKernel::exponential(r, r).expect("valid")),
        ("expcossin", MemoryKernel::exp_cos_sin(r, 0.8 * r, 1.7 * r, 0.4).expect("valid")),
        (
            "rational3",
            MemoryKernel::rational_from_coeffs(
                &[r * r * r, 0.5 * r * r, r],
                &[1.5 * r * 1.49 * r * r, 1.49 * r * r + 3.0 * r * r, 3.5 * r, 1.0],
            )
            .expect("valid"),
        ),
    ]
}
