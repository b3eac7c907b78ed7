// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use ndarray::Array2;
use pmme_core::linalg::{dagger, trace};
use pmme_core::{
    build_generator, ComplexMatrix, Complex64, DensityMatrix, LindbladSpec, MemoryKernel, Superoperator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    Array2::from_shape_fn((n, n), |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    (&m + &dagger(&m)).mapv(|z| z * 0.5)
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n);
    let rho = g.dot(&dagger(&g));
    let tr = trace(&rho);
    DensityMatrix::new(rho.mapv(|z| z / tr)).unwrap()
}

/// Lindblad generator with a few random jump operators and a random
/// Hamiltonian part.
pub fn random_generator(rng: &mut impl Rng, n: usize) -> Superoperator {
    let mut spec = LindbladSpec::new(n).unwrap();
    for _ in 0..2 {
        let rate = rng.random_range(0.2..1.0);
        spec.push(random_matrix(rng, n), rate).unwrap();
    }
    let dissipator = build_generator(&spec).unwrap();
    let h = random_hermitian(rng, n);
    dissipator.add(&Superoperator::hamiltonian(&h).unwrap()).unwrap()
}

pub fn dephasing(a: f64) -> Superoperator {
    build_generator(&LindbladSpec::dephasing(a).unwrap()).unwrap()
}

/// Coherence response for the exponential kernel `A e^{-γt}` (underdamped).
pub fn f1(a: f64, amp: f64, gamma: f64, t: f64) -> f64 {
    let omega = (4.0 * amp * a - (gamma + a).powi(2)).sqrt() / 2.0;
    let sigma = (a + gamma) / 2.0;
    (-sigma * t).exp() * ((omega * t).cos() + (omega * t).sin() * sigma / omega)
}

/// Coherence response for the oscillating kernel `k₂`.
pub fn f2(a: f64, amp: f64, gamma: f64, mu: f64, t: f64) -> f64 {
    let big_omega = (mu * mu + amp * a).sqrt();
    let weight = amp * a / (gamma * gamma + big_omega * big_omega);
    1.0 - weight
        * (1.0 - (-gamma * t).exp() * ((big_omega * t).cos() + gamma / big_omega * (big_omega * t).sin()))
}

/// Classic fourth-order Runge–Kutta for `dρ/dt = Lρ` in vectorized form.
pub fn rk4_markov(l: &Superoperator, rho0: &ComplexMatrix, t: f64, steps: usize) -> ComplexMatrix {
    let m = l.matrix();
    let h = t / steps as f64;
    let mut v = pmme_core::vectorize(rho0).unwrap();
    for _ in 0..steps {
        let k1 = m.dot(&v);
        let k2 = m.dot(&(&v + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = m.dot(&(&v + &k2.mapv(|z| z * (h / 2.0))));
        let k4 = m.dot(&(&v + &k3.mapv(|z| z * h)));
        v = &v + &(k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0));
    }
    pmme_core::devectorize(&v).unwrap()
}

/// Composite Simpson approximation of `∫₀^T k(t) e^{-st} dt`.
pub fn laplace_quadrature(k: &MemoryKernel, s: f64, t_end: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = t_end / n as f64;
    let f = |t: f64| k.eval_time(t).unwrap() * (-s * t).exp();
    let mut sum = f(0.0) + f(t_end);
    for j in 1..n {
        sum += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One representative of each kernel family, with rates of order `r`.
pub fn kernel_family(r: f64) -> Vec<(&'static str, MemoryKernel)> {
    // k̃(s) = r (s² + 0.5 r s + r²) / ((s + 1.5 r)((s + r)² + 0.49 r²))
    let num = [r * r * r, 0.5 * r * r, r];
    let q2 = [1.49 * r * r, 2.0 * r, 1.0];
    let den = [1.5 * r * q2[0], q2[0] + 1.5 * r * q2[1], q2[1] + 1.5 * r, 1.0];
    vec![
        ("exponential", MemoryKernel::exponential(r, r).unwrap()),
        ("expcossin", MemoryKernel::exp_cos_sin(r, 0.8 * r, 1.7 * r, 0.4).unwrap()),
        ("rational3", MemoryKernel::rational_from_coeffs(&num, &den).unwrap()),
        ("delta", MemoryKernel::delta(1.0).unwrap()),
    ]
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    pmme_core::linalg::max_abs(m)
}
