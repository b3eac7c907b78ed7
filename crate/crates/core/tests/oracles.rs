// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use pmme_core::oracles::markov_trajectory;
use pmme_core::{
    assemble_map, compare_trajectories, damping_basis, discrete_recursion, integrate_pmme, integrate_reduced,
    markov_propagate, DensityMatrix, MemoryKernel,
};

fn coherence_error(h: f64) -> f64 {
    let (a, amp, gamma) = (1.0, 1.0, 0.5);
    let rho0 = DensityMatrix::bloch(1.0, 0.0, 0.0).unwrap();
    let traj = integrate_pmme(&dephasing(a), &MemoryKernel::k1(amp, gamma).unwrap(), &rho0, 10.0, h).unwrap();
    traj.states()
        .iter()
        .enumerate()
        .map(|(j, s)| (s.bloch_vector().unwrap()[0] - f1(a, amp, gamma, j as f64 * h)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn k1_coherence_converges_at_second_order() {
    let coarse = coherence_error(0.02);
    let fine = coherence_error(0.01);
    let order = (coarse / fine).log2();
    assert!(fine < 1e-4, "error {fine:e}");
    assert!(order > 1.8 && order < 2.3, "observed order {order}");
}

#[test]
fn zero_kernel_gives_constant_trajectories() {
    let mut rng = rng(1);
    let l = random_generator(&mut rng, 3);
    let rho0 = random_state(&mut rng, 3);
    for traj in [
        integrate_pmme(&l, &MemoryKernel::zero(), &rho0, 1.0, 0.01).unwrap(),
        integrate_reduced(&l, &MemoryKernel::zero(), &rho0, 1.0, 0.01).unwrap(),
    ] {
        assert!(traj.states().iter().all(|s| max_abs(&(s.matrix() - rho0.matrix())) < 1e-14));
    }
}

#[test]
fn random_three_level_agrees_with_spectral_solution() {
    let mut rng = rng(42);
    let l = random_generator(&mut rng, 3);
    let norm = l.norm().unwrap();
    let k = MemoryKernel::exponential(norm, norm).unwrap();
    let rho0 = random_state(&mut rng, 3);
    let h = 1e-3 / norm;
    let oracle = integrate_pmme(&l, &k, &rho0, 2000.0 * h, h).unwrap();
    let map = assemble_map(damping_basis(&l).unwrap(), &k).unwrap();
    let spectral = map.trajectory(&rho0, h, oracle.len()).unwrap();
    let dev = compare_trajectories(&spectral, &oracle).unwrap();
    assert!(dev.max < 1e-5, "max deviation {:e}", dev.max);
    for s in oracle.states() {
        assert!((s.trace() - c(1.0, 0.0)).norm() < 1e-7);
    }
}

#[test]
fn narrow_kernel_approaches_markov() {
    let mut rng = rng(6);
    let l = random_generator(&mut rng, 2);
    let norm = l.norm().unwrap();
    let rho0 = random_state(&mut rng, 2);
    let t_max = 2.0 / norm;
    let mut previous = f64::INFINITY;
    for width in [10.0, 20.0, 40.0] {
        let gamma = width * norm;
        let h = t_max / 2000.0;
        let reduced = integrate_reduced(&l, &MemoryKernel::exponential(gamma, gamma).unwrap(), &rho0, t_max, h).unwrap();
        let markov = markov_trajectory(&l, &rho0, h, reduced.len()).unwrap();
        let dev = compare_trajectories(&reduced, &markov).unwrap().max;
        assert!(dev < 0.75 * previous, "width {width}: {dev:e} after {previous:e}");
        previous = dev;
    }
    assert!(previous < 0.05);
}

#[test]
fn reduced_equation_converges_at_second_order() {
    let mut rng = rng(9);
    let l = random_generator(&mut rng, 2);
    let norm = l.norm().unwrap();
    let k = MemoryKernel::exp_cos_sin(norm, norm, 2.0 * norm, 0.3).unwrap();
    let rho0 = random_state(&mut rng, 2);
    let t_max = 3.0 / norm;
    let run = |steps: usize| integrate_reduced(&l, &k, &rho0, t_max, t_max / steps as f64).unwrap();
    let (a, b, c4) = (run(300), run(600), run(1200));
    let d1 = compare_trajectories(&a, &b.subsample(2).unwrap()).unwrap().max;
    let d2 = compare_trajectories(&b, &c4.subsample(2).unwrap()).unwrap().max;
    let order = (d1 / d2).log2();
    assert!(order > 1.8, "observed order {order}");
}

#[test]
fn weak_coupling_reduction_is_quadratic() {
    let mut rng = rng(12);
    let l = random_generator(&mut rng, 2);
    let norm = l.norm().unwrap();
    let k = MemoryKernel::exponential(norm, norm).unwrap();
    let rho0 = random_state(&mut rng, 2);
    let t_max = 0.1 / norm;
    let h = t_max / 1000.0;
    let full = integrate_pmme(&l, &k, &rho0, t_max, h).unwrap();
    let reduced = integrate_reduced(&l, &k, &rho0, t_max, h).unwrap();
    let dev = compare_trajectories(&full, &reduced).unwrap();
    for (j, d) in dev.distances.iter().enumerate().skip(1) {
        let x = norm * j as f64 * h;
        assert!(*d <= x * x, "t = {}: {d:e}", j as f64 * h);
    }
}

#[test]
fn recursion_reproduces_semigroup_for_any_kernel() {
    let mut rng = rng(14);
    let l = random_generator(&mut rng, 2);
    let rho0 = random_state(&mut rng, 2);
    let t = 0.7;
    let markov = markov_propagate(&l, &rho0, t).unwrap();
    for (_, k) in kernel_family(1.0) {
        for n in [1usize, 7, 50] {
            let r = discrete_recursion(&l, &k, t / n as f64, n, &rho0).unwrap();
            assert!(max_abs(&(r.matrix() - markov.matrix())) < 1e-12);
        }
    }
}

#[test]
fn recursion_with_uniform_weights_preserves_trace() {
    let l = dephasing(1.0);
    let rho0 = DensityMatrix::bloch(0.3, -0.4, 0.5).unwrap();
    let uniform = MemoryKernel::exponential(1.0, 0.0).unwrap();
    let r = discrete_recursion(&l, &uniform, 0.01, 100, &rho0).unwrap();
    assert!((r.trace() - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn recursion_gap_to_memory_solution_is_first_order() {
    // The recursion collapses to exp(Lt); its distance to the memory-kernel
    // solution is the Markov/post-Markov gap, of first order in a·t.
    let (a, amp, gamma) = (1.0, 1.0, 0.5);
    let l = dephasing(a);
    let k = MemoryKernel::k1(amp, gamma).unwrap();
    let rho0 = DensityMatrix::bloch(1.0, 0.0, 0.0).unwrap();
    let map = assemble_map(damping_basis(&l).unwrap(), &k).unwrap();
    for t in [0.025, 0.05, 0.1] {
        let exact = pmme_core::apply_map(&map, &rho0, t).unwrap();
        let gaps: Vec<f64> = [50usize, 100, 200]
            .iter()
            .map(|&n| {
                let r = discrete_recursion(&l, &k, t / n as f64, n, &rho0).unwrap();
                pmme_core::linalg::trace_norm(&(r.matrix() - exact.matrix())).unwrap()
            })
            .collect();
        let expected = (f1(a, amp, gamma, t) - (-a * t).exp()).abs();
        for g in gaps {
            assert!((g - expected).abs() < 1e-12);
            assert!(g <= a * t);
        }
    }
}

#[test]
fn k2_memory_leaves_persistent_coherence() {
    let (a, amp, gamma, mu) = (1.0, 0.6, 0.8, 1.4);
    let l = dephasing(a);
    let map = assemble_map(damping_basis(&l).unwrap(), &MemoryKernel::k2(amp, gamma, mu, a).unwrap()).unwrap();
    let rho0 = DensityMatrix::bloch(1.0, 0.0, 0.0).unwrap();
    let h = 0.5;
    let points = 121;
    let pm = map.trajectory(&rho0, h, points).unwrap();
    let markov = markov_trajectory(&l, &rho0, h, points).unwrap();
    let dev = compare_trajectories(&pm, &markov).unwrap();
    let big_omega2 = mu * mu + amp * a;
    let plateau = 1.0 - amp * a / (gamma * gamma + big_omega2);
    assert!((dev.distances[points - 1] - plateau).abs() < 1e-10);
}

#[test]
fn halving_the_step_quarters_the_self_deviation() {
    let mut rng = rng(23);
    let l = random_generator(&mut rng, 2);
    let norm = l.norm().unwrap();
    let k = MemoryKernel::exponential(norm, 0.5 * norm).unwrap();
    let rho0 = random_state(&mut rng, 2);
    let t_max = 4.0 / norm;
    let run = |steps: usize| integrate_pmme(&l, &k, &rho0, t_max, t_max / steps as f64).unwrap();
    let (a, b, c4) = (run(400), run(800), run(1600));
    let d1 = compare_trajectories(&a, &b.subsample(2).unwrap()).unwrap().max;
    let d2 = compare_trajectories(&b, &c4.subsample(2).unwrap()).unwrap().max;
    let ratio = d1 / d2;
    assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
}

#[test]
fn stable_step_bound_is_sharp() {
    use pmme_core::oracles::max_stable_step;
    let mut rng = rng(31);
    let l = random_generator(&mut rng, 2);
    let rho0 = random_state(&mut rng, 2);
    for (name, k) in kernel_family(l.norm().unwrap()) {
        let h = max_stable_step(&l, &k).unwrap();
        if k.is_delta() {
            assert!(h.is_infinite());
            continue;
        }
        assert!(integrate_pmme(&l, &k, &rho0, 10.0 * 0.99 * h, 0.99 * h).is_ok(), "{name}");
        assert!(
            matches!(integrate_pmme(&l, &k, &rho0, 10.0 * 1.01 * h, 1.01 * h), Err(pmme_core::Error::StepTooLarge(_))),
            "{name}"
        );
    }
}
