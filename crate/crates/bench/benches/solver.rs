// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pmme_bench::{generator, kernels, state};
use pmme_core::estimation::{estimate_kernels, DEFAULT_RESIDUAL_THRESHOLD};
use pmme_core::{
    apply_map, assemble_map, choi_matrix, cp_scan, damping_basis, integrate_pmme, kraus_extract, xi_from_states,
    MemoryKernel,
};
use std::hint::black_box;

fn basis(c: &mut Criterion) {
    let mut g = c.benchmark_group("damping_basis");
    for n in [2, 3, 4] {
        let l = generator(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| b.iter(|| damping_basis(black_box(l)).unwrap()));
    }
    g.finish();
}

fn assemble(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble_map");
    let l = generator(3, 2);
    let b0 = damping_basis(&l).unwrap();
    for (name, k) in kernels(l.norm().unwrap()) {
        g.bench_function(name, |b| b.iter(|| assemble_map(b0.clone(), black_box(&k)).unwrap()));
    }
    g.finish();
}

fn propagate(c: &mut Criterion) {
    let l = generator(3, 3);
    let (_, k) = kernels(l.norm().unwrap()).remove(1);
    let map = assemble_map(damping_basis(&l).unwrap(), &k).unwrap();
    let rho = state(3, 4);
    c.bench_function("apply_map/n3", |b| b.iter(|| apply_map(&map, black_box(&rho), 0.7).unwrap()));
    c.bench_function("kraus/n3", |b| {
        b.iter(|| kraus_extract(&choi_matrix(&map, black_box(0.7 / l.norm().unwrap())).unwrap()).unwrap())
    });
    let grid: Vec<f64> = (0..200).map(|j| j as f64 * 0.05).collect();
    c.bench_function("cp_scan/n3x200", |b| b.iter(|| cp_scan(&map, black_box(&grid)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate_pmme");
    g.sample_size(10);
    let l = generator(2, 5);
    let norm = l.norm().unwrap();
    let k = MemoryKernel::exponential(norm, norm).unwrap();
    let rho = state(2, 6);
    for steps in [500usize, 1000, 2000] {
        let h = 1e-3 / norm;
        g.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |b, &s| {
            b.iter(|| integrate_pmme(&l, &k, &rho, s as f64 * h, h).unwrap())
        });
    }
    g.finish();
}

fn estimation(c: &mut Criterion) {
    let l = generator(2, 7);
    let basis = damping_basis(&l).unwrap();
    let (_, k) = kernels(l.norm().unwrap()).remove(0);
    let map = assemble_map(basis.clone(), &k).unwrap();
    let rho = state(2, 8);
    let traj = map.trajectory(&rho, 0.05 / l.norm().unwrap(), 200).unwrap();
    let samples = xi_from_states(&basis, &traj, &rho).unwrap();
    c.bench_function("estimate_kernels/n2x200", |b| {
        b.iter(|| estimate_kernels(black_box(&samples), 4, DEFAULT_RESIDUAL_THRESHOLD).unwrap())
    });
}

criterion_group!(benches, basis, assemble, propagate, oracle, estimation);
criterion_main!(benches);
