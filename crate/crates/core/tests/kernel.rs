// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use pmme_core::kernel::shift;
use pmme_core::{MemoryKernel, Polynomial, RationalFunction};
use proptest::prelude::*;

#[test]
fn k2_starts_at_amplitude() {
    let k = MemoryKernel::k2(0.8, 1.5, 2.0, 1.0).unwrap();
    assert!((k.eval_time(0.0).unwrap() - 0.8).abs() < 1e-15);
}

#[test]
fn rational_kernel_matches_partial_fractions() {
    // 1/((s+1)(s+2)) = 1/(s+1) - 1/(s+2)
    let k = MemoryKernel::rational_from_coeffs(&[1.0], &[2.0, 3.0, 1.0]).unwrap();
    for t in [0.0_f64, 0.4, 1.0, 6.0] {
        let expected = (-t).exp() - (-2.0 * t).exp();
        assert!((k.eval_time(t).unwrap() - expected).abs() < 1e-15);
    }
    let simple = MemoryKernel::rational_from_coeffs(&[1.0], &[2.0, 1.0]).unwrap();
    assert!((simple.eval_time(1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
}

#[test]
fn transforms_match_numerical_laplace() {
    for (name, k) in kernel_family(1.0) {
        if k.is_delta() {
            continue;
        }
        for s in [0.5, 1.0, 3.0] {
            let numeric = laplace_quadrature(&k, s, 60.0, 60_000);
            let exact = k.laplace().eval(c(s, 0.0));
            assert!(exact.im.abs() < 1e-14);
            assert!((numeric - exact.re).abs() < 1e-6, "{name} at s = {s}: {numeric} vs {}", exact.re);
        }
    }
}

#[test]
fn delta_transform_is_its_weight() {
    let k = MemoryKernel::delta(2.5).unwrap();
    assert_eq!(k.laplace(), RationalFunction::constant(c(2.5, 0.0)));
    assert_eq!(k.integral().unwrap(), Some(2.5));
}

#[test]
fn integral_metadata_only_for_stable_kernels() {
    assert_eq!(MemoryKernel::exponential(2.0, -0.5).unwrap().integral().unwrap(), None);
    let k = MemoryKernel::exp_cos_sin(1.0, 1.0, 1.0, 0.0).unwrap();
    assert!((k.integral().unwrap().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn complex_rational_kernel_is_rejected() {
    let f = RationalFunction::new(Polynomial::constant(c(1.0, 0.0)), Polynomial::new(vec![c(1.0, 1.0), c(1.0, 0.0)]))
        .unwrap();
    assert!(MemoryKernel::rational(f).is_err());
}

#[test]
fn shift_examples() {
    let (amp, gamma, a) = (1.3, 0.4, 0.9);
    let f = MemoryKernel::exponential(amp, gamma).unwrap().laplace();
    let g = shift(&f, c(-a, 0.0)).unwrap();
    let expected = RationalFunction::new(Polynomial::from_real(&[amp]), Polynomial::from_real(&[a + gamma, 1.0])).unwrap();
    assert!((g.numerator().coeff(0) - expected.numerator().coeff(0)).norm() < 1e-15);
    assert!((g.denominator().coeff(0) - expected.denominator().coeff(0)).norm() < 1e-15);
    assert_eq!(shift(&f, c(0.0, 0.0)).unwrap(), f);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn time_values_are_real(which in 0usize..3, t in 0.0f64..20.0, r in 0.2f64..3.0) {
        let (_, k) = &kernel_family(r)[which];
        let tf = k.time_function().unwrap().unwrap();
        prop_assert!(tf.eval_raw(t).im.abs() <= 1e-12 * (1.0 + tf.eval_raw(t).re.abs()));
        prop_assert!((tf.eval(t).re - k.eval_time(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn canonicalization_is_idempotent(n0 in -3.0f64..3.0, n1 in -3.0f64..3.0, d0 in 0.1f64..3.0, d1 in -3.0f64..3.0, lead in 0.5f64..4.0) {
        let f = RationalFunction::new(Polynomial::from_real(&[n0, n1]), Polynomial::from_real(&[d0 * lead, d1 * lead, lead])).unwrap();
        let again = RationalFunction::new(f.numerator().clone(), f.denominator().clone()).unwrap();
        prop_assert_eq!(again, f);
    }

    #[test]
    fn opposite_shifts_cancel(re in -2.0f64..2.0, im in -2.0f64..2.0, which in 0usize..3) {
        let (_, k) = &kernel_family(1.0)[which];
        let f = k.laplace();
        let lam = c(re, im);
        let back = shift(&shift(&f, lam).unwrap(), -lam).unwrap();
        for s in [c(0.7, 0.1), c(2.0, -1.0)] {
            prop_assert!((back.eval(s) - f.eval(s)).norm() < 1e-10);
        }
    }
}
