// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ZERO;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4096;

#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        kronrod += (f1 + f2) * w;
        if k % 2 == 1 {
            gauss += (f1 + f2) * WG[k / 2];
        }
    }
    Segment { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).norm() }
}

/// `∫_a^b f(t) dt` to `max(abs_tol, rel_tol · |result|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(QuadratureResult { value: ZERO, error: 0.0, intervals: 0 });
    }
    let mut segments = vec![gk15(&f, a, b)];
    loop {
        let value: Complex64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.norm()) {
            return Ok(QuadratureResult { value, error, intervals: segments.len() });
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(Error::NumericalConsistency(format!(
                "quadrature did not converge: error estimate {error:e} after {} intervals",
                segments.len()
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segments.push(gk15(&f, s.a, mid));
        segments.push(gk15(&f, mid, s.b));
    }
}
