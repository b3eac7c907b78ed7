// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Memory kernels with closed-form time values and exact rational Laplace
//! transforms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};
use crate::poly::Polynomial;
use crate::rational::{PoleResidueFn, RationalFunction};

/// Imaginary coefficient content tolerated in a real-valued rational kernel.
const REALNESS_TOLERANCE: f64 = 1e-12;

/// A kernel given only through its Laplace transform, with the inverse
/// transform cached for time evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalKernel {
    transform: RationalFunction,
    time: PoleResidueFn,
}

impl RationalKernel {
    pub fn transform(&self) -> &RationalFunction {
        &self.transform
    }

    pub fn time_function(&self) -> &PoleResidueFn {
        &self.time
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MemoryKernel {
    /// `w δ(t)`.
    DiracDelta(f64),
    /// `A e^{-γt}`.
    Exponential { amplitude: f64, rate: f64 },
    /// `c e^{-bt} (cos μt + d sin μt)`.
    ExpCosSin { c: f64, b: f64, mu: f64, d: f64 },
    RationalLaplace(RationalKernel),
}

impl MemoryKernel {
    pub fn delta(weight: f64) -> Result<Self> {
        check_finite(&[weight])?;
        Ok(Self::DiracDelta(weight))
    }

    pub fn exponential(amplitude: f64, rate: f64) -> Result<Self> {
        check_finite(&[amplitude, rate])?;
        Ok(Self::Exponential { amplitude, rate })
    }

    pub fn exp_cos_sin(c: f64, b: f64, mu: f64, d: f64) -> Result<Self> {
        check_finite(&[c, b, mu, d])?;
        if mu < 0.0 {
            return Err(Error::InvalidKernel(format!("oscillation frequency must be >= 0, got {mu}")));
        }
        Ok(Self::ExpCosSin { c, b, mu, d })
    }

    /// Kernel with transform `f`, which must be strictly proper with real
    /// coefficients so that `k(t)` is real.
    pub fn rational(f: RationalFunction) -> Result<Self> {
        if !f.is_strictly_proper() {
            return Err(Error::InvalidKernel(format!("transform {f} is not strictly proper")));
        }
        if f.imaginary_content() > REALNESS_TOLERANCE {
            return Err(Error::InvalidKernel(format!(
                "transform {f} has complex coefficients; k(t) would not be real"
            )));
        }
        let f = f.real_part()?;
        let time = f.inverse_laplace()?.into_real();
        Ok(Self::RationalLaplace(RationalKernel { transform: f, time }))
    }

    /// Rational kernel from ascending real coefficient lists.
    pub fn rational_from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::rational(RationalFunction::new(Polynomial::from_real(num), Polynomial::from_real(den))?)
    }

    /// `A e^{-γt}`.
    pub fn k1(amplitude: f64, gamma: f64) -> Result<Self> {
        Self::exponential(amplitude, gamma)
    }

    /// `A e^{-(γ-a)t} [cos μt - (γ/μ) sin μt]`, whose transform is
    /// `A(s-a)/((s-a+γ)² + μ²)`.
    pub fn k2(amplitude: f64, gamma: f64, mu: f64, a: f64) -> Result<Self> {
        if mu <= 0.0 {
            return Err(Error::InvalidKernel(format!("k2 requires mu > 0, got {mu}")));
        }
        Self::exp_cos_sin(amplitude, gamma - a, mu, -gamma / mu)
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, Self::DiracDelta(_))
    }

    pub fn eval_time(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("kernel evaluated at negative time {t}")));
        }
        Ok(match self {
            Self::DiracDelta(_) => return Err(Error::NoPointwiseValue),
            Self::Exponential { amplitude, rate } => amplitude * (-rate * t).exp(),
            Self::ExpCosSin { c, b, mu, d } => {
                c * (-b * t).exp() * ((mu * t).cos() + d * (mu * t).sin())
            }
            Self::RationalLaplace(r) => r.time.eval(t).re,
        })
    }

    pub fn laplace(&self) -> RationalFunction {
        let build = |num: Vec<f64>, den: Vec<f64>| {
            RationalFunction::new(Polynomial::from_real(&num), Polynomial::from_real(&den))
                .expect("nonzero denominator")
        };
        match self {
            Self::DiracDelta(w) => RationalFunction::constant(Complex64::new(*w, 0.0)),
            Self::Exponential { amplitude, rate } => build(vec![*amplitude], vec![*rate, 1.0]),
            Self::ExpCosSin { c, b, mu, d } => build(
                vec![c * (b + d * mu), *c],
                vec![b * b + mu * mu, 2.0 * b, 1.0],
            ),
            Self::RationalLaplace(r) => r.transform.clone(),
        }
    }

    /// Weight of the singular part; zero for regular kernels.
    pub fn delta_weight(&self) -> f64 {
        match self {
            Self::DiracDelta(w) => *w,
            _ => 0.0,
        }
    }

    /// Poles of the transform with multiplicity; empty for delta kernels.
    pub fn poles(&self) -> Result<Vec<(Complex64, usize)>> {
        if self.is_delta() {
            return Ok(Vec::new());
        }
        self.laplace().poles()
    }

    /// Largest pole magnitude, a proxy for the fastest kernel time scale.
    pub fn rate_scale(&self) -> Result<f64> {
        Ok(self.poles()?.iter().fold(0.0f64, |m, (p, _)| m.max(p.norm())))
    }

    /// `∫₀^∞ k(t) dt = k̃(0)` when every pole lies strictly in the left half
    /// plane; `None` otherwise.
    pub fn integral(&self) -> Result<Option<f64>> {
        if let Self::DiracDelta(w) = self {
            return Ok(Some(*w));
        }
        if self.poles()?.iter().any(|(p, _)| p.re >= 0.0) {
            return Ok(None);
        }
        Ok(Some(self.laplace().eval(ZERO).re))
    }

    /// `k(t)` as an exponential polynomial; `None` for delta kernels.
    pub fn time_function(&self) -> Result<Option<PoleResidueFn>> {
        match self {
            Self::DiracDelta(_) => Ok(None),
            Self::RationalLaplace(r) => Ok(Some(r.time.clone())),
            _ => Ok(Some(self.laplace().inverse_laplace()?.into_real())),
        }
    }

    /// Kernel for the zero function.
    pub fn zero() -> Self {
        let f = RationalFunction::new(Polynomial::zero(), Polynomial::constant(ONE))
            .expect("nonzero denominator");
        Self::rational(f).expect("zero is strictly proper")
    }
}

/// `s ↦ f(s - λ)` in canonical form.
pub fn shift(f: &RationalFunction, lambda: Complex64) -> Result<RationalFunction> {
    f.shift(lambda)
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidKernel(format!("non-finite kernel parameter in {values:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exponential_values_and_transform() {
        let k = MemoryKernel::exponential(1.0, 0.5).unwrap();
        assert_eq!(k.eval_time(0.0).unwrap(), 1.0);
        let f = k.laplace();
        assert!((f.eval(c(1.0)) - c(1.0 / 1.5)).norm() < 1e-15);
        assert_eq!(k.integral().unwrap(), Some(2.0));
    }

    #[test]
    fn k2_transform_matches_closed_form() {
        let (a, amp, gamma, mu) = (1.0, 0.7, 2.0, 1.3);
        let k = MemoryKernel::k2(amp, gamma, mu, a).unwrap();
        assert!((k.eval_time(0.0).unwrap() - amp).abs() < 1e-15);
        let f = k.laplace();
        for s in [c(0.3), Complex64::new(2.0, 1.5), c(5.0)] {
            let expected = amp * (s - a) / ((s - a + gamma).powi(2) + mu * mu);
            assert!((f.eval(s) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn delta_has_constant_transform_and_no_value() {
        let k = MemoryKernel::delta(1.0).unwrap();
        assert!(matches!(k.eval_time(1.0), Err(Error::NoPointwiseValue)));
        assert_eq!(k.laplace(), RationalFunction::constant(ONE));
    }

    #[test]
    fn rational_kernel_time_values() {
        let k = MemoryKernel::rational_from_coeffs(&[1.0], &[2.0, 1.0]).unwrap();
        assert!((k.eval_time(1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!(MemoryKernel::rational_from_coeffs(&[1.0, 1.0], &[2.0, 1.0]).is_err());
        let z = MemoryKernel::zero();
        assert_eq!(z.eval_time(3.0).unwrap(), 0.0);
    }

    #[test]
    fn shift_exponential() {
        let f = MemoryKernel::exponential(2.0, 0.5).unwrap().laplace();
        let g = shift(&f, c(-1.0)).unwrap();
        assert!((g.eval(c(0.0)) - c(2.0 / 1.5)).norm() < 1e-15);
    }
}
