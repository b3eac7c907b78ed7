// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form solution of the post-Markovian master equation in the damping
//! basis: each coefficient `μ_i(t)` evolves as `ξ_i(t) μ_i(0)` where `ξ_i` is
//! the inverse Laplace transform of `1/(s - λ_i k̃(s - λ_i))`.

use num_complex::Complex64;

use crate::damping::DampingBasis;
use crate::error::{Error, Result};
use crate::kernel::MemoryKernel;
use crate::lindblad::{DensityMatrix, Superoperator};
use crate::linalg::{self, hermiticity_deviation, hermitize, scaled_product, ONE, ZERO};
use crate::poly::{merge_roots, Polynomial, ROOT_MERGE_TOLERANCE};
use crate::quadrature;
use crate::rational::{PoleResidueFn, RationalFunction};
use crate::trajectory::Trajectory;

/// Eigenvalues closer than this (relative) share one `ξ` computation.
pub const CACHE_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of `ξ(0)` from one.
pub const XI_INITIAL_TOLERANCE: f64 = 1e-10;
/// `|ξ_i(t)|` at or below this makes `Φ(t)` non-invertible.
pub const INVERSION_TOLERANCE: f64 = 1e-12;
/// Largest anti-Hermitian part tolerated in a propagated state.
pub const HERMITICITY_TOLERANCE: f64 = 1e-9;
/// Relative tolerance of the memory integral in the TCL generator.
pub const TCL_QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Numerator `Q(s - λ)` and denominator `s Q(s - λ) - λ P(s - λ)` of the
/// Laplace-domain response `1/(s - λ k̃(s - λ))`.
fn response_parts(lambda: Complex64, kernel: &MemoryKernel) -> Result<(Polynomial, Polynomial)> {
    let shifted = kernel.laplace().shift(lambda)?;
    let q = shifted.denominator().clone();
    let p = shifted.numerator().clone();
    let den = &(&Polynomial::s() * &q) - &p.scale(lambda);
    Ok((q, den))
}

/// Roots with multiplicity of `s Q(s - λ) - λ P(s - λ)`, where `k̃ = P/Q`.
pub fn characteristic_poles(lambda: Complex64, kernel: &MemoryKernel) -> Result<Vec<(Complex64, usize)>> {
    if lambda == ZERO {
        return Ok(vec![(ZERO, 1)]);
    }
    let (_, den) = response_parts(lambda, kernel)?;
    if den.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(merge_roots(&den.roots()?, ROOT_MERGE_TOLERANCE))
}

/// `ξ(t) = Σ_k Res[e^{st} / (s - λ k̃(s - λ)), p_k]`.
pub fn xi_function(lambda: Complex64, kernel: &MemoryKernel) -> Result<PoleResidueFn> {
    if lambda == ZERO {
        return Ok(PoleResidueFn::unit());
    }
    let (num, den) = response_parts(lambda, kernel)?;
    let f = RationalFunction::new(num, den)?;
    let mut xi = f.inverse_laplace()?;
    if lambda.im == 0.0 {
        // Real kernel and real λ: poles come in conjugate pairs.
        xi = xi.into_real();
    }
    let start = xi.eval_raw(0.0);
    if (start - ONE).norm() > XI_INITIAL_TOLERANCE {
        return Err(Error::IllConditionedPoles(format!(
            "ξ(0) = {start} for λ = {lambda}; poles {:?}",
            xi.poles()
        )));
    }
    Ok(xi)
}

/// `Φ(t): X ↦ Σ_i ξ_i(t) Tr[L_i X] R_i`.
#[derive(Clone, Debug)]
pub struct DynamicalMap {
    basis: DampingBasis,
    kernel: MemoryKernel,
    xis: Vec<PoleResidueFn>,
}

pub fn assemble_map(basis: DampingBasis, kernel: &MemoryKernel) -> Result<DynamicalMap> {
    let mut xis: Vec<PoleResidueFn> = Vec::with_capacity(basis.len());
    let lambdas = basis.eigenvalues().to_vec();
    for (i, &lam) in lambdas.iter().enumerate() {
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= CACHE_TOLERANCE * a.norm().max(1.0);
        let cached = lambdas[..i].iter().enumerate().find_map(|(j, &prev)| {
            if close(prev, lam) {
                Some(xis[j].clone())
            } else if close(prev.conj(), lam) {
                Some(xis[j].conj())
            } else {
                None
            }
        });
        let xi = match cached {
            Some(xi) => xi,
            None => xi_function(lam, kernel)?,
        };
        xis.push(xi);
    }
    Ok(DynamicalMap { basis, kernel: kernel.clone(), xis })
}

impl DynamicalMap {
    pub fn basis(&self) -> &DampingBasis {
        &self.basis
    }

    pub fn kernel(&self) -> &MemoryKernel {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn xi(&self, index: usize) -> &PoleResidueFn {
        &self.xis[index]
    }

    pub fn xis(&self) -> &[PoleResidueFn] {
        &self.xis
    }

    pub fn xi_values(&self, t: f64) -> Vec<Complex64> {
        self.xis.iter().map(|xi| xi.eval(t)).collect()
    }

    /// Matrix of `Φ(t)` in the vectorized representation.
    pub fn superoperator_at(&self, t: f64) -> Result<Superoperator> {
        check_time(t)?;
        Superoperator::from_matrix(scaled_product(
            self.basis.right_matrix(),
            &self.xi_values(t),
            self.basis.left_matrix(),
        ))
    }

    /// Real zeros of real-valued `ξ_index` on `(0, t_max]`, located by sign
    /// changes on `samples` uniform subintervals and refined by bisection.
    pub fn xi_zeros(&self, index: usize, t_max: f64, samples: usize) -> Vec<f64> {
        let xi = &self.xis[index];
        if !xi.is_real() || samples == 0 || t_max <= 0.0 {
            return Vec::new();
        }
        let f = |t: f64| xi.eval(t).re;
        let h = t_max / samples as f64;
        let mut zeros = Vec::new();
        let mut prev = f(0.0);
        for j in 1..=samples {
            let (mut lo, mut hi) = ((j - 1) as f64 * h, j as f64 * h);
            let cur = f(hi);
            if cur == 0.0 {
                zeros.push(hi);
            } else if prev * cur < 0.0 {
                let mut flo = prev;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = f(mid);
                    if fm * flo > 0.0 {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                zeros.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        zeros
    }

    /// `ρ(t)` sampled on `t_j = j·h`, `j < steps`.
    pub fn trajectory(&self, rho0: &DensityMatrix, step: f64, steps: usize) -> Result<Trajectory> {
        let states = (0..steps)
            .map(|j| apply_map(self, rho0, j as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(step, states)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `ρ(t) = Σ_i ξ_i(t) Tr[L_i ρ0] R_i`, re-Hermitized.
pub fn apply_map(map: &DynamicalMap, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let mut mu = map.basis.coefficients(rho0.matrix())?;
    for (m, xi) in mu.iter_mut().zip(&map.xis) {
        *m *= xi.eval(t);
    }
    let rho = map.basis.synthesize(&mu)?;
    let dev = hermiticity_deviation(&rho);
    if dev > HERMITICITY_TOLERANCE {
        return Err(Error::NumericalConsistency(format!(
            "propagated state at t = {t} deviates from Hermiticity by {dev:e}"
        )));
    }
    DensityMatrix::from_raw(hermitize(&rho))
}

/// `Φ(t)^{-1}: Y ↦ Σ_i ξ_i(t)^{-1} Tr[L_i Y] R_i`.
pub fn invert_map(map: &DynamicalMap, t: f64) -> Result<Superoperator> {
    check_time(t)?;
    let values = map.xi_values(t);
    let mut inv = Vec::with_capacity(values.len());
    for (index, v) in values.iter().enumerate() {
        if v.norm() <= INVERSION_TOLERANCE {
            return Err(Error::NotInvertible { t, index, magnitude: v.norm() });
        }
        inv.push(ONE / v);
    }
    Superoperator::from_matrix(scaled_product(map.basis.right_matrix(), &inv, map.basis.left_matrix()))
}

/// `K(t) = [L ∫₀ᵗ k(t′) e^{Lt′} Φ(t - t′) dt′] Φ(t)^{-1}`, with the memory
/// integral evaluated per damping-basis index by adaptive quadrature.
pub fn tcl_generator(
    map: &DynamicalMap,
    kernel: &MemoryKernel,
    generator: &Superoperator,
    t: f64,
) -> Result<Superoperator> {
    check_time(t)?;
    if generator.dim() != map.dim() {
        return Err(Error::DimensionMismatch("generator and map dimensions differ".into()));
    }
    let values = map.xi_values(t);
    let kt = kernel.time_function()?;
    let weight = kernel.delta_weight();
    let lambdas = map.basis.eigenvalues();
    let mut diag: Vec<Complex64> = Vec::with_capacity(values.len());
    for (i, (&xi_t, &lam)) in values.iter().zip(lambdas).enumerate() {
        if xi_t.norm() <= INVERSION_TOLERANCE {
            return Err(Error::NotInvertible { t, index: i, magnitude: xi_t.norm() });
        }
        if let Some(j) = (0..i).find(|&j| lambdas[j] == lam && map.xis[j] == map.xis[i]) {
            diag.push(diag[j]);
            continue;
        }
        let xi = &map.xis[i];
        let mut integral = xi_t * weight;
        if let Some(k) = &kt {
            let integrand = |s: f64| k.eval(s) * (lam * s).exp() * xi.eval_raw(t - s);
            integral += quadrature::integrate(integrand, 0.0, t, TCL_QUADRATURE_TOLERANCE, 1e-15)?.value;
        }
        diag.push(integral / xi_t);
    }
    let inner = scaled_product(map.basis.right_matrix(), &diag, map.basis.left_matrix());
    Superoperator::from_matrix(generator.matrix().dot(&inner))
}

/// `‖Φ(t) - exp(Lt)‖₂`.
pub fn markov_deviation(map: &DynamicalMap, generator: &Superoperator, t: f64) -> Result<f64> {
    let phi = map.superoperator_at(t)?;
    let e = generator.exp(t)?;
    linalg::spectral_norm(&(phi.matrix() - e.matrix()))
}
