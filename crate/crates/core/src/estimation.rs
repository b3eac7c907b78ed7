// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Kernel recovery from state time series: `ξ_i(t) = Tr[L_i ρ(t)] / Tr[L_i ρ0]`
//! is fitted by a sum of exponentials, and the kernel follows from
//! `k̃(s - λ) = (s - 1/ξ̃(s)) / λ`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{LeastSquaresSvd, SVD};
use num_complex::Complex64;

use crate::damping::DampingBasis;
use crate::error::{Error, Result};
use crate::kernel::MemoryKernel;
use crate::lindblad::DensityMatrix;
use crate::linalg::ONE;
use crate::poly::Polynomial;
use crate::rational::RationalFunction;
use crate::trajectory::Trajectory;

/// `|Tr[L_i ρ0]|` at or below this makes index `i` uninformative.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-10;
/// Singular-value ratio below which the prediction system is rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-13;
/// Default relative RMS residual accepted by a fit.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-6;
/// Coefficient tolerance for recognizing named kernel variants.
pub const SIMPLIFY_TOLERANCE: f64 = 1e-8;
/// A recovered kernel with both a delta weight and a regular part above this
/// is rejected as mixed.
pub const MIXED_TOLERANCE: f64 = 1e-6;
/// Largest number of exponentials tried by automatic order selection.
pub const MAX_AUTO_ORDER: usize = 6;

/// Normalized response samples `ξ_i(t_j)` for every informative index.
#[derive(Clone, Debug)]
pub struct XiSamples {
    step: f64,
    len: usize,
    eigenvalues: Vec<Complex64>,
    series: Vec<Option<Vec<Complex64>>>,
    provenance: String,
}

impl XiSamples {
    pub fn new(step: f64, eigenvalues: Vec<Complex64>, series: Vec<Option<Vec<Complex64>>>, provenance: String) -> Result<Self> {
        if series.len() != eigenvalues.len() {
            return Err(Error::DimensionMismatch("one series per eigenvalue".into()));
        }
        let len = series.iter().flatten().map(|s| s.len()).next().unwrap_or(0);
        for s in series.iter().flatten() {
            if s.len() != len {
                return Err(Error::DimensionMismatch("series lengths differ".into()));
            }
            if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument("non-finite ξ sample".into()));
            }
        }
        Ok(Self { step, len, eigenvalues, series, provenance })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn series(&self, index: usize) -> Option<&[Complex64]> {
        self.series.get(index).and_then(|s| s.as_deref())
    }

    pub fn informative_indices(&self) -> Vec<usize> {
        (0..self.series.len()).filter(|&i| self.series[i].is_some()).collect()
    }

    /// Description of the Markovian model assumed for the inversion.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

pub fn xi_from_states(basis: &DampingBasis, states: &Trajectory, rho0: &DensityMatrix) -> Result<XiSamples> {
    if states.dim() != basis.dim() || rho0.dim() != basis.dim() {
        return Err(Error::DimensionMismatch("trajectory, state and basis dimensions differ".into()));
    }
    let denominators = basis.coefficients(rho0.matrix())?;
    let coeffs = states
        .states()
        .iter()
        .map(|s| basis.coefficients(s.matrix()))
        .collect::<Result<Vec<_>>>()?;
    let mut series = Vec::with_capacity(basis.len());
    for (i, &den) in denominators.iter().enumerate() {
        if den.norm() <= DENOMINATOR_TOLERANCE {
            log::warn!(
                "skipping damping-basis index {i} (λ = {}): Tr[L_i ρ0] = {den:.3e}",
                basis.eigenvalues()[i]
            );
            series.push(None);
            continue;
        }
        series.push(Some(coeffs.iter().map(|c| c[i] / den).collect()));
    }
    if series.iter().all(Option::is_none) {
        return Err(Error::UninformativeInitialState);
    }
    let lambdas: Vec<String> = basis.eigenvalues().iter().map(|l| format!("{l:.6e}")).collect();
    let provenance = format!("dimension {} generator with eigenvalues [{}]", basis.dim(), lambdas.join(", "));
    XiSamples::new(states.step(), basis.eigenvalues().to_vec(), series, provenance)
}

/// Exponential-sum fit of one `ξ_i` series and its Laplace transform.
#[derive(Clone, Debug)]
pub struct XiFit {
    pub index: usize,
    pub poles: Vec<Complex64>,
    pub amplitudes: Vec<Complex64>,
    pub transform: RationalFunction,
    /// Relative RMS residual of the fit on the samples.
    pub residual: f64,
}

impl XiFit {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.poles.iter().zip(&self.amplitudes).map(|(p, c)| c * (p * t).exp()).sum()
    }
}

/// Fits `ξ_index(t) ≈ Σ_{k=1}^q c_k e^{s_k t}` by linear prediction and returns
/// its transform `Σ c_k/(s - s_k)`, whose numerator must have degree at most
/// `p`.
pub fn fit_xi_rational(samples: &XiSamples, index: usize, order: (usize, usize)) -> Result<XiFit> {
    fit_xi_rational_with(samples, index, order, DEFAULT_RESIDUAL_THRESHOLD)
}

pub fn fit_xi_rational_with(
    samples: &XiSamples,
    index: usize,
    (p, q): (usize, usize),
    threshold: f64,
) -> Result<XiFit> {
    if q < p + 1 || q == 0 {
        return Err(Error::InvalidArgument(format!("model order needs q >= p + 1, got ({p}, {q})")));
    }
    let y = samples
        .series(index)
        .ok_or_else(|| Error::InvalidArgument(format!("index {index} has no samples")))?;
    let n = y.len();
    if n < 3 * (p + q) || n < 2 * q + 1 {
        return Err(Error::ModelOrder(format!(
            "{n} samples are not enough for order ({p}, {q}); need at least {}",
            (3 * (p + q)).max(2 * q + 1)
        )));
    }
    let dt = samples.step();
    let rows = n - q;

    // y_{j+q} = -Σ_{k=1}^{q} a_k y_{j+q-k}
    let hankel = Array2::from_shape_fn((rows, q), |(j, k)| y[j + q - 1 - k]);
    let rhs = Array1::from_shape_fn(rows, |j| -y[j + q]);
    let (_, sv, _) = hankel.svd(false, false)?;
    let (smax, smin) = (sv[0], sv[sv.len() - 1]);
    if smax == 0.0 || smin / smax < RANK_TOLERANCE {
        return Err(Error::RankDeficient(format!(
            "prediction matrix singular-value ratio {:.3e} for q = {q}",
            if smax == 0.0 { 0.0 } else { smin / smax }
        )));
    }
    let a = hankel.least_squares(&rhs)?.solution;
    // z^q + a_1 z^{q-1} + ... + a_q
    let mut char_coeffs: Vec<Complex64> = a.iter().rev().cloned().collect();
    char_coeffs.push(ONE);
    let roots = Polynomial::new(char_coeffs).roots()?;
    if roots.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::RankDeficient("zero root in prediction polynomial".into()));
    }
    let poles: Vec<Complex64> = roots.iter().map(|z| z.ln() / dt).collect();

    let vander = Array2::from_shape_fn((n, q), |(j, k)| roots[k].powu(j as u32));
    let yv = Array1::from_vec(y.to_vec());
    let amplitudes = vander.least_squares(&yv)?.solution;
    let fitted = vander.dot(&amplitudes);
    let num: f64 = fitted.iter().zip(y).map(|(f, v)| (f - v).norm_sqr()).sum();
    let den: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    let residual = (num / den.max(f64::MIN_POSITIVE)).sqrt();
    if residual > threshold {
        return Err(Error::ModelOrder(format!(
            "order ({p}, {q}) leaves relative residual {residual:.3e} > {threshold:.1e}"
        )));
    }

    let mut transform = RationalFunction::from_partial_fractions(&poles, amplitudes.as_slice().expect("contiguous"))?;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let real_data = y.iter().all(|v| v.im.abs() <= 1e-14 * scale.max(1.0));
    if real_data {
        transform = transform.real_part()?;
    }
    let num_deg = transform.numerator().degree().unwrap_or(0);
    if num_deg > p {
        return Err(Error::ModelOrder(format!(
            "fitted numerator has degree {num_deg}, above the requested {p}"
        )));
    }
    Ok(XiFit { index, poles, amplitudes: amplitudes.to_vec(), transform, residual })
}

/// Tries `(q - 1, q)` for `q = 1..=max_order`, returning the first fit whose
/// residual is below `threshold`.
pub fn fit_xi_auto(samples: &XiSamples, index: usize, max_order: usize, threshold: f64) -> Result<XiFit> {
    let mut last = Error::ModelOrder("no model order tried".into());
    for q in 1..=max_order {
        match fit_xi_rational_with(samples, index, (q - 1, q), threshold) {
            Ok(fit) => return Ok(fit),
            Err(e @ Error::ModelOrder(_)) => last = e,
            Err(e @ Error::RankDeficient(_)) => {
                last = e;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// `k̃(u) = [u + λ - 1/ξ̃(u + λ)] / λ`, separated into a delta weight and a
/// strictly proper part and simplified to a named variant when possible.
pub fn kernel_from_xi(xi: &RationalFunction, lambda: Complex64) -> Result<MemoryKernel> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidArgument("λ = 0 carries no kernel information".into()));
    }
    let num = xi.numerator();
    let den = xi.denominator();
    let (nd, dd) = match (num.degree(), den.degree()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidArgument("ξ̃ is identically zero".into())),
    };
    if dd != nd + 1 {
        return Err(Error::InvalidArgument(format!(
            "ξ̃ must have denominator degree one above the numerator, got {dd} and {nd}"
        )));
    }
    // D = N (c1 s + c0) + R
    let (quot, rem) = den.div_rem(num)?;
    let c1 = quot.coeff(1);
    let c0 = quot.coeff(0);
    if (c1 - ONE).norm() > 1e-6 {
        return Err(Error::InvalidArgument(format!("ξ̃ is not normalized: s ξ̃(s) → {}", ONE / c1)));
    }
    let weight = -c0 / lambda;
    let rem = rem.pruned(1e-12);
    let rem_scale = rem.max_abs_coeff() / den.max_abs_coeff().max(1.0);
    let has_regular = rem_scale > 1e-12;
    if !has_regular {
        return MemoryKernel::delta(weight.re);
    }
    if weight.norm() > MIXED_TOLERANCE {
        return Err(Error::InvalidKernel(format!(
            "recovered kernel has both a delta weight {weight:.3e} and a regular part"
        )));
    }
    let regular = RationalFunction::new(rem.shifted(-lambda).scale(-ONE / lambda), num.shifted(-lambda))?;
    simplify(regular)
}

fn simplify(f: RationalFunction) -> Result<MemoryKernel> {
    let den = f.denominator();
    let num = f.numerator();
    let real = |z: Complex64| z.im.abs() <= SIMPLIFY_TOLERANCE * z.norm().max(1.0);
    let all_real = num.coeffs().iter().chain(den.coeffs()).all(|&z| real(z));
    if !all_real {
        return MemoryKernel::rational(f);
    }
    match (num.degree(), den.degree()) {
        (Some(0), Some(1)) => MemoryKernel::exponential(num.coeff(0).re, den.coeff(0).re),
        (Some(nd), Some(2)) if nd <= 1 => {
            let b = den.coeff(1).re / 2.0;
            let mu2 = den.coeff(0).re - b * b;
            let c = num.coeff(1).re;
            if mu2 > SIMPLIFY_TOLERANCE && c.abs() > SIMPLIFY_TOLERANCE {
                let mu = mu2.sqrt();
                let d = (num.coeff(0).re / c - b) / mu;
                MemoryKernel::exp_cos_sin(c, b, mu, d)
            } else {
                MemoryKernel::rational(f.real_part()?)
            }
        }
        _ => MemoryKernel::rational(f.real_part()?),
    }
}

/// Kernel recovered from one damping-basis index.
#[derive(Clone, Debug)]
pub struct IndexEstimate {
    pub index: usize,
    pub eigenvalue: Complex64,
    pub fit: XiFit,
    pub kernel: MemoryKernel,
}

/// Fits and inverts every informative index with non-zero eigenvalue.
pub fn estimate_kernels(samples: &XiSamples, max_order: usize, threshold: f64) -> Result<Vec<IndexEstimate>> {
    let mut out = Vec::new();
    for i in samples.informative_indices() {
        let lam = samples.eigenvalues()[i];
        if lam.norm() == 0.0 {
            continue;
        }
        let fit = fit_xi_auto(samples, i, max_order, threshold)?;
        let kernel = kernel_from_xi(&fit.transform, lam)?;
        out.push(IndexEstimate { index: i, eigenvalue: lam, fit, kernel });
    }
    if out.is_empty() {
        return Err(Error::UninformativeInitialState);
    }
    Ok(out)
}

/// Largest difference between the recovered transforms, sampled on the
/// positive real axis where all stable kernels are finite.
pub fn kernel_disagreement(estimates: &[IndexEstimate]) -> f64 {
    let points: Vec<Complex64> = (1..=8).map(|k| Complex64::new(k as f64, 0.0)).collect();
    let mut worst: f64 = 0.0;
    for (i, a) in estimates.iter().enumerate() {
        for b in &estimates[i + 1..] {
            let (fa, fb) = (a.kernel.laplace(), b.kernel.laplace());
            for &s in &points {
                let s = s + Complex64::new(a.eigenvalue.re.abs().max(b.eigenvalue.re.abs()), 0.0);
                worst = worst.max((fa.eval(s) - fb.eval(s)).norm());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn samples_of(f: impl Fn(f64) -> Complex64, lambda: Complex64, dt: f64, n: usize) -> XiSamples {
        let s: Vec<Complex64> = (0..n).map(|j| f(j as f64 * dt)).collect();
        XiSamples::new(dt, vec![lambda], vec![Some(s)], "test".into()).unwrap()
    }

    #[test]
    fn single_exponential_recovers_markov() {
        let lam = Complex64::new(-0.7, 0.0);
        let s = samples_of(|t| (lam * t).exp(), lam, 0.05, 40);
        let fit = fit_xi_rational(&s, 0, (0, 1)).unwrap();
        assert!((fit.poles[0] - lam).norm() < 1e-10);
        let k = kernel_from_xi(&fit.transform, lam).unwrap();
        match k {
            MemoryKernel::DiracDelta(w) => assert!((w - 1.0).abs() < 1e-8),
            other => panic!("expected delta kernel, got {other:?}"),
        }
    }

    #[test]
    fn too_few_samples() {
        let lam = Complex64::new(-1.0, 0.0);
        let s = samples_of(|t| (lam * t).exp(), lam, 0.1, 5);
        assert!(matches!(fit_xi_rational(&s, 0, (1, 2)), Err(Error::ModelOrder(_))));
    }

    #[test]
    fn insufficient_order_is_reported() {
        let lam = Complex64::new(-1.0, 0.0);
        let s = samples_of(|t| Complex64::new((-t).exp() * (2.0 * t).cos(), 0.0), lam, 0.05, 60);
        assert!(matches!(fit_xi_rational(&s, 0, (0, 1)), Err(Error::ModelOrder(_))));
    }

    #[test]
    fn zero_lambda_is_rejected() {
        let f = RationalFunction::new(Polynomial::constant(ONE), Polynomial::s()).unwrap();
        assert!(kernel_from_xi(&f, ZERO).is_err());
    }
}
