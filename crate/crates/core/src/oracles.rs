// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Direct numerical solvers used as ground truth for the spectral solver.
//!
//! The history integrators work in the real coordinates `x_a = Tr[G_a ρ]` of
//! an orthonormal Hermitian operator basis `{G_a}`, so a Hermiticity-preserving
//! generator becomes a real matrix `M_ab = Tr[G_a L(G_b)]`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::MemoryKernel;
use crate::lindblad::{DensityMatrix, Superoperator};
use crate::linalg::{self, expm, hermitian_basis, hs_inner, vectorize, ComplexMatrix, ZERO};
use crate::trajectory::Trajectory;

/// Largest admissible `h ‖L‖`.
pub const MAX_STEP_GENERATOR: f64 = 0.1;
/// Largest admissible `h` times the fastest kernel pole magnitude.
pub const MAX_STEP_KERNEL: f64 = 0.5;

/// Number of grid points `t_max / h + 1`, requiring `t_max` to be a multiple
/// of `h` up to rounding.
fn grid_points(t_max: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid grid t_max = {t_max}, h = {h}")));
    }
    let steps = (t_max / h).round();
    if (steps * h - t_max).abs() > 1e-6 * h {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} is not a multiple of h = {h}")));
    }
    Ok(steps as usize + 1)
}

struct RealForm {
    basis: Vec<ComplexMatrix>,
    d: usize,
}

impl RealForm {
    fn new(n: usize) -> Self {
        let basis = hermitian_basis(n);
        Self { d: basis.len(), basis }
    }

    fn coords(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.basis.iter().map(|g| hs_inner(g, rho).re).collect()
    }

    fn state(&self, x: &[f64]) -> Result<DensityMatrix> {
        let n = self.basis[0].nrows();
        let mut m = Array2::<Complex64>::zeros((n, n));
        for (g, &xa) in self.basis.iter().zip(x) {
            m.scaled_add(Complex64::new(xa, 0.0), g);
        }
        DensityMatrix::from_raw(m)
    }

    /// Row-major `M_ab = Tr[G_a L(G_b)]`.
    fn generator(&self, l: &Superoperator) -> Result<Vec<f64>> {
        let mut m = vec![0.0; self.d * self.d];
        let mut worst_im: f64 = 0.0;
        let scale = linalg::max_abs(l.matrix()).max(1.0);
        for (b, gb) in self.basis.iter().enumerate() {
            let lg = l.apply(gb)?;
            for (a, ga) in self.basis.iter().enumerate() {
                let z = hs_inner(ga, &lg);
                worst_im = worst_im.max(z.im.abs());
                m[a * self.d + b] = z.re;
            }
        }
        if worst_im > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "generator does not preserve Hermiticity (imaginary part {worst_im:e})"
            )));
        }
        Ok(m)
    }
}

fn real_matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}

/// `y += s · A x`.
#[inline]
fn gemv_acc(y: &mut [f64], a: &[f64], x: &[f64], s: f64) {
    let d = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        let row = &a[i * d..(i + 1) * d];
        let mut acc = 0.0;
        for (r, xv) in row.iter().zip(x) {
            acc += r * xv;
        }
        *yi += s * acc;
    }
}

/// Largest step the history integrators accept for `l` and `kernel`. Delta
/// kernels are propagated exactly and impose no limit.
pub fn max_stable_step(l: &Superoperator, kernel: &MemoryKernel) -> Result<f64> {
    if kernel.is_delta() {
        return Ok(f64::INFINITY);
    }
    let norm = l.norm()?;
    let rate = kernel.rate_scale()?;
    let k0 = kernel.eval_time(0.0)?.abs();
    let limit = |bound: f64, scale: f64| if scale > 0.0 { bound / scale } else { f64::INFINITY };
    Ok(limit(MAX_STEP_GENERATOR, norm)
        .min(limit(MAX_STEP_KERNEL, rate))
        .min(limit(MAX_STEP_KERNEL, (norm * k0).sqrt())))
}

fn check_step(l: &Superoperator, kernel: &MemoryKernel, h: f64) -> Result<f64> {
    let norm = l.norm()?;
    if h * norm > MAX_STEP_GENERATOR {
        return Err(Error::StepTooLarge(format!(
            "h·‖L‖ = {:.3e} exceeds {MAX_STEP_GENERATOR}",
            h * norm
        )));
    }
    let rate = kernel.rate_scale()?;
    if h * rate > MAX_STEP_KERNEL {
        return Err(Error::StepTooLarge(format!(
            "h times the kernel rate = {:.3e} exceeds {MAX_STEP_KERNEL}",
            h * rate
        )));
    }
    let k0 = kernel.eval_time(0.0)?.abs();
    if h * (norm * k0).sqrt() > MAX_STEP_KERNEL {
        return Err(Error::StepTooLarge(format!(
            "h·√(‖L‖ |k(0)|) = {:.3e} exceeds {MAX_STEP_KERNEL}",
            h * (norm * k0).sqrt()
        )));
    }
    Ok(norm)
}

/// Shared scheme for `dx/dt = M ∫₀ᵗ k(t′) E(t′) x(t - t′) dt′` with
/// `E(t′) = exp(M t′)` (`propagate = true`) or the identity.
fn integrate_history(
    l: &Superoperator,
    kernel: &MemoryKernel,
    rho0: &DensityMatrix,
    t_max: f64,
    h: f64,
    propagate: bool,
) -> Result<Trajectory> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch("initial state and generator dimensions differ".into()));
    }
    let points = grid_points(t_max, h)?;
    if let MemoryKernel::DiracDelta(w) = kernel {
        return markov_trajectory(&l.scale(*w), rho0, h, points);
    }
    check_step(l, kernel, h)?;
    let form = RealForm::new(l.dim());
    let d = form.d;
    let m = form.generator(l)?;

    // A_j = k(t_j) E(t_j), stored contiguously.
    let mut a = vec![0.0; points * d * d];
    let mut e: Vec<f64> = (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let step_exp: Vec<f64> = if propagate {
        let mc = Array2::from_shape_fn((d, d), |(i, j)| Complex64::new(m[i * d + j] * h, 0.0));
        expm(&mc)?.iter().map(|z| z.re).collect()
    } else {
        e.clone()
    };
    for j in 0..points {
        let kj = kernel.eval_time(j as f64 * h)?;
        for (dst, src) in a[j * d * d..(j + 1) * d * d].iter_mut().zip(&e) {
            *dst = kj * src;
        }
        if propagate && j + 1 < points {
            e = real_matmul(&e, &step_exp, d);
        }
    }
    let block = |j: usize| &a[j * d * d..(j + 1) * d * d];

    let mut xs = vec![0.0; points * d];
    xs[..d].copy_from_slice(&form.coords(rho0.matrix()));
    let mut f_cur = vec![0.0; d];
    let mut hist = vec![0.0; d];
    let mut tmp = vec![0.0; d];
    let mut f_next = vec![0.0; d];
    for j in 0..points.saturating_sub(1) {
        // Σ_{m=1}^{j} A_m x_{j+1-m} + ½ A_{j+1} x_0
        hist.iter_mut().for_each(|v| *v = 0.0);
        for mi in 1..=j {
            gemv_acc(&mut hist, block(mi), &xs[(j + 1 - mi) * d..(j + 2 - mi) * d], 1.0);
        }
        gemv_acc(&mut hist, block(j + 1), &xs[..d], 0.5);

        let (done, rest) = xs.split_at_mut((j + 1) * d);
        let xj = &done[j * d..];
        let next = &mut rest[..d];
        // Predictor.
        for i in 0..d {
            next[i] = xj[i] + h * f_cur[i];
        }
        let eval = |x: &[f64], out: &mut [f64], tmp: &mut [f64]| {
            tmp.copy_from_slice(&hist);
            gemv_acc(tmp, block(0), x, 0.5);
            out.iter_mut().for_each(|v| *v = 0.0);
            gemv_acc(out, &m, tmp, h);
        };
        eval(next, &mut f_next, &mut tmp);
        // Corrector.
        for i in 0..d {
            next[i] = xj[i] + 0.5 * h * (f_cur[i] + f_next[i]);
        }
        eval(next, &mut f_cur, &mut tmp);
    }
    let states = xs.chunks(d).map(|x| form.state(x)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(h, states)
}

/// `dρ/dt = L ∫₀ᵗ k(t′) e^{Lt′} ρ(t - t′) dt′` by trapezoidal convolution and
/// a Heun predictor-corrector step.
pub fn integrate_pmme(
    l: &Superoperator,
    kernel: &MemoryKernel,
    rho0: &DensityMatrix,
    t_max: f64,
    h: f64,
) -> Result<Trajectory> {
    integrate_history(l, kernel, rho0, t_max, h, true)
}

/// `dρ/dt = L ∫₀ᵗ k(t′) ρ(t - t′) dt′` with the same scheme.
pub fn integrate_reduced(
    l: &Superoperator,
    kernel: &MemoryKernel,
    rho0: &DensityMatrix,
    t_max: f64,
    h: f64,
) -> Result<Trajectory> {
    integrate_history(l, kernel, rho0, t_max, h, false)
}

/// `exp(L t_j) ρ0` on `t_j = j·h`, `j < points`.
pub fn markov_trajectory(
    l: &Superoperator,
    rho0: &DensityMatrix,
    h: f64,
    points: usize,
) -> Result<Trajectory> {
    let step = l.exp(h)?;
    let mut v = vectorize(rho0.matrix())?;
    let mut states = Vec::with_capacity(points);
    for j in 0..points {
        if j > 0 {
            v = step.matrix().dot(&v);
        }
        states.push(DensityMatrix::from_raw(linalg::devectorize(&v)?)?);
    }
    Trajectory::new(h, states)
}

/// Weighted-average recursion `ρ_N = Σ_{m=1}^N w_m Λ(mε) ρ_{N-m}` with
/// `w_m ∝ k(mε)ε` normalized to unit sum at every level and `Λ(t) = e^{Lt}`.
/// A delta kernel puts all weight on `m = 1`.
pub fn discrete_recursion(
    l: &Superoperator,
    kernel: &MemoryKernel,
    eps: f64,
    steps: usize,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("recursion needs N >= 1".into()));
    }
    let raw: Vec<f64> = match kernel {
        MemoryKernel::DiracDelta(w) => {
            let mut v = vec![0.0; steps];
            v[0] = *w;
            v
        }
        _ => (1..=steps).map(|m| kernel.eval_time(m as f64 * eps).map(|k| k * eps)).collect::<Result<_>>()?,
    };
    let lambda = l.exp(eps)?;
    // Λ(mε) ρ_j for every stored level j, advanced one power at a time.
    let rho0v = vectorize(rho0.matrix())?;
    let mut levels: Vec<Array1<Complex64>> = vec![rho0v];
    for n in 1..=steps {
        let total: f64 = raw[..n].iter().sum();
        if total == 0.0 || !total.is_finite() {
            return Err(Error::ZeroWeights);
        }
        // Horner-like accumulation: Σ_m w_m Λ^m ρ_{n-m}
        //   = Λ(w_1 ρ_{n-1} + Λ(w_2 ρ_{n-2} + ...)).
        let mut acc = Array1::<Complex64>::from_elem(levels[0].len(), ZERO);
        for m in (1..=n).rev() {
            let w = raw[m - 1] / total;
            acc.scaled_add(Complex64::new(w, 0.0), &levels[n - m]);
            acc = lambda.matrix().dot(&acc);
        }
        levels.push(acc);
    }
    DensityMatrix::from_raw(linalg::devectorize(&levels[steps])?)
}

/// Pointwise trace-norm distances between two trajectories on one grid.
#[derive(Clone, Debug)]
pub struct Deviation {
    pub distances: Vec<f64>,
    pub max: f64,
    pub mean: f64,
}

pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<Deviation> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} points", a.len(), b.len())));
    }
    if a.len() > 1 && (a.step() - b.step()).abs() > 1e-12 * a.step().abs().max(b.step().abs()) {
        return Err(Error::GridMismatch(format!("steps {} vs {}", a.step(), b.step())));
    }
    if a.dim() != b.dim() {
        return Err(Error::GridMismatch(format!("dimensions {} vs {}", a.dim(), b.dim())));
    }
    let distances = a
        .states()
        .iter()
        .zip(b.states())
        .map(|(x, y)| linalg::trace_norm(&(x.matrix() - y.matrix())))
        .collect::<Result<Vec<f64>>>()?;
    let max = distances.iter().cloned().fold(0.0, f64::max);
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    Ok(Deviation { distances, max, mean })
}
