// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix helpers shared by the solvers.
//!
//! Operators are stored as `Array2<Complex64>`. Superoperators act on the
//! column-major vectorization `vec(X)[i + n*j] = X[i, j]`, for which
//! `vec(A X B) = (B^T ⊗ A) vec(X)`.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Eigh, Inverse, Solve, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dense complex matrix.
pub type ComplexMatrix = Array2<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> ComplexMatrix {
    Array2::eye(n)
}

/// Conjugate transpose.
pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn transpose(m: &ComplexMatrix) -> ComplexMatrix {
    m.t().to_owned()
}

/// Kronecker product with `a` as the outer (block) index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|z| z * aij));
        }
    }
    out
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diag().sum()
}

/// Hilbert-Schmidt inner product `Tr[A^† B]`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.sum())
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let (_, s, _) = m.svd(false, false)?;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

/// `‖(X - X^†)/2‖_F`.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    frobenius_norm(&((m - &dagger(m)) * 0.5))
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &dagger(m)) * 0.5
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(m: &ComplexMatrix) -> Result<(Array1<f64>, ComplexMatrix)> {
    // LAPACK sees a row-major array as its transpose, which for a Hermitian
    // matrix is the conjugate; hand it conj(m) so the vectors belong to m.
    let conj = Array2::from_shape_fn(m.dim(), |(i, j)| m[[i, j]].conj());
    Ok(conj.eigh(UPLO::Upper)?)
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(m.inv()?)
}

/// Column-major vectorization.
pub fn vectorize(m: &ComplexMatrix) -> Result<Array1<Complex64>> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch(format!(
            "vectorize expects a square matrix, got {r}x{c}"
        )));
    }
    Ok(m.t().iter().cloned().collect())
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &Array1<Complex64>) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} is not a vectorized square matrix",
            v.len()
        )));
    }
    let mut m = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            m[[i, j]] = v[i + n * j];
        }
    }
    Ok(m)
}

/// `V diag(d) W` for square `V`, `W`.
pub(crate) fn scaled_product(
    v: &ComplexMatrix,
    d: &[Complex64],
    w: &ComplexMatrix,
) -> ComplexMatrix {
    let mut vd = v.clone();
    for (mut col, &di) in vd.axis_iter_mut(Axis(1)).zip(d) {
        col.mapv_inplace(|z| z * di);
    }
    vd.dot(w)
}

// Padé coefficients for the scaling-and-squaring exponential (orders 3..13).
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &ComplexMatrix) -> f64 {
    m.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn solve_matrix(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = Array2::zeros(rhs.dim());
    for (j, col) in rhs.axis_iter(Axis(1)).enumerate() {
        let x = lhs.solve(&col.to_owned())?;
        out.column_mut(j).assign(&x);
    }
    Ok(out)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant (orders 3, 5, 7, 9, 13 selected by the 1-norm).
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch("expm expects a square matrix".into()));
    }
    if n == 0 {
        return Ok(a.clone());
    }
    let ident = identity(n);
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(ident);
    }

    let a2 = a.dot(a);
    for &(order, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match order {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let mut power = ident.clone();
            let mut u = ident.mapv(|z| z * coeffs[1]);
            let mut v = ident.mapv(|z| z * coeffs[0]);
            for k in 1..=order / 2 {
                power = power.dot(&a2);
                u = u + power.mapv(|z| z * coeffs[2 * k + 1]);
                v = v + power.mapv(|z| z * coeffs[2 * k]);
            }
            let u = a.dot(&u);
            return solve_matrix(&(&v - &u), &(&v + &u));
        }
    }

    let s = ((norm / THETA13).log2().ceil()).max(0.0) as i32;
    let scale = 0.5f64.powi(s);
    let a = a.mapv(|z| z * scale);
    let a2 = a2.mapv(|z| z * scale * scale);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = &PADE13;
    let lin = |m6: f64, m4: f64, m2: f64, m0: f64| -> ComplexMatrix {
        a6.mapv(|z| z * m6) + a4.mapv(|z| z * m4) + a2.mapv(|z| z * m2) + ident.mapv(|z| z * m0)
    };
    let u_inner = a6.dot(&(a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9])))
        + lin(b[7], b[5], b[3], b[1]);
    let u = a.dot(&u_inner);
    let v = a6.dot(&(a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8])))
        + lin(b[6], b[4], b[2], b[0]);
    let mut r = solve_matrix(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Orthonormal Hermitian operator basis (generalized Gell-Mann), starting with
/// `I/√n`. For `n = 2` this is `{I, σx, σy, σz}/√2`.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    let norm = (n as f64).sqrt();
    basis.push(identity(n).mapv(|z| z / norm));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = Array2::zeros((n, n));
            sym[[j, k]] = Complex64::new(s, 0.0);
            sym[[k, j]] = Complex64::new(s, 0.0);
            basis.push(sym);
            let mut anti = Array2::zeros((n, n));
            anti[[j, k]] = Complex64::new(0.0, -s);
            anti[[k, j]] = Complex64::new(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..n {
        let scale = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = Array2::zeros((n, n));
        for j in 0..l {
            diag[[j, j]] = Complex64::new(scale, 0.0);
        }
        diag[[l, l]] = Complex64::new(-(l as f64) * scale, 0.0);
        basis.push(diag);
    }
    basis
}
