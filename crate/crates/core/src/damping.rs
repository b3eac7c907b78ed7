// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Bi-orthonormal eigendecomposition ("damping basis") of a generator.
//!
//! Eigenvalues are grouped into clusters of numerically equal values. Inside a
//! cluster the right eigenoperators are chosen by projecting the Hermitian
//! operator basis onto the eigenspace and orthonormalizing, so that degenerate
//! spectra get a deterministic basis (the dephasing generator yields
//! `{I, σz, σx, σy}/√2`). For Hermiticity-preserving generators, real clusters
//! get Hermitian eigenoperators and each complex cluster `λ*` is the exact
//! adjoint of its partner `λ`.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::Eig;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::Superoperator;
use crate::linalg::{
    condition_number, devectorize, frobenius_norm, hermitian_basis, inverse, transpose, vector_norm,
    vectorize, ComplexMatrix, ZERO,
};

/// Eigenvector condition number above which a generator counts as defective.
pub const DIAGONALIZABILITY_LIMIT: f64 = 1e7;

/// Eigenvalues closer than this multiple of `‖L‖_F` form one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;

/// Eigenvalues `λ_i` with right/left eigenoperators satisfying
/// `Tr[L_i R_j] = δ_ij`, ordered by `Re λ` descending, then `Im λ` descending.
#[derive(Clone, Debug)]
pub struct DampingBasis {
    dim: usize,
    eigenvalues: Vec<Complex64>,
    right: Vec<ComplexMatrix>,
    left: Vec<ComplexMatrix>,
    // Columns are vec(R_i); row i of `left_matrix` maps vec(X) to Tr[L_i X].
    right_matrix: ComplexMatrix,
    left_matrix: ComplexMatrix,
}

struct Cluster {
    value: Complex64,
    members: Vec<usize>,
}

impl DampingBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn right(&self) -> &[ComplexMatrix] {
        &self.right
    }

    pub fn left(&self) -> &[ComplexMatrix] {
        &self.left
    }

    pub fn right_matrix(&self) -> &ComplexMatrix {
        &self.right_matrix
    }

    pub fn left_matrix(&self) -> &ComplexMatrix {
        &self.left_matrix
    }

    /// `μ_i = Tr[L_i X]`.
    pub fn coefficients(&self, x: &ComplexMatrix) -> Result<Array1<Complex64>> {
        if x.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch("operator dimension".into()));
        }
        Ok(self.left_matrix.dot(&vectorize(x)?))
    }

    /// `Σ_i c_i R_i`.
    pub fn synthesize(&self, coeffs: &Array1<Complex64>) -> Result<ComplexMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch("coefficient count".into()));
        }
        devectorize(&self.right_matrix.dot(coeffs))
    }

    /// `‖Σ_i Tr[L_i X] R_i - X‖_F`.
    pub fn completeness_residual(&self, x: &ComplexMatrix) -> Result<f64> {
        let back = self.synthesize(&self.coefficients(x)?)?;
        Ok(frobenius_norm(&(back - x)))
    }

    /// `max_ij |Tr[L_i R_j] - δ_ij|`.
    pub fn biorthogonality_residual(&self) -> f64 {
        let g = self.left_matrix.dot(&self.right_matrix);
        let mut worst: f64 = 0.0;
        for ((i, j), z) in g.indexed_iter() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((z - Complex64::new(target, 0.0)).norm());
        }
        worst
    }

    /// `max_i ‖L R_i - λ_i R_i‖_F`.
    pub fn eigen_residual(&self, generator: &Superoperator) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (r, &lam) in self.right.iter().zip(&self.eigenvalues) {
            let lr = generator.apply(r)?;
            worst = worst.max(frobenius_norm(&(lr - r.mapv(|z| z * lam))));
        }
        Ok(worst)
    }
}

/// Index permutation `vec(X) ↔ vec(X^T)`.
fn transpose_index(a: usize, n: usize) -> usize {
    let (i, j) = (a % n, a / n);
    j + n * i
}

fn is_hermiticity_preserving(m: &ComplexMatrix, n: usize, scale: f64) -> bool {
    let tol = 1e-12 * scale;
    m.indexed_iter().all(|((a, b), z)| {
        let partner = m[[transpose_index(a, n), transpose_index(b, n)]].conj();
        (z - partner).norm() <= tol
    })
}

/// `vec(X) ↦ vec(X^†)`; also maps left rows `w ↦ conj(w) T`.
fn adjoint_vec(v: &Array1<Complex64>, n: usize) -> Array1<Complex64> {
    Array1::from_shape_fn(v.len(), |a| v[transpose_index(a, n)].conj())
}

fn cluster_eigenvalues(values: &Array1<Complex64>, tol: f64) -> Vec<Cluster> {
    // Single-linkage grouping.
    let len = values.len();
    let mut parent: Vec<usize> = (0..len).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..len {
        for j in (i + 1)..len {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut owner = vec![usize::MAX; len];
    for i in 0..len {
        let r = root(&mut parent, i);
        if owner[r] == usize::MAX {
            owner[r] = clusters.len();
            clusters.push(Cluster { value: ZERO, members: Vec::new() });
        }
        clusters[owner[r]].members.push(i);
    }
    for c in &mut clusters {
        let mean: Complex64 =
            c.members.iter().map(|&i| values[i]).sum::<Complex64>() / c.members.len() as f64;
        let mut value = mean;
        if value.im.abs() <= tol {
            value.im = 0.0;
        }
        if value.norm() <= tol {
            value = ZERO;
        }
        c.value = value;
    }
    clusters.sort_by(|a, b| {
        b.value
            .re
            .total_cmp(&a.value.re)
            .then(b.value.im.total_cmp(&a.value.im))
            .then(a.members[0].cmp(&b.members[0]))
    });
    clusters
}

/// Orthonormal right vectors spanning a cluster's eigenspace, taken from the
/// projections of `candidates` by a pivoted Gram-Schmidt sweep.
fn cluster_right_vectors(
    vc: &ComplexMatrix,
    wc: &ComplexMatrix,
    candidates: &[Array1<Complex64>],
    hermitian: bool,
    n: usize,
) -> Result<Vec<Array1<Complex64>>> {
    let m = vc.ncols();
    let mut residuals: Vec<Array1<Complex64>> =
        candidates.iter().map(|g| vc.dot(&wc.dot(g))).collect();
    let mut used = vec![false; residuals.len()];
    let mut chosen: Vec<Array1<Complex64>> = Vec::with_capacity(m);
    for _ in 0..m {
        let norms: Vec<f64> = residuals.iter().map(vector_norm).collect();
        let best = norms
            .iter()
            .zip(&used)
            .filter(|(_, &u)| !u)
            .map(|(&x, _)| x)
            .fold(0.0, f64::max);
        if best <= 1e-8 {
            return Err(Error::NumericalConsistency(
                "eigenspace projector has deficient rank".into(),
            ));
        }
        let pick = (0..residuals.len())
            .find(|&k| !used[k] && norms[k] >= 0.5 * best)
            .expect("a candidate attains the maximum");
        used[pick] = true;
        let mut q = residuals[pick].mapv(|z| z / norms[pick]);
        if hermitian {
            q = (&q + &adjoint_vec(&q, n)) * 0.5;
            for prev in &chosen {
                let ip: Complex64 = prev.iter().zip(q.iter()).map(|(a, b)| a.conj() * b).sum();
                q = q - prev.mapv(|z| z * ip);
            }
            let nq = vector_norm(&q);
            q.mapv_inplace(|z| z / nq);
        }
        for r in residuals.iter_mut() {
            let ip: Complex64 = q.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum();
            *r = &*r - &q.mapv(|z| z * ip);
        }
        chosen.push(q);
    }
    Ok(chosen)
}

/// Computes the damping basis of `generator`.
///
/// Fails with [`Error::NonDiagonalizable`] when the eigenvector matrix is
/// (numerically) singular.
pub fn damping_basis(generator: &Superoperator) -> Result<DampingBasis> {
    let n = generator.dim();
    let d = n * n;
    let m = generator.matrix();
    let scale = frobenius_norm(m);
    let tol = CLUSTER_TOLERANCE * scale;

    let (values, vectors) = m.eig()?;
    let condition = condition_number(&vectors)?;
    if !(condition <= DIAGONALIZABILITY_LIMIT) {
        return Err(Error::NonDiagonalizable { condition });
    }
    let vinv = inverse(&vectors)?;

    let clusters = cluster_eigenvalues(&values, tol);
    let hermitian_preserving = is_hermiticity_preserving(m, n, scale);
    let candidates: Vec<Array1<Complex64>> =
        hermitian_basis(n).iter().map(vectorize).collect::<Result<_>>()?;

    // Per cluster: (eigenvalue, right columns, left rows).
    let mut blocks: Vec<(Complex64, Vec<Array1<Complex64>>, Vec<Array1<Complex64>>)> =
        Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let size = cluster.members.len();
        let partner = if hermitian_preserving && cluster.value.im < 0.0 {
            blocks.iter().position(|(v, r, _)| {
                r.len() == size && v.im > 0.0 && (v.conj() - cluster.value).norm() <= tol
            })
        } else {
            None
        };
        if let Some(p) = partner {
            let (v, r, l) = &blocks[p];
            let right = r.iter().map(|x| adjoint_vec(x, n)).collect();
            let left = l.iter().map(|x| adjoint_vec(x, n)).collect();
            blocks.push((v.conj(), right, left));
            continue;
        }

        let vc = vectors.select(Axis(1), &cluster.members);
        let wc = vinv.select(Axis(0), &cluster.members);
        let hermitian = hermitian_preserving && cluster.value.im == 0.0;
        let right = cluster_right_vectors(&vc, &wc, &candidates, hermitian, n)?;
        let mut rmat = Array2::zeros((d, size));
        for (k, r) in right.iter().enumerate() {
            rmat.column_mut(k).assign(r);
        }
        let coeffs = wc.dot(&rmat);
        let wnew = inverse(&coeffs)?.dot(&wc);
        let left = wnew.axis_iter(Axis(0)).map(|row| row.to_owned()).collect();
        blocks.push((cluster.value, right, left));
    }

    let mut eigenvalues = Vec::with_capacity(d);
    let mut right_matrix = Array2::zeros((d, d));
    let mut left_matrix = Array2::zeros((d, d));
    let mut k = 0;
    for (value, right, left) in &blocks {
        for (r, l) in right.iter().zip(left) {
            eigenvalues.push(*value);
            right_matrix.column_mut(k).assign(r);
            left_matrix.row_mut(k).assign(l);
            k += 1;
        }
    }
    let right = (0..d).map(|i| devectorize(&right_matrix.column(i).to_owned())).collect::<Result<Vec<_>>>()?;
    let left = (0..d)
        .map(|i| devectorize(&left_matrix.row(i).to_owned()).map(|x| transpose(&x)))
        .collect::<Result<Vec<_>>>()?;

    Ok(DampingBasis { dim: n, eigenvalues, right, left, right_matrix, left_matrix })
}
