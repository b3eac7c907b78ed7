// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Choi-matrix certification of complete positivity and Kraus extraction.
//!
//! The Choi matrix is `C = Σ_ij E_ij ⊗ Φ(E_ij)`, with the first Kronecker
//! factor as the outer (block) index. In the damping basis this equals
//! `Σ_k ξ_k L_kᵀ ⊗ R_k`.

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::damping::DampingBasis;
use crate::error::{Error, Result};
use crate::lindblad::{DensityMatrix, Superoperator};
use crate::linalg::{self, dagger, eigh, frobenius_norm, hermiticity_deviation, identity, kron, transpose, ComplexMatrix};
use crate::spectral::DynamicalMap;

/// Smallest admissible Choi eigenvalue; also the Kraus rank cutoff.
pub const CP_TOLERANCE: f64 = 1e-9;
/// Time resolution of the first-violation bisection.
pub const BISECTION_RESOLUTION: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    dim: usize,
    time: f64,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix, time: f64) -> Result<Self> {
        let sup = Superoperator::from_matrix(matrix)?;
        Ok(Self { dim: sup.dim(), matrix: sup.matrix().clone(), time })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `Tr C = n` for trace-preserving maps.
    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }
}

/// `Σ_k c_k L_kᵀ ⊗ R_k`.
pub fn choi_from_coefficients(basis: &DampingBasis, coeffs: &[Complex64]) -> Result<ComplexMatrix> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch("one coefficient per damping-basis index".into()));
    }
    let n = basis.dim();
    let mut c = Array2::zeros((n * n, n * n));
    for ((l, r), &x) in basis.left().iter().zip(basis.right()).zip(coeffs) {
        c = c + kron(&transpose(l), r).mapv(|z| z * x);
    }
    Ok(c)
}

pub fn choi_matrix(map: &DynamicalMap, t: f64) -> Result<ChoiMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    ChoiMatrix::new(choi_from_coefficients(map.basis(), &map.xi_values(t))?, t)
}

/// Block form `{Φ(E_ij)}` computed column by column from a superoperator.
pub fn choi_from_superoperator(phi: &Superoperator, t: f64) -> Result<ChoiMatrix> {
    let n = phi.dim();
    let mut c = Array2::zeros((n * n, n * n));
    for i in 0..n {
        for j in 0..n {
            let mut e = Array2::zeros((n, n));
            e[[i, j]] = linalg::ONE;
            let block = phi.apply(&e)?;
            c.slice_mut(s![i * n..(i + 1) * n, j * n..(j + 1) * n]).assign(&block);
        }
    }
    ChoiMatrix::new(c, t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpReport {
    pub is_cp: bool,
    /// Minimal Choi eigenvalue.
    pub margin: f64,
}

pub fn cp_check(choi: &ChoiMatrix) -> Result<CpReport> {
    let scale = linalg::max_abs(&choi.matrix).max(1.0);
    let dev = hermiticity_deviation(&choi.matrix);
    if dev > CP_TOLERANCE * scale {
        return Err(Error::NumericalConsistency(format!(
            "Choi matrix at t = {} is not Hermitian (deviation {dev:e})",
            choi.time
        )));
    }
    let (w, _) = eigh(&linalg::hermitize(&choi.matrix))?;
    let margin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CpReport { is_cp: margin >= -CP_TOLERANCE, margin })
}

#[derive(Clone, Debug)]
pub struct CpScan {
    pub times: Vec<f64>,
    pub margins: Vec<f64>,
    pub is_cp: Vec<bool>,
    /// Index of the first grid point violating CP.
    pub first_violation_index: Option<usize>,
    /// Bisection-refined onset of the first violation.
    pub first_violation_time: Option<f64>,
}

impl CpScan {
    pub fn all_cp(&self) -> bool {
        self.first_violation_index.is_none()
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn margin_at(map: &DynamicalMap, t: f64) -> Result<f64> {
    Ok(cp_check(&choi_matrix(map, t)?)?.margin)
}

pub fn cp_scan(map: &DynamicalMap, grid: &[f64]) -> Result<CpScan> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("CP scan grid must be sorted".into()));
    }
    let margins = grid.iter().map(|&t| margin_at(map, t)).collect::<Result<Vec<f64>>>()?;
    let is_cp: Vec<bool> = margins.iter().map(|&m| m >= -CP_TOLERANCE).collect();
    let first = is_cp.iter().position(|&ok| !ok);
    let first_time = match first {
        None => None,
        Some(0) => Some(grid[0]),
        Some(j) => {
            let (mut lo, mut hi) = (grid[j - 1], grid[j]);
            while hi - lo > BISECTION_RESOLUTION * hi.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                if margin_at(map, mid)? >= -CP_TOLERANCE {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        }
    };
    Ok(CpScan {
        times: grid.to_vec(),
        margins,
        is_cp,
        first_violation_index: first,
        first_violation_time: first_time,
    })
}

/// Operators `M_α` with `Φ(ρ) = Σ_α M_α ρ M_α^†`.
#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    weights: Vec<f64>,
}

impl KrausSet {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Choi eigenvalue associated with each operator.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = rho.nrows();
        self.operators
            .iter()
            .fold(Array2::zeros((n, n)), |acc, m| acc + m.dot(rho).dot(&dagger(m)))
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_raw(self.apply(rho.matrix()))
    }

    /// `‖Σ_α M_α^† M_α - I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.operators.first().map_or(0, |m| m.nrows());
        let sum = self
            .operators
            .iter()
            .fold(Array2::zeros((n, n)), |acc: ComplexMatrix, m| acc + dagger(m).dot(m));
        frobenius_norm(&(sum - identity(n)))
    }
}

/// Eigenvectors of the Choi matrix scaled by `√eigenvalue`, each cut into `n`
/// segments that become the columns of one Kraus operator.
pub fn kraus_extract(choi: &ChoiMatrix) -> Result<KrausSet> {
    let report = cp_check(choi)?;
    if !report.is_cp {
        return Err(Error::NotCompletelyPositive { margin: report.margin });
    }
    let n = choi.dim;
    let (w, v) = eigh(&linalg::hermitize(&choi.matrix))?;
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let mut operators = Vec::new();
    let mut weights = Vec::new();
    for k in order {
        if w[k] <= CP_TOLERANCE {
            continue;
        }
        let a = v.column(k).mapv(|z| z * w[k].sqrt());
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m.column_mut(i).assign(&a.slice(s![i * n..(i + 1) * n]));
        }
        operators.push(m);
        weights.push(w[k]);
    }
    Ok(KrausSet { operators, weights })
}
