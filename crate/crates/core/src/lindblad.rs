// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! States, Lindblad generators and Markovian propagation.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, dagger, devectorize, expm, hermiticity_deviation, hermitize, identity, kron, trace,
    transpose, vectorize, ComplexMatrix, I, ONE, ZERO,
};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;

/// Numerical tolerances for state validation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { hermiticity: 1e-10, trace: 1e-10, positivity: 1e-9 }
    }
}

pub mod pauli {
    use super::*;

    pub fn sigma_x() -> ComplexMatrix {
        ndarray::array![[ZERO, ONE], [ONE, ZERO]]
    }

    pub fn sigma_y() -> ComplexMatrix {
        ndarray::array![[ZERO, -I], [I, ZERO]]
    }

    pub fn sigma_z() -> ComplexMatrix {
        ndarray::array![[ONE, ZERO], [ZERO, -ONE]]
    }
}

/// A density matrix: Hermitian with unit trace.
///
/// [`DensityMatrix::new`] additionally enforces positivity. States produced by
/// propagating with a map that is not completely positive can leave the
/// positive cone, so propagators construct results with
/// [`DensityMatrix::from_raw`] and leave positivity to [`DensityMatrix::is_positive`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidState(format!("expected a square matrix, got {r}x{c}")));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let state = Self { matrix: hermitize(&matrix) };
        let min = state.min_eigenvalue()?;
        if min < -tol.positivity {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(state)
    }

    /// Wraps a square matrix after Hermitizing it; trace and positivity are
    /// not checked.
    pub fn from_raw(matrix: ComplexMatrix) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidState(format!("expected a square matrix, got {r}x{c}")));
        }
        Ok(Self { matrix: hermitize(&matrix) })
    }

    /// `(I + x σx + y σy + z σz)/2`.
    pub fn bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = (identity(2)
            + pauli::sigma_x().mapv(|v| v * x)
            + pauli::sigma_y().mapv(|v| v * y)
            + pauli::sigma_z().mapv(|v| v * z))
            * 0.5;
        Self::new(m)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: identity(n).mapv(|z| z / n as f64) }
    }

    /// `|k⟩⟨k|` in the computational basis.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for n = {n}")));
        }
        let mut m = Array2::zeros((n, n));
        m[[k, k]] = ONE;
        Ok(Self { matrix: m })
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let n = psi.len();
        let m = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj() / norm);
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (w, _) = linalg::eigh(&self.matrix)?;
        Ok(w.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    /// Bloch components `Tr[σ_j ρ]` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch("Bloch vector requires n = 2".into()));
        }
        let comp = |s: ComplexMatrix| linalg::trace(&s.dot(&self.matrix)).re;
        Ok([comp(pauli::sigma_x()), comp(pauli::sigma_y()), comp(pauli::sigma_z())])
    }
}

/// Lindblad operators `F_α` with nonnegative rates `a_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSpec {
    dim: usize,
    operators: Vec<(ComplexMatrix, f64)>,
}

impl LindbladSpec {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidArgument(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        Ok(Self { dim, operators: Vec::new() })
    }

    pub fn with_operator(mut self, op: ComplexMatrix, rate: f64) -> Result<Self> {
        self.push(op, rate)?;
        Ok(self)
    }

    pub fn push(&mut self, op: ComplexMatrix, rate: f64) -> Result<()> {
        if op.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "Lindblad operator is {:?}, expected {}x{}",
                op.dim(),
                self.dim,
                self.dim
            )));
        }
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!("rate {rate} must be finite and nonnegative")));
        }
        self.operators.push((op, rate));
        Ok(())
    }

    /// Qubit dephasing whose coherences decay as `exp(-a t)` in the Markovian
    /// limit: `F = σz` with Lindblad rate `a/2`, i.e. `Lρ = -(a/4)[σz,[σz,ρ]]`.
    pub fn dephasing(a: f64) -> Result<Self> {
        Self::new(2)?.with_operator(pauli::sigma_z(), a / 2.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[(ComplexMatrix, f64)] {
        &self.operators
    }
}

/// A linear map on `n x n` operators, stored as an `n² x n²` matrix acting on
/// column-major vectorizations.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let (r, c) = matrix.dim();
        let n = (r as f64).sqrt().round() as usize;
        if r != c || n * n != r || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "superoperator matrix must be n²xn², got {r}x{c}"
            )));
        }
        Ok(Self { dim: n, matrix })
    }

    pub fn zeros(n: usize) -> Self {
        Self { dim: n, matrix: Array2::zeros((n * n, n * n)) }
    }

    pub fn identity(n: usize) -> Self {
        Self { dim: n, matrix: identity(n * n) }
    }

    /// Coherent part `X ↦ -i[H, X]`.
    pub fn hamiltonian(h: &ComplexMatrix) -> Result<Self> {
        let (r, c) = h.dim();
        if r != c {
            return Err(Error::DimensionMismatch("Hamiltonian must be square".into()));
        }
        let id = identity(r);
        let m = (kron(&id, h) - kron(&transpose(h), &id)).mapv(|z| -I * z);
        Ok(Self { dim: r, matrix: m })
    }

    /// Hilbert-space dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {:?}, superoperator acts on {}x{}",
                x.dim(),
                self.dim,
                self.dim
            )));
        }
        devectorize(&self.matrix.dot(&vectorize(x)?))
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        self.check_same_dim(other)?;
        Ok(Self { dim: self.dim, matrix: self.matrix.dot(&other.matrix) })
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        self.check_same_dim(other)?;
        Ok(Self { dim: self.dim, matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, factor: f64) -> Superoperator {
        Self { dim: self.dim, matrix: self.matrix.mapv(|z| z * factor) }
    }

    /// `exp(self · t)`.
    pub fn exp(&self, t: f64) -> Result<Superoperator> {
        Ok(Self { dim: self.dim, matrix: expm(&self.matrix.mapv(|z| z * t))? })
    }

    /// Operator (spectral) norm of the matrix representation.
    pub fn norm(&self) -> Result<f64> {
        linalg::spectral_norm(&self.matrix)
    }

    /// `‖vec(I)^† L‖`, zero for trace-preserving generators.
    pub fn trace_annihilation_residual(&self) -> Result<f64> {
        let v = vectorize(&identity(self.dim))?;
        let row = v.mapv(|z| z.conj()).dot(&self.matrix);
        Ok(linalg::vector_norm(&row))
    }

    fn check_same_dim(&self, other: &Superoperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperators act on dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

/// Builds `Lρ = -½ Σ a_α ([F_α, ρF_α^†] + [F_α ρ, F_α^†])`
/// `= Σ a_α (F_α ρ F_α^† - ½{F_α^† F_α, ρ})`.
pub fn build_generator(spec: &LindbladSpec) -> Result<Superoperator> {
    let n = spec.dim();
    let id = identity(n);
    let mut m: ComplexMatrix = Array2::zeros((n * n, n * n));
    for (f, rate) in spec.operators() {
        if f.dim() != (n, n) {
            return Err(Error::DimensionMismatch("Lindblad operator dimension".into()));
        }
        let fdf = dagger(f).dot(f);
        let jump = kron(&f.mapv(|z| z.conj()), f);
        let anti = kron(&id, &fdf) + kron(&transpose(&fdf), &id);
        m = m + (jump - anti * 0.5).mapv(|z| z * *rate);
    }
    Superoperator::from_matrix(m)
}

/// `ρ(t) = exp(L t) ρ0`.
pub fn markov_propagate(
    generator: &Superoperator,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    if rho0.dim() != generator.dim() {
        return Err(Error::DimensionMismatch("state and generator dimensions differ".into()));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let propagator = generator.exp(t)?;
    DensityMatrix::from_raw(propagator.apply(rho0.matrix())?)
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dephasing_generator_decays_coherence_at_rate_a() {
        let a = 0.7;
        let l = build_generator(&LindbladSpec::dephasing(a).unwrap()).unwrap();
        let lx = l.apply(&sigma_x()).unwrap();
        let ly = l.apply(&sigma_y()).unwrap();
        let lz = l.apply(&sigma_z()).unwrap();
        assert!(linalg::frobenius_norm(&(lx + sigma_x() * a)) < 1e-15);
        assert!(linalg::frobenius_norm(&(ly + sigma_y() * a)) < 1e-15);
        assert!(linalg::frobenius_norm(&lz) < 1e-15);
        // Same map as the double commutator -(a/4)[σz,[σz,·]].
        let x = ndarray::array![[c(0.3, 0.0), c(0.1, -0.2)], [c(0.4, 0.5), c(0.7, 0.0)]];
        let inner = sigma_z().dot(&x) - x.dot(&sigma_z());
        let dc = (sigma_z().dot(&inner) - inner.dot(&sigma_z())) * (-a / 4.0);
        assert!(linalg::frobenius_norm(&(l.apply(&x).unwrap() - dc)) < 1e-15);
    }

    #[test]
    fn empty_spec_gives_zero_generator() {
        let l = build_generator(&LindbladSpec::new(3).unwrap()).unwrap();
        assert_eq!(l, Superoperator::zeros(3));
    }

    #[test]
    fn amplitude_damping_moves_population_to_ground() {
        let mut lower = Array2::zeros((2, 2));
        lower[[0, 1]] = ONE;
        let spec = LindbladSpec::new(2).unwrap().with_operator(lower, 1.0).unwrap();
        let l = build_generator(&spec).unwrap();
        let excited = DensityMatrix::basis_state(2, 1).unwrap();
        let out = l.apply(excited.matrix()).unwrap();
        let expected = ndarray::array![[ONE, ZERO], [ZERO, -ONE]];
        assert!(linalg::frobenius_norm(&(out - expected)) < 1e-15);
        assert!(l.trace_annihilation_residual().unwrap() < 1e-15);
    }

    #[test]
    fn mismatched_operator_is_rejected() {
        let spec = LindbladSpec::new(2).unwrap();
        assert!(matches!(
            spec.with_operator(identity(3), 1.0),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(LindbladSpec::new(2).unwrap().with_operator(identity(2), -1.0).is_err());
        assert!(LindbladSpec::new(MAX_DIM + 1).is_err());
    }

    #[test]
    fn markov_propagation_of_dephasing() {
        let l = build_generator(&LindbladSpec::dephasing(1.0).unwrap()).unwrap();
        let rho0 = DensityMatrix::bloch(1.0, 0.0, 0.0).unwrap();
        assert_eq!(markov_propagate(&l, &rho0, 0.0).unwrap(), rho0);
        for &t in &[0.1, 1.0, 3.5] {
            let rho = markov_propagate(&l, &rho0, t).unwrap();
            let b = rho.bloch_vector().unwrap();
            assert!((b[0] - (-t).exp()).abs() < 1e-14);
            assert!(b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
        }
        assert!(markov_propagate(&l, &rho0, -1.0).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::bloch(0.0, 0.0, 1.0).is_ok());
        assert!(DensityMatrix::bloch(1.5, 0.0, 0.0).is_err());
        assert!(DensityMatrix::new(identity(2)).is_err());
        let non_herm = ndarray::array![[c(0.5, 0.), c(0.1, 0.)], [c(0.2, 0.), c(0.5, 0.)]];
        assert!(DensityMatrix::new(non_herm).is_err());
        let psi = [c(1.0, 0.0), c(0.0, 1.0)];
        let rho = DensityMatrix::pure(&psi).unwrap();
        assert!((rho.bloch_vector().unwrap()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_superoperator_matches_commutator() {
        let h = sigma_x() * 0.3 + sigma_z() * 1.1;
        let s = Superoperator::hamiltonian(&h).unwrap();
        let x = ndarray::array![[c(0.3, 0.0), c(0.1, -0.2)], [c(0.4, 0.5), c(0.7, 0.0)]];
        let direct = (h.dot(&x) - x.dot(&h)).mapv(|z| -I * z);
        assert!(linalg::frobenius_norm(&(s.apply(&x).unwrap() - direct)) < 1e-15);
    }
}
