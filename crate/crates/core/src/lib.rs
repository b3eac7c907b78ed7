// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Solvers for the post-Markovian master equation
//! `dρ/dt = L ∫₀ᵗ k(t′) e^{Lt′} ρ(t - t′) dt′`.
//!
//! Operators are vectorized column-major: `vec(X)[i + n·j] = X[i, j]`, so
//! `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

pub mod cp;
pub mod damping;
pub mod error;
pub mod estimation;
pub mod kernel;
pub mod lindblad;
pub mod linalg;
pub mod oracles;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod spectral;
pub mod trajectory;

pub use cp::{choi_from_superoperator, choi_matrix, cp_check, cp_scan, kraus_extract, ChoiMatrix, CpReport, CpScan, KrausSet};
pub use damping::{damping_basis, DampingBasis};
pub use error::{Error, Result};
pub use estimation::{fit_xi_rational, kernel_from_xi, xi_from_states, XiFit, XiSamples};
pub use kernel::MemoryKernel;
pub use lindblad::{build_generator, markov_propagate, DensityMatrix, LindbladSpec, Superoperator, Tolerances};
pub use linalg::{devectorize, vectorize, ComplexMatrix};
pub use num_complex::Complex64;
pub use oracles::{compare_trajectories, discrete_recursion, integrate_pmme, integrate_reduced, Deviation};
pub use poly::Polynomial;
pub use rational::{PoleResidueFn, PoleTerm, RationalFunction};
pub use spectral::{apply_map, assemble_map, characteristic_poles, invert_map, tcl_generator, xi_function, DynamicalMap};
pub use trajectory::Trajectory;
