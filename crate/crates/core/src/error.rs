// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray_linalg::error::LinalgError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("non-diagonalizable generator (eigenvector condition number {condition:.3e})")]
    NonDiagonalizable { condition: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("Dirac delta kernel has no pointwise value")]
    NoPointwiseValue,

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("ill-conditioned poles: {0}")]
    IllConditionedPoles(String),

    #[error("map not invertible at t = {t}: |xi_{index}(t)| = {magnitude:.3e}")]
    NotInvertible { t: f64, index: usize, magnitude: f64 },

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("map is not completely positive (minimal Choi eigenvalue {margin:.6e})")]
    NotCompletelyPositive { margin: f64 },

    #[error("step too large: {0}")]
    StepTooLarge(String),

    #[error("all recursion weights vanish")]
    ZeroWeights,

    #[error("trajectory grids differ: {0}")]
    GridMismatch(String),

    #[error("uninformative initial state: Tr[L_i rho0] vanishes for every index")]
    UninformativeInitialState,

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("model order insufficient: {0}")]
    ModelOrder(String),

    #[error("linear algebra backend: {0}")]
    Linalg(#[from] LinalgError),
}
