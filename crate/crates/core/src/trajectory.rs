// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::lindblad::DensityMatrix;

/// Unit trace tolerance for stored snapshots.
pub const SNAPSHOT_TRACE_TOLERANCE: f64 = 1e-8;

/// States on the uniform grid `t_j = j·h`, starting at zero.
#[derive(Clone, Debug)]
pub struct Trajectory {
    step: f64,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn new(step: f64, states: Vec<DensityMatrix>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArgument("trajectory has no states".into()));
        }
        if states.len() > 1 && !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {step}")));
        }
        let n = states[0].dim();
        for (j, s) in states.iter().enumerate() {
            if s.dim() != n {
                return Err(Error::DimensionMismatch(format!("snapshot {j} has dimension {}", s.dim())));
            }
            let dev = (s.trace().re - 1.0).abs().max(s.trace().im.abs());
            if dev > SNAPSHOT_TRACE_TOLERANCE {
                return Err(Error::InvalidState(format!(
                    "snapshot {j} has trace deviation {dev:e}"
                )));
            }
        }
        Ok(Self { step, states })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.time(j)).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Every `factor`-th state.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("subsampling factor must be positive".into()));
        }
        let states = self.states.iter().step_by(factor).cloned().collect();
        Ok(Self { step: self.step * factor as f64, states })
    }
}
