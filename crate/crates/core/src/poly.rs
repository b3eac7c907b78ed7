// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Complex-coefficient univariate polynomials and their roots.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::Array2;
use ndarray_linalg::EigVals;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

/// Relative radius within which roots are merged into one multiple root.
pub const ROOT_MERGE_TOLERANCE: f64 = 1e-7;

/// Radius of the loose clusters examined as candidate multiple roots.
const SNAP_SEARCH_RADIUS: f64 = 1e-2;

/// Coefficients in ascending powers of `s`; exact trailing zeros are trimmed,
/// so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `s`.
    pub fn s() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// Monic polynomial `Π (s - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::constant(ONE), |acc, &r| &acc * &Self::new(vec![-r, ONE]))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `s ↦ p(s - shift)`.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let step = Self::new(vec![-shift, ONE]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * &step) + &Self::constant(c))
    }

    /// Taylor coefficients of `u ↦ p(at + u)` up to (excluding) `order`.
    pub fn taylor_at(&self, at: Complex64, order: usize) -> Vec<Complex64> {
        let shifted = self.shifted(-at);
        (0..order).map(|k| shifted.coeff(k)).collect()
    }

    /// Zeroes coefficients below `rel · max|c_k|` and trims.
    pub fn pruned(&self, rel: f64) -> Self {
        let cutoff = rel * self.max_abs_coeff();
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| if c.norm() <= cutoff { ZERO } else { c })
                .collect(),
        )
    }

    /// Euclidean division `self = q · divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let factor = rem[k + dd] / lead;
            quot[k] = factor;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= factor * dc;
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// All complex roots with multiplicity: eigenvalues of the companion
    /// matrix, each polished by Newton steps that decrease `|p|`.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let deg = self.degree().ok_or(Error::ZeroPolynomial)?;
        if deg == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        let mut raw = if deg == 1 {
            vec![-self.coeffs[0] / lead]
        } else {
            let mut companion = Array2::<Complex64>::zeros((deg, deg));
            for j in 0..deg {
                companion[[0, j]] = -self.coeffs[deg - 1 - j] / lead;
            }
            for i in 1..deg {
                companion[[i, i - 1]] = ONE;
            }
            companion.eigvals()?.to_vec()
        };
        let dp = self.derivative();
        for z in raw.iter_mut() {
            let mut current = self.eval(*z).norm();
            for _ in 0..8 {
                if current == 0.0 {
                    break;
                }
                let slope = dp.eval(*z);
                if slope == ZERO {
                    break;
                }
                let candidate = *z - self.eval(*z) / slope;
                let value = self.eval(candidate).norm();
                if value < current {
                    *z = candidate;
                    current = value;
                } else {
                    break;
                }
            }
        }
        self.snap_multiple_roots(&mut raw);
        Ok(raw)
    }

    /// An m-fold root splits into m roots about `eps^{1/m}` apart, far
    /// beyond the merge radius. Each loose cluster is replaced by a common
    /// center when the Taylor coefficients `t_j`, `j < m`, at that center
    /// are consistent with all m roots lying within `ROOT_MERGE_TOLERANCE`
    /// of that center, up to evaluation round-off.
    fn snap_multiple_roots(&self, roots: &mut [Complex64]) {
        let magnitudes = Polynomial::new(self.coeffs.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect());
        for group in cluster_indices(roots, SNAP_SEARCH_RADIUS) {
            let m = group.len();
            if m < 2 {
                continue;
            }
            // An m-fold root of p is a simple root of p^{(m-1)}.
            let mut center = group.iter().map(|&i| roots[i]).sum::<Complex64>() / m as f64;
            let q = (1..m).fold(self.clone(), |acc, _| acc.derivative());
            let dq = q.derivative();
            for _ in 0..8 {
                let slope = dq.eval(center);
                if slope == ZERO {
                    break;
                }
                let step = q.eval(center) / slope;
                center -= step;
                if step.norm() <= f64::EPSILON * center.norm() {
                    break;
                }
            }
            let t = self.taylor_at(center, m + 1);
            let noise = magnitudes.taylor_at(Complex64::new(center.norm(), 0.0), m);
            let radius = ROOT_MERGE_TOLERANCE * center.norm().max(1.0);
            let lead = t[m].norm();
            let consistent = (0..m).all(|j| {
                t[j].norm() <= 64.0 * f64::EPSILON * noise[j].re + radius.powi((m - j) as i32) * lead
            });
            if consistent {
                for &i in &group {
                    roots[i] = center;
                }
            }
        }
    }
}

/// Index groups of roots linked by `|x - y| <= rel · max(1, |x|, |y|)`.
fn cluster_indices(roots: &[Complex64], rel: f64) -> Vec<Vec<usize>> {
    let close = |x: Complex64, y: Complex64| (x - y).norm() <= rel * x.norm().max(y.norm()).max(1.0);
    let mut parent: Vec<usize> = (0..roots.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if close(roots[i], roots[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj] = ri;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..roots.len() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups.into_iter().map(|(_, members)| members).collect()
}

/// Groups roots closer than `rel · max(1, |r|)` into `(mean, multiplicity)`,
/// ordered by real part descending, then imaginary part descending.
pub fn merge_roots(roots: &[Complex64], rel: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = cluster_indices(roots, rel)
        .into_iter()
        .map(|g| (g.iter().map(|&i| roots[i]).sum::<Complex64>() / g.len() as f64, g.len()))
        .collect();
    out.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.0.im.total_cmp(&a.0.im)));
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-ONE)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| match k {
                0 => format!("({})", c),
                1 => format!("({})s", c),
                _ => format!("({})s^{}", c, k),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        let q = Polynomial::from_real(&[0.0, 1.0]);
        assert_eq!((&p * &q).coeffs().len(), 4);
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
        assert_eq!((&p - &p), Polynomial::zero());
        assert_eq!(p.derivative(), Polynomial::from_real(&[2.0, 6.0]));
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn shift_substitutes_argument() {
        let p = Polynomial::from_real(&[1.0, -3.0, 0.5, 2.0]);
        let lam = c(-0.7, 0.4);
        let shifted = p.shifted(lam);
        for &s in &[c(0.3, 0.1), c(-2.0, 1.5)] {
            assert!((shifted.eval(s) - p.eval(s - lam)).norm() < 1e-12);
        }
        assert!((&shifted.shifted(-lam) - &p).max_abs_coeff() < 1e-13);
    }

    #[test]
    fn division_with_remainder() {
        let d = Polynomial::from_real(&[1.0, 1.0]);
        let p = Polynomial::from_real(&[2.0, 3.0, 1.0, 4.0]);
        let (q, r) = p.div_rem(&d).unwrap();
        let back = &(&q * &d) + &r;
        assert!((&back - &p).max_abs_coeff() < 1e-14);
        assert!(r.degree().unwrap_or(0) < 1);
        assert!(p.div_rem(&Polynomial::zero()).is_err());
    }

    #[test]
    fn roots_of_quadratic_match_formula() {
        // s² + 1.5 s + 1
        let p = Polynomial::from_real(&[1.0, 1.5, 1.0]);
        let roots = merge_roots(&p.roots().unwrap(), ROOT_MERGE_TOLERANCE);
        let im = (1.0f64 - 0.75 * 0.75).sqrt();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 - c(-0.75, im)).norm() < 1e-15);
        assert!((roots[1].0 - c(-0.75, -im)).norm() < 1e-15);
    }

    #[test]
    fn repeated_roots_are_merged() {
        let p = Polynomial::from_roots(&[c(-1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(2.0, 1.0)]);
        let roots = merge_roots(&p.roots().unwrap(), ROOT_MERGE_TOLERANCE);
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].1, 1);
        assert!((roots[0].0 - c(2.0, 1.0)).norm() < 1e-12);
        assert_eq!(roots[1].1, 3);
        assert!((roots[1].0 - c(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn pruning_drops_relative_noise() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(1e-14, 0.0), c(2.0, 0.0), c(1e-15, 1e-15)]);
        assert_eq!(p.pruned(1e-12), Polynomial::new(vec![c(1.0, 0.0), ZERO, c(2.0, 0.0)]));
    }
}
