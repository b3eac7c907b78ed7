// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Rational functions of the Laplace variable and their exact inversion into
//! exponential-polynomial time functions via the residue theorem.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};
use crate::poly::{merge_roots, Polynomial, ROOT_MERGE_TOLERANCE};

/// Coefficients below this multiple of a polynomial's largest coefficient are
/// dropped during canonicalization.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Relative size of `|N(r)|` at a denominator root `r` below which the factor
/// `(s - r)` is cancelled.
const CANCEL_TOLERANCE: f64 = 1e-9;

/// `N(s)/D(s)` in canonical form: pruned coefficients, common roots
/// cancelled, monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        let den = den.pruned(PRUNE_TOLERANCE);
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut num = num.pruned(PRUNE_TOLERANCE);
        let mut den = den;
        if num.is_zero() {
            return Ok(Self { num, den: Polynomial::constant(ONE) });
        }
        for (root, mult) in merge_roots(&den.roots()?, ROOT_MERGE_TOLERANCE) {
            for _ in 0..mult {
                if num.degree().unwrap_or(0) == 0 {
                    break;
                }
                let scale: f64 = num
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm() * root.norm().powi(k as i32))
                    .sum();
                if num.eval(root).norm() > CANCEL_TOLERANCE * scale {
                    break;
                }
                let factor = Polynomial::new(vec![-root, ONE]);
                num = num.div_rem(&factor)?.0;
                den = den.div_rem(&factor)?.0;
            }
        }
        let lead = den.leading();
        // Exact division keeps an already monic denominator unchanged.
        let monic = |p: &Polynomial| Polynomial::new(p.coeffs().iter().map(|c| c / lead).collect());
        Ok(Self { num: monic(&num), den: monic(&den) })
    }

    pub fn constant(c: Complex64) -> Self {
        Self { num: Polynomial::constant(c), den: Polynomial::constant(ONE) }
    }

    /// `Σ_k c_k / (s - p_k)`.
    pub fn from_partial_fractions(poles: &[Complex64], residues: &[Complex64]) -> Result<Self> {
        if poles.len() != residues.len() {
            return Err(Error::DimensionMismatch("poles and residues differ in length".into()));
        }
        let den = Polynomial::from_roots(poles);
        let mut num = Polynomial::zero();
        for (k, &c) in residues.iter().enumerate() {
            let others: Vec<Complex64> =
                poles.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &p)| p).collect();
            num = &num + &Polynomial::from_roots(&others).scale(c);
        }
        Self::new(num, den)
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_strictly_proper(&self) -> bool {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => true,
            (Some(n), Some(d)) => n < d,
            _ => false,
        }
    }

    /// `s ↦ f(s - shift)`.
    pub fn shift(&self, shift: Complex64) -> Result<Self> {
        Self::new(self.num.shifted(shift), self.den.shifted(shift))
    }

    pub fn conj(&self) -> Self {
        Self { num: self.num.conj(), den: self.den.conj() }
    }

    /// Largest imaginary part among coefficients relative to the largest
    /// coefficient magnitude.
    pub fn imaginary_content(&self) -> f64 {
        let scale = self.num.max_abs_coeff().max(self.den.max_abs_coeff());
        let im = self
            .num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .fold(0.0f64, |m, c| m.max(c.im.abs()));
        if scale == 0.0 {
            0.0
        } else {
            im / scale
        }
    }

    /// Same function with imaginary coefficient parts discarded.
    pub fn real_part(&self) -> Result<Self> {
        let re = |p: &Polynomial| Polynomial::new(p.coeffs().iter().map(|c| Complex64::new(c.re, 0.0)).collect());
        Self::new(re(&self.num), re(&self.den))
    }

    /// Merged denominator roots `(pole, order)`.
    pub fn poles(&self) -> Result<Vec<(Complex64, usize)>> {
        Ok(merge_roots(&self.den.roots()?, ROOT_MERGE_TOLERANCE))
    }

    /// Exact inverse Laplace transform of a strictly proper function.
    pub fn inverse_laplace(&self) -> Result<PoleResidueFn> {
        if !self.is_strictly_proper() {
            return Err(Error::InvalidArgument(
                "inverse Laplace transform requires a strictly proper function".into(),
            ));
        }
        if self.num.is_zero() {
            return Ok(PoleResidueFn { terms: Vec::new(), real: true });
        }
        let poles = self.poles()?;
        residue_expansion(&self.num, self.den.leading(), &poles)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

/// One pole's contribution `e^{p t} Σ_j c_j t^j` to an inverse transform.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    /// Polynomial-in-`t` coefficients; the pole order is `coeffs.len()`.
    pub coeffs: Vec<Complex64>,
}

impl PoleTerm {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

/// `F(t) = Σ_k Res[e^{st} f(s), p_k]` stored as exponential polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleResidueFn {
    terms: Vec<PoleTerm>,
    real: bool,
}

impl PoleResidueFn {
    pub fn from_terms(terms: Vec<PoleTerm>) -> Self {
        Self { terms, real: false }
    }

    /// The constant function 1 (a simple pole at the origin).
    pub fn unit() -> Self {
        Self { terms: vec![PoleTerm { pole: ZERO, coeffs: vec![ONE] }], real: true }
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn poles(&self) -> Vec<(Complex64, usize)> {
        self.terms.iter().map(|t| (t.pole, t.order())).collect()
    }

    /// Marks the function as real-valued; evaluation then drops the
    /// (round-off) imaginary part.
    pub fn into_real(mut self) -> Self {
        self.real = true;
        self
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    pole: t.pole.conj(),
                    coeffs: t.coeffs.iter().map(|c| c.conj()).collect(),
                })
                .collect(),
            real: self.real,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let v = self.eval_raw(t);
        if self.real {
            Complex64::new(v.re, 0.0)
        } else {
            v
        }
    }

    /// Evaluation without discarding the imaginary part.
    pub fn eval_raw(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| {
                let poly = term.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * t + c);
                (term.pole * t).exp() * poly
            })
            .sum()
    }

    /// Exact time derivative.
    pub fn derivative(&self, t: f64) -> Complex64 {
        let v: Complex64 = self
            .terms
            .iter()
            .map(|term| {
                let poly = term.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * t + c);
                let dpoly = term
                    .coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(ZERO, |acc, (j, &c)| acc * t + c * j as f64);
                (term.pole * t).exp() * (term.pole * poly + dpoly)
            })
            .sum();
        if self.real {
            Complex64::new(v.re, 0.0)
        } else {
            v
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Residues of `e^{st} N(s) / (lead · Π (s - p_k)^{m_k})` at every pole.
///
/// For a pole `p` of order `m`, with `h(s) = (s - p)^m N(s)/D(s)` expanded as
/// `Σ_r h_r (s - p)^r`, the residue is `e^{pt} Σ_{j<m} h_{m-1-j} t^j / j!`.
pub(crate) fn residue_expansion(
    num: &Polynomial,
    lead: Complex64,
    poles: &[(Complex64, usize)],
) -> Result<PoleResidueFn> {
    let mut terms = Vec::with_capacity(poles.len());
    for (k, &(p, m)) in poles.iter().enumerate() {
        let n_series = num.taylor_at(p, m);
        let mut d_series = vec![ZERO; m];
        d_series[0] = lead;
        for (j, &(q, mj)) in poles.iter().enumerate() {
            if j == k {
                continue;
            }
            let delta = p - q;
            for _ in 0..mj {
                // Multiply the truncated series by (delta + u).
                for r in (0..m).rev() {
                    let lower = if r > 0 { d_series[r - 1] } else { ZERO };
                    d_series[r] = d_series[r] * delta + lower;
                }
            }
        }
        if d_series[0].norm() == 0.0 || !d_series[0].norm().is_finite() {
            return Err(Error::IllConditionedPoles(format!("coincident poles near {p}")));
        }
        let mut h = vec![ZERO; m];
        for r in 0..m {
            let mut acc = n_series[r];
            for i in 1..=r {
                acc -= d_series[i] * h[r - i];
            }
            h[r] = acc / d_series[0];
        }
        let coeffs: Vec<Complex64> = (0..m).map(|j| h[m - 1 - j] / factorial(j)).collect();
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::IllConditionedPoles(format!("non-finite residue at {p}")));
        }
        terms.push(PoleTerm { pole: p, coeffs });
    }
    Ok(PoleResidueFn { terms, real: false })
}
