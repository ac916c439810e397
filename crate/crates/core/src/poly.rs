//! Sparse polynomials with right-hand quaternion coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// One monomial `q^exp · coeff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub exp: u32,
    pub coeff: Quaternion,
}

/// `p(q) = Σ q^{n_ν} a_{n_ν}` stored as `(n_ν, a_ν)` pairs with strictly
/// increasing exponents and nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseQPolynomial {
    terms: Vec<Term>,
}

/// Relative magnitude under which a convolution coefficient is treated as an
/// exact cancellation and dropped from the support.
const STAR_DROP: f64 = 1e-15;
/// Admissible imaginary residue of `p ⋆ pᶜ`, relative to `(Σ|a_ν|)²`.
const NORMAL_IMAG_RESIDUE: f64 = 1e-12;

impl SparseQPolynomial {
    /// Builds a polynomial from `(exponent, coefficient)` pairs.
    ///
    /// Exponents must be strictly increasing. Zero coefficients below the
    /// leading term are dropped; a zero (or empty) leading term is an error.
    pub fn new(terms: impl IntoIterator<Item = (u32, Quaternion)>) -> Result<Self> {
        let mut out: Vec<Term> = Vec::new();
        let mut last: Option<u32> = None;
        let mut leading = Quaternion::ZERO;
        for (exp, coeff) in terms {
            if let Some(prev) = last {
                if exp <= prev {
                    return Err(Error::Parse(format!(
                        "exponents must be strictly increasing (saw {exp} after {prev})"
                    )));
                }
            }
            if !coeff.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient at exponent {exp}")));
            }
            last = Some(exp);
            leading = coeff;
            if coeff != Quaternion::ZERO {
                out.push(Term { exp, coeff });
            }
        }
        if last.is_none() {
            return Err(Error::Parse("polynomial has no terms".into()));
        }
        if leading == Quaternion::ZERO {
            return Err(Error::Parse("leading coefficient is zero".into()));
        }
        Ok(Self { terms: out })
    }

    /// Builds a polynomial from a dense coefficient list (index = exponent),
    /// trimming trailing zeros.
    pub fn from_dense(coeffs: &[Quaternion]) -> Result<Self> {
        let top = coeffs
            .iter()
            .rposition(|c| *c != Quaternion::ZERO)
            .ok_or_else(|| Error::Parse("zero polynomial".into()))?;
        Self::new(
            coeffs[..=top]
                .iter()
                .enumerate()
                .map(|(e, c)| (e as u32, *c)),
        )
    }

    /// Real-coefficient polynomial from a dense list.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        let q: Vec<Quaternion> = coeffs.iter().map(|&c| Quaternion::real(c)).collect();
        Self::from_dense(&q)
    }

    /// `q^exp · coeff`.
    pub fn monomial(exp: u32, coeff: Quaternion) -> Result<Self> {
        Self::new([(exp, coeff)])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.last().map(|t| t.exp).unwrap_or(0)
    }

    pub fn leading(&self) -> Quaternion {
        self.terms.last().map(|t| t.coeff).unwrap_or(Quaternion::ZERO)
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().map(|t| t.exp)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = Quaternion> + '_ {
        self.terms.iter().map(|t| t.coeff)
    }

    /// Coefficient of `q^exp`, zero when absent.
    pub fn coeff(&self, exp: u32) -> Quaternion {
        self.terms
            .binary_search_by_key(&exp, |t| t.exp)
            .map(|i| self.terms[i].coeff)
            .unwrap_or(Quaternion::ZERO)
    }

    /// `Σ|a_ν|`.
    pub fn coeff_norm_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// True when every exponent `0..=n` carries a term.
    pub fn is_dense(&self) -> bool {
        self.terms.len() == self.degree() as usize + 1
    }

    pub fn to_dense(&self) -> Vec<Quaternion> {
        let mut out = vec![Quaternion::ZERO; self.degree() as usize + 1];
        for t in &self.terms {
            out[t.exp as usize] = t.coeff;
        }
        out
    }

    /// `Σ q^{n_ν} a_{n_ν}`, powers multiplied on the left of each coefficient.
    pub fn evaluate(&self, q: Quaternion) -> Quaternion {
        let mut power = Quaternion::ONE;
        let mut at = 0u32;
        let mut sum = Quaternion::ZERO;
        for t in &self.terms {
            while at < t.exp {
                power = power * q;
                at += 1;
            }
            sum += power * t.coeff;
        }
        sum
    }

    /// Regular (⋆) product: coefficient convolution `c_ν = Σ a_μ b_{ν−μ}`
    /// with the left factor's coefficients on the left.
    pub fn star(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<u32, Quaternion> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                *acc.entry(a.exp + b.exp).or_default() += a.coeff * b.coeff;
            }
        }
        let cutoff = STAR_DROP * self.coeff_norm_sum() * other.coeff_norm_sum();
        let top = self.degree() + other.degree();
        let terms = acc
            .into_iter()
            .filter(|(e, c)| *e == top || c.norm() > cutoff)
            .map(|(exp, coeff)| Term { exp, coeff })
            .collect();
        Self { terms }
    }

    /// Termwise coefficient conjugate `pᶜ`.
    pub fn conjugate(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term { exp: t.exp, coeff: t.coeff.conj() })
                .collect(),
        }
    }

    /// Right multiplication of every coefficient by `lambda`.
    pub fn scale_right(&self, lambda: Quaternion) -> Result<Self> {
        Self::new(self.terms.iter().map(|t| (t.exp, t.coeff * lambda)))
    }

    /// Normal polynomial `N(p) = p ⋆ pᶜ`, whose coefficients are real.
    pub fn normal(&self) -> Result<RealPolynomial> {
        if self.degree() == 0 {
            return Err(Error::domain("normal polynomial needs degree >= 1"));
        }
        let n = self.degree() as usize;
        let mut c = vec![Quaternion::ZERO; 2 * n + 1];
        for a in &self.terms {
            for b in &self.terms {
                c[(a.exp + b.exp) as usize] += a.coeff * b.coeff.conj();
            }
        }
        let scale = self.coeff_norm_sum().powi(2);
        let residue = c.iter().map(|x| x.im().norm()).fold(0.0, f64::max);
        if residue > NORMAL_IMAG_RESIDUE * scale {
            return Err(Error::Numerical(format!(
                "normal polynomial has imaginary residue {residue:e} (scale {scale:e})"
            )));
        }
        RealPolynomial::new(c.into_iter().map(|x| x.re()).collect())
    }

    /// `ξ = p ⋆ (1 − q)`, whose zeros are those of `p` together with `q = 1`.
    pub fn xi(&self) -> Self {
        let one_minus_q = Self {
            terms: vec![
                Term { exp: 0, coeff: Quaternion::ONE },
                Term { exp: 1, coeff: -Quaternion::ONE },
            ],
        };
        self.star(&one_minus_q)
    }

    /// Divides by the real quadratic `q² − s·q + t`.
    ///
    /// The divisor has real coefficients, so it commutes with everything and
    /// ordinary long division applies. Returns the quotient together with the
    /// remainder `(r₁, r₀)` representing `q·r₁ + r₀`.
    pub fn div_real_quadratic(&self, s: f64, t: f64) -> Result<(Self, Quaternion, Quaternion)> {
        if self.degree() < 2 {
            return Err(Error::domain("division by a quadratic needs degree >= 2"));
        }
        let mut rem = self.to_dense();
        let n = rem.len() - 1;
        let mut quot = vec![Quaternion::ZERO; n - 1];
        for k in (2..=n).rev() {
            let lead = rem[k];
            quot[k - 2] = lead;
            rem[k] = Quaternion::ZERO;
            rem[k - 1] += lead.scale(s);
            rem[k - 2] += lead.scale(-t);
        }
        Ok((Self::from_dense(&quot)?, rem[1], rem[0]))
    }
}

/// Dense real polynomial, index = exponent, leading coefficient nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::domain("zero polynomial"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite polynomial coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Σ|c_i| r^i`, the scale of rounding errors when evaluating at `|z| = r`.
    pub fn eval_abs(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    /// Derivative; the derivative of a constant is reported as `None`.
    pub fn derivative(&self) -> Option<Self> {
        if self.degree() == 0 {
            return None;
        }
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self::new(d).ok()
    }

    /// Product with another real polynomial.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }
}
