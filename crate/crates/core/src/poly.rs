//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending degree order; the vector never carries
//! trailing zeros, so the zero polynomial is the empty vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exact::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^deg`
    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| exact::int(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> Rational {
        self.eval(&exact::int(x))
    }

    /// Horner evaluation with coefficients rounded to `f64`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + exact::to_f64(c))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(a x + b)`
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Poly {
        let lin = Poly::from_coeffs(vec![b.clone(), a.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &lin) + &Poly::constant(c.clone()))
    }

    /// `p(x + h)`
    pub fn shift(&self, h: &Rational) -> Poly {
        self.compose_affine(&Rational::one(), h)
    }

    /// Largest coefficient bit size (numerator plus denominator).
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(exact::bit_size).max().unwrap_or(0)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", exact::format(c))?,
                1 => write!(f, "({})x", exact::format(c))?,
                _ => write!(f, "({})x^{}", exact::format(c), i)?,
            }
        }
        Ok(())
    }
}

/// Truncated power series `sum c_k a^k`, `k < len`, with exact coefficients.
pub(crate) mod series {
    use super::*;

    pub fn mul(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn pow(a: &[Rational], e: u64, len: usize) -> Vec<Rational> {
        let mut result = vec![Rational::zero(); len];
        if len == 0 {
            return result;
        }
        result[0] = Rational::one();
        let mut base = a[..a.len().min(len)].to_vec();
        base.resize(len, Rational::zero());
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = mul(&result, &base, len);
            }
            e >>= 1;
            if e > 0 {
                base = mul(&base, &base, len);
            }
        }
        result
    }

    /// Reciprocal series; requires a nonzero constant term.
    pub fn inverse(a: &[Rational], len: usize) -> Vec<Rational> {
        let a0 = &a[0];
        assert!(!a0.is_zero(), "series inverse needs a nonzero constant term");
        let mut out = vec![Rational::zero(); len];
        if len == 0 {
            return out;
        }
        out[0] = a0.recip();
        for n in 1..len {
            let mut acc = Rational::zero();
            for k in 1..=n.min(a.len() - 1) {
                acc += &a[k] * &out[n - k];
            }
            out[n] = -acc / a0;
        }
        out
    }
}
