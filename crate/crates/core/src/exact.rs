//! Helpers around arbitrary-precision rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest `f64`, robust to numerators and denominators beyond the `f64` range.
pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale both sides down by their bit lengths before dividing.
    let n = q.numer();
    let d = q.denom();
    let shift_n = n.bits().saturating_sub(900);
    let shift_d = d.bits().saturating_sub(900);
    let nf = (n >> shift_n).to_f64().unwrap_or(0.0);
    let df = (d >> shift_d).to_f64().unwrap_or(1.0);
    nf / df * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// Serializes as `"num/den"`, or `"num"` for integers.
pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"num/den"` or an integer string.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Total bit size of numerator and denominator.
pub fn bit_size(q: &Rational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        let q = ratio(-6, 4);
        assert_eq!(format(&q), "-3/2");
        assert_eq!(parse("-3/2"), Some(q));
        assert_eq!(format(&int(5)), "5");
        assert_eq!(parse("5"), Some(int(5)));
        assert_eq!(parse("1/0"), None);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2001usize);
        assert!((to_f64(&big) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(4, 5), BigUint::zero());
        assert_eq!(binomial(30, 15), BigUint::from(155117520u64));
    }
}
