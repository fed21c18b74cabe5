//! Fujita's monic polynomial martingales `m_n(t, x)` of the simple symmetric walk.
//!
//! `e^{αx} (cosh α)^{-t} = Σ_n m_n(t, x) α^n / n!`, so the coefficient of
//! `x^{n-k}` in `m_n(t, ·)` is `n!/(n-k)!` times the `α^k` coefficient of
//! `(cosh α)^{-t}`. That series is obtained exactly by raising the cosh series
//! to the power `t` and inverting.

use num_bigint::BigInt;
use num_traits::{Num, One, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::poly::{series, Poly};

/// `m_n(t, ·)` at a fixed time, coefficients in ascending powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MartingalePolynomial {
    pub n: usize,
    pub t: u32,
    pub poly: Poly,
}

impl MartingalePolynomial {
    pub fn coeffs(&self) -> &[Rational] {
        self.poly.coeffs()
    }

    pub fn eval(&self, x: i64) -> Rational {
        self.poly.eval_i64(x)
    }
}

fn exp_series(len: usize) -> Vec<Rational> {
    (0..len)
        .map(|k| Rational::new(BigInt::one(), BigInt::from(exact::factorial(k as u64))))
        .collect()
}

fn cosh_series(len: usize) -> Vec<Rational> {
    exp_series(len)
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { c } else { Rational::zero() })
        .collect()
}

/// Coefficients of `(cosh α)^{-t}` up to `α^{len-1}`.
fn sech_power_series(t: u32, len: usize) -> Vec<Rational> {
    let cosh_t = series::pow(&cosh_series(len), u64::from(t), len);
    series::inverse(&cosh_t, len)
}

/// Builds `n! Σ_k c_k x^{n-k} / (n-k)!` from an exponential-generating prefactor.
fn appell_from_series(prefactor: &[Rational], n: usize) -> Poly {
    let n_fact = exact::factorial(n as u64);
    let mut coeffs = vec![Rational::zero(); n + 1];
    for (k, c) in prefactor.iter().enumerate().take(n + 1) {
        let ratio = BigInt::from(n_fact.clone() / exact::factorial((n - k) as u64));
        coeffs[n - k] = c * Rational::from_integer(ratio);
    }
    Poly::from_coeffs(coeffs)
}

pub fn fujita_poly(n: usize, t: u32) -> MartingalePolynomial {
    let pref = sech_power_series(t, n + 1);
    MartingalePolynomial { n, t, poly: appell_from_series(&pref, n) }
}

/// `m_0(t,·), …, m_{max_n}(t,·)` sharing one series expansion.
pub fn fujita_family(max_n: usize, t: u32) -> Vec<Poly> {
    let pref = sech_power_series(t, max_n + 1);
    (0..=max_n).map(|n| appell_from_series(&pref, n)).collect()
}

/// `m_n(t, x) == ½[m_n(t+1, x+1) + m_n(t+1, x-1)]` as polynomials.
pub fn check_recurrence(n: usize, t: u32) -> bool {
    let now = fujita_poly(n, t).poly;
    let next = fujita_poly(n, t + 1).poly;
    let avg = (&next.shift(&exact::int(1)) + &next.shift(&exact::int(-1))).scale(&exact::ratio(1, 2));
    avg == now
}

/// Monic Euler polynomial `E_n^{(λ)}` from `(2/(1+e^α))^λ e^{αx}`.
pub fn euler_poly(n: usize, lambda: u32) -> Poly {
    let len = n + 1;
    // (1 + e^α)/2 = 1 + Σ_{k≥1} α^k / (2 k!)
    let half_sum: Vec<Rational> = exp_series(len)
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { c } else { c / exact::int(2) })
        .collect();
    let pref = series::inverse(&series::pow(&half_sum, u64::from(lambda), len), len);
    appell_from_series(&pref, n)
}

/// `2^n E_n^{(t)}((t + x)/2)`, which reproduces `m_n(t, x)`.
pub fn fujita_via_euler(n: usize, t: u32) -> Poly {
    let e = euler_poly(n, t);
    let half = exact::ratio(1, 2);
    let shift = exact::ratio(i64::from(t), 2);
    e.compose_affine(&half, &shift)
        .scale(&Rational::from_integer(BigInt::one() << n))
}

/// Esscher transform `G_α(t, x) = e^{αx} / (cosh α)^t`.
pub fn esscher(alpha: f64, t: u32, x: i64) -> f64 {
    (alpha * x as f64).exp() / alpha.cosh().powi(t as i32)
}

/// A function tabulated on `{0..=t_max} × {x_min..=x_max}`.
#[derive(Clone, Debug)]
pub struct TabulatedFn<V> {
    t_max: u32,
    x_min: i64,
    x_max: i64,
    values: Vec<V>,
}

impl<V: Clone> TabulatedFn<V> {
    pub fn from_fn<F: Fn(u32, i64) -> V>(t_max: u32, x_min: i64, x_max: i64, f: F) -> Self {
        assert!(x_min <= x_max);
        let mut values = Vec::new();
        for t in 0..=t_max {
            for x in x_min..=x_max {
                values.push(f(t, x));
            }
        }
        TabulatedFn { t_max, x_min, x_max, values }
    }

    pub fn get(&self, t: u32, x: i64) -> Option<&V> {
        if t > self.t_max || x < self.x_min || x > self.x_max {
            return None;
        }
        let width = (self.x_max - self.x_min + 1) as usize;
        Some(&self.values[t as usize * width + (x - self.x_min) as usize])
    }
}

/// Per-step terms of the discrete Itô formula.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoTerms<V> {
    /// `½[f(t+1,S+1) - f(t+1,S-1)] ζ(t+1)`
    pub martingale: Vec<V>,
    /// `½[f(t+1,S+1) - 2f(t+1,S) + f(t+1,S-1)]`
    pub laplacian: Vec<V>,
    /// `f(t+1,S) - f(t,S)`
    pub time: Vec<V>,
    /// `f(t+1,S(t+1)) - f(t,S(t))`
    pub increments: Vec<V>,
}

impl<V: Num + Clone> ItoTerms<V> {
    /// Sum of all three terms over all steps.
    pub fn total(&self) -> V {
        let mut acc = V::zero();
        for i in 0..self.martingale.len() {
            acc = acc + self.martingale[i].clone() + self.laplacian[i].clone() + self.time[i].clone();
        }
        acc
    }

    pub fn total_increment(&self) -> V {
        self.increments.iter().cloned().fold(V::zero(), |a, b| a + b)
    }
}

/// Splits each step of `f(t, S(t))` along `path` into its three Itô terms.
pub fn discrete_ito_decompose<V: Num + Clone>(f: &TabulatedFn<V>, path: &[i64]) -> Result<ItoTerms<V>> {
    let lookup = |t: u32, x: i64| {
        f.get(t, x).cloned().ok_or_else(|| {
            Error::Domain(format!("path leaves the tabulated range at (t={t}, x={x})"))
        })
    };
    let two = V::one() + V::one();
    let mut out = ItoTerms { martingale: vec![], laplacian: vec![], time: vec![], increments: vec![] };
    for (t, w) in path.windows(2).enumerate() {
        let t = t as u32;
        let (s, s_next) = (w[0], w[1]);
        let zeta = s_next - s;
        if zeta.abs() != 1 {
            return Err(Error::Domain(format!("step {t} has increment {zeta}, expected ±1")));
        }
        let up = lookup(t + 1, s + 1)?;
        let down = lookup(t + 1, s - 1)?;
        let mid = lookup(t + 1, s)?;
        let now = lookup(t, s)?;
        let z = if zeta == 1 { V::one() } else { V::zero() - V::one() };
        out.martingale.push((up.clone() - down.clone()) / two.clone() * z);
        out.laplacian.push((up.clone() - two.clone() * mid.clone() + down.clone()) / two.clone());
        out.time.push(mid - now.clone());
        out.increments.push(lookup(t + 1, s_next)? - now);
    }
    Ok(out)
}
