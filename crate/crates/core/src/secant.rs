//! The hyperbolic secant law and the walk `S̃(t)` with i.i.d. secant increments.
//!
//! Its characteristic function `1/cosh α` is the reciprocal of the Laplace
//! transform `cosh α` of a ±1 step, which is what makes `S + iS̃` turn
//! monomials into martingale polynomials.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::{ln_gamma, ln_gamma_real};

/// `1 / (2 cosh(πx/2))`
pub fn secant_density(x: f64) -> f64 {
    0.5 / (FRAC_PI_2 * x).cosh()
}

/// `(2/π) arctan(e^{πx/2})`
pub fn secant_cdf(x: f64) -> f64 {
    (FRAC_PI_2 * x).exp().atan() / FRAC_PI_2
}

pub fn secant_cdf_inverse(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("quantile {q} outside (0, 1)")));
    }
    let centered = q - 0.5;
    let x = if centered.abs() <= 0.25 {
        // ln tan(π/4 + θ/2) = atanh(sin θ), exact zero and odd symmetry at the center
        (PI * centered).sin().atanh()
    } else if centered < 0.0 {
        (FRAC_PI_2 * q).tan().ln()
    } else {
        -(FRAC_PI_2 * (1.0 - q)).tan().ln()
    };
    Ok(x / FRAC_PI_2)
}

/// Density of `S̃(t)`: `2^{t-2} / (π Γ(t)) |Γ(t/2 + ix/2)|²`.
pub fn gh_secant_density(t: u32, x: f64) -> f64 {
    assert!(t >= 1, "the t-step law is a point mass at t = 0");
    let tf = f64::from(t);
    let lg = ln_gamma(Complex64::new(0.5 * tf, 0.5 * x));
    ((tf - 2.0) * LN_2 - PI.ln() - ln_gamma_real(tf) + 2.0 * lg.re).exp()
}

/// Half-width beyond which the `t`-step density is negligible (below ~1e-15 mass).
pub fn truncation_radius(t: u32) -> f64 {
    40.0 + 3.0 * f64::from(t)
}

fn integrate_against_density<F: Fn(f64) -> f64>(t: u32, radius: f64, f: F) -> f64 {
    let gl = GaussLegendre::new(16);
    let panels = (2.0 * radius).ceil() as usize;
    gl.integrate_composite(-radius, radius, panels, |x| f(x) * gh_secant_density(t, x))
}

/// Mass of the `t`-step density on `[-R, R]`, `R = truncation_radius(t)`.
pub fn gh_secant_mass(t: u32) -> f64 {
    integrate_against_density(t, truncation_radius(t), |_| 1.0)
}

/// `(∫ e^{iαx} p̃(t, x) dx, (cosh α)^{-t})`; the density is even so only the
/// cosine part survives.
pub fn characteristic_check(t: u32, alpha: f64) -> (f64, f64) {
    let numeric = integrate_against_density(t, truncation_radius(t), |x| (alpha * x).cos());
    (numeric, alpha.cosh().powi(-(t as i32)))
}

/// `(∫ e^{-λx} p̃(t, x) dx, (cos λ)^{-t})` for `|λ| < π/2`.
pub fn laplace_check(t: u32, lambda: f64) -> Result<(f64, f64)> {
    if lambda.abs() >= FRAC_PI_2 {
        return Err(Error::Domain(format!("|λ| = {} must be below π/2", lambda.abs())));
    }
    // tail decays like x^{t-1} e^{-(π/2 - |λ|) x}
    let rate = FRAC_PI_2 - lambda.abs();
    let radius = (80.0 + 4.0 * f64::from(t)) / rate;
    let numeric = integrate_against_density(t, radius, |x| (-lambda * x).exp());
    Ok((numeric, lambda.cos().powi(-(t as i32))))
}

/// Reproducible stream of secant increments: ChaCha8 keyed by `seed`, on stream `stream_id`.
#[derive(Clone, Debug)]
pub struct SecantSampler {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SecantSampler {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        SecantSampler { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn increment(&mut self) -> f64 {
        let q: f64 = self.rng.sample(Open01);
        secant_cdf_inverse(q).expect("Open01 stays inside (0, 1)")
    }

    /// `S̃(0), …, S̃(t)` with `S̃(0) = 0`.
    pub fn sample_path(&mut self, t: u32) -> Vec<f64> {
        let mut path = Vec::with_capacity(t as usize + 1);
        let mut pos = 0.0;
        path.push(pos);
        for _ in 0..t {
            pos += self.increment();
            path.push(pos);
        }
        path
    }
}

pub fn sample_path(sampler: &mut SecantSampler, t: u32) -> Vec<f64> {
    sampler.sample_path(t)
}
