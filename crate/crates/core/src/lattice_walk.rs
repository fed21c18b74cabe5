//! Simple symmetric random walk on `Z`: exact transition probabilities, parity,
//! and exhaustive path enumeration for tiny systems.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::quad::GaussLegendre;

/// A point `(t, x)` of the space-time lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub t: u32,
    pub x: i64,
}

impl SpaceTimePoint {
    pub fn new(t: u32, x: i64) -> Self {
        SpaceTimePoint { t, x }
    }

    /// Walkers started on even sites only visit `(t, x)` with `t + x` even.
    pub fn is_supported(&self) -> bool {
        (i64::from(self.t) + self.x).rem_euclid(2) == 0
    }
}

pub fn parity_ok(t: u32, x: i64) -> bool {
    SpaceTimePoint::new(t, x).is_supported()
}

/// `p(dt, y | x)`: binom(dt, (dt + y - x)/2) / 2^dt, zero off the reachable set.
pub fn transition_prob(dt: u32, x: i64, y: i64) -> Rational {
    let d = y - x;
    let dt_i = i64::from(dt);
    if d.abs() > dt_i || (dt_i + d).rem_euclid(2) != 0 {
        return Rational::zero();
    }
    let k = ((dt_i + d) / 2) as u64;
    let num = BigInt::from(exact::binomial(u64::from(dt), k));
    Rational::new(num, BigInt::one() << dt as usize)
}

/// Floating-point `p(dt, y | x)`, via the exact value.
pub fn transition_prob_f64(dt: u32, x: i64, y: i64) -> f64 {
    exact::to_f64(&transition_prob(dt, x, y))
}

/// Default Gauss–Legendre node count for the Fourier representation.
pub const DEFAULT_TRANSITION_NODES: usize = 256;

/// `∫_0^1 cos(uπ(y-x)) cos(uπ)^dt du`, which equals `p(dt, y | x)`.
pub fn transition_prob_integral(dt: u32, x: i64, y: i64, quadrature_nodes: usize) -> f64 {
    let gl = GaussLegendre::new(quadrature_nodes);
    transition_prob_integral_with(&gl, dt, x, y)
}

pub fn transition_prob_integral_with(gl: &GaussLegendre, dt: u32, x: i64, y: i64) -> f64 {
    let d = (y - x) as f64;
    let pi = std::f64::consts::PI;
    gl.integrate(0.0, 1.0, |u| (u * pi * d).cos() * (u * pi).cos().powi(dt as i32))
}

/// Positions of `N` walkers over times `0..=T`; `walkers[j][t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathBundle {
    pub walkers: Vec<Vec<i64>>,
}

impl PathBundle {
    pub fn from_increments(start: &[i64], increments: &[Vec<i8>]) -> Self {
        let walkers = start
            .iter()
            .zip(increments)
            .map(|(&u, inc)| {
                let mut path = Vec::with_capacity(inc.len() + 1);
                let mut pos = u;
                path.push(pos);
                for &z in inc {
                    pos += i64::from(z);
                    path.push(pos);
                }
                path
            })
            .collect();
        PathBundle { walkers }
    }

    pub fn n_walkers(&self) -> usize {
        self.walkers.len()
    }

    pub fn horizon(&self) -> u32 {
        self.walkers.first().map_or(0, |w| w.len() as u32 - 1)
    }

    pub fn position(&self, j: usize, t: u32) -> i64 {
        self.walkers[j][t as usize]
    }

    /// Labeled positions at time `t`.
    pub fn at(&self, t: u32) -> Vec<i64> {
        self.walkers.iter().map(|w| w[t as usize]).collect()
    }

    /// First `t >= 1` with the labeled configuration outside the open Weyl chamber.
    pub fn exit_time(&self) -> Option<u32> {
        (1..=self.horizon()).find(|&t| {
            let c = self.at(t);
            c.windows(2).any(|w| w[0] >= w[1])
        })
    }

    pub fn survives(&self) -> bool {
        self.exit_time().is_none()
    }

    /// Whether some walker sits on `x` at time `t`.
    pub fn occupied(&self, t: u32, x: i64) -> bool {
        self.walkers.iter().any(|w| w[t as usize] == x)
    }
}

/// Default cap on `N * T` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// Exhaustive enumeration of `{-1, +1}^{N x T}` increment assignments.
#[derive(Clone, Copy, Debug)]
pub struct PathEnumerator {
    cap: u32,
}

impl Default for PathEnumerator {
    fn default() -> Self {
        PathEnumerator { cap: DEFAULT_ENUMERATION_CAP }
    }
}

impl PathEnumerator {
    pub fn with_cap(cap: u32) -> Self {
        PathEnumerator { cap }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn check(&self, n_walkers: usize, horizon: u32) -> Result<u32> {
        let requested = n_walkers as u64 * u64::from(horizon);
        if requested > u64::from(self.cap) || requested > 62 {
            return Err(Error::CapExceeded { limit: self.cap, requested });
        }
        Ok(requested as u32)
    }

    /// Every joint path from `start` over `horizon` steps, each with probability `2^{-N T}`.
    pub fn paths(&self, start: &[i64], horizon: u32) -> Result<PathIter> {
        let bits = self.check(start.len(), horizon)?;
        Ok(PathIter {
            start: start.to_vec(),
            horizon,
            next: 0,
            total: 1u64 << bits,
            prob: Rational::new(BigInt::one(), BigInt::one() << bits as usize),
        })
    }
}

pub struct PathIter {
    start: Vec<i64>,
    horizon: u32,
    next: u64,
    total: u64,
    prob: Rational,
}

impl PathIter {
    /// Probability shared by every outcome.
    pub fn outcome_probability(&self) -> &Rational {
        &self.prob
    }
}

impl Iterator for PathIter {
    type Item = (PathBundle, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.total {
            return None;
        }
        let code = self.next;
        self.next += 1;
        let t = self.horizon as usize;
        let increments: Vec<Vec<i8>> = (0..self.start.len())
            .map(|j| {
                (0..t)
                    .map(|s| if code >> (j * t + s) & 1 == 1 { 1 } else { -1 })
                    .collect()
            })
            .collect();
        Some((PathBundle::from_increments(&self.start, &increments), self.prob.clone()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for PathIter {}

pub fn enumerate_paths(start: &[i64], horizon: u32) -> Result<PathIter> {
    PathEnumerator::default().paths(start, horizon)
}
