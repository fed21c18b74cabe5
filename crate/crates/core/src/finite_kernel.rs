//! Space-time correlation kernel of the noncolliding walk started from a
//! finite configuration, correlation functions as its minors, and Fredholm
//! determinants over finitely supported test functions.
//!
//! `K_ξ(s, x; t, y) = Σ_j p(s, x | u_j) M_ξ^{u_j}(t, y) - 1(s > t) p(s - t, x | y)`
//! on the parity sublattice and zero off it.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{self, Rational};
use crate::lattice_walk::{transition_prob, transition_prob_f64, SpaceTimePoint};
use crate::linalg::{det_exact, det_f64};
use crate::martingale::{martingale_family, MartingaleFunction, SiteConfiguration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A kernel value or determinant in either arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => exact::to_f64(q),
            Number::Float(v) => *v,
        }
    }

    /// `num/den` for exact values, shortest round-trip decimal otherwise.
    pub fn render(&self) -> String {
        match self {
            Number::Exact(q) => exact::format(q),
            Number::Float(v) => format!("{v}"),
        }
    }
}

/// Kernel evaluated on an ordered list of space-time points.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<V> {
    pub points: Vec<SpaceTimePoint>,
    pub values: Vec<Vec<V>>,
}

/// Points observed at one time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: u32,
    pub sites: Vec<i64>,
}

impl TimeSlice {
    pub fn new(t: u32, sites: Vec<i64>) -> Self {
        TimeSlice { t, sites }
    }
}

/// A finitely supported test function at one time, `χ_t(y)` for listed `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction<V> {
    pub t: u32,
    pub values: Vec<(i64, V)>,
}

/// `Σ_x K(t, x; t, x)` over a window, with whether the window contains
/// every site reachable from `u` in `t` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub value: Rational,
    pub complete: bool,
}

/// Kernel for one configuration, caching `M_ξ^{u_k}(t, ·)` per time.
#[derive(Debug)]
pub struct FiniteKernel {
    xi: SiteConfiguration,
    cache: RwLock<HashMap<u32, Arc<Vec<MartingaleFunction>>>>,
}

impl Clone for FiniteKernel {
    fn clone(&self) -> Self {
        FiniteKernel::new(self.xi.clone())
    }
}

impl FiniteKernel {
    pub fn new(xi: SiteConfiguration) -> Self {
        FiniteKernel { xi, cache: RwLock::new(HashMap::new()) }
    }

    pub fn configuration(&self) -> &SiteConfiguration {
        &self.xi
    }

    fn martingales(&self, t: u32) -> Arc<Vec<MartingaleFunction>> {
        if let Some(ms) = self.cache.read().expect("cache lock").get(&t) {
            return Arc::clone(ms);
        }
        let ms = Arc::new(martingale_family(&self.xi, t));
        self.cache.write().expect("cache lock").entry(t).or_insert(ms).clone()
    }

    pub fn value_exact(&self, s: u32, x: i64, t: u32, y: i64) -> Rational {
        let (p, q) = (SpaceTimePoint::new(s, x), SpaceTimePoint::new(t, y));
        if !p.is_supported() || !q.is_supported() {
            return Rational::zero();
        }
        let ms = self.martingales(t);
        let mut v = Rational::zero();
        for (&u, m) in self.xi.sites().iter().zip(ms.iter()) {
            let pr = transition_prob(s, u, x);
            if !pr.is_zero() {
                v += pr * m.eval(y);
            }
        }
        if s > t {
            v -= transition_prob(s - t, y, x);
        }
        v
    }

    pub fn value_f64(&self, s: u32, x: i64, t: u32, y: i64) -> f64 {
        let (p, q) = (SpaceTimePoint::new(s, x), SpaceTimePoint::new(t, y));
        if !p.is_supported() || !q.is_supported() {
            return 0.0;
        }
        let ms = self.martingales(t);
        let yf = y as f64;
        let mut v: f64 = self
            .xi
            .sites()
            .iter()
            .zip(ms.iter())
            .map(|(&u, m)| {
                let pr = transition_prob_f64(s, u, x);
                if pr == 0.0 {
                    0.0
                } else {
                    pr * m.eval_f64(yf)
                }
            })
            .sum();
        if s > t {
            v -= transition_prob_f64(s - t, y, x);
        }
        v
    }

    pub fn value(&self, s: u32, x: i64, t: u32, y: i64, mode: Mode) -> Number {
        match mode {
            Mode::Exact => Number::Exact(self.value_exact(s, x, t, y)),
            Mode::Float => Number::Float(self.value_f64(s, x, t, y)),
        }
    }

    /// Rows and columns follow `points`; entries are assembled in parallel.
    pub fn matrix_exact(&self, points: &[SpaceTimePoint]) -> KernelMatrix<Rational> {
        for t in unique_times(points) {
            self.martingales(t);
        }
        let values = points
            .par_iter()
            .map(|p| points.iter().map(|q| self.value_exact(p.t, p.x, q.t, q.x)).collect())
            .collect();
        KernelMatrix { points: points.to_vec(), values }
    }

    pub fn matrix_f64(&self, points: &[SpaceTimePoint]) -> KernelMatrix<f64> {
        for t in unique_times(points) {
            self.martingales(t);
        }
        let values = points
            .par_iter()
            .map(|p| points.iter().map(|q| self.value_f64(p.t, p.x, q.t, q.x)).collect())
            .collect();
        KernelMatrix { points: points.to_vec(), values }
    }

    /// `ρ_ξ` at the given slices; zero when any point is off the parity sublattice.
    pub fn correlation_exact(&self, slices: &[TimeSlice]) -> Rational {
        match correlation_points(slices) {
            Some(points) => det_exact(&self.matrix_exact(&points).values),
            None => Rational::zero(),
        }
    }

    pub fn correlation_f64(&self, slices: &[TimeSlice]) -> f64 {
        match correlation_points(slices) {
            Some(points) => det_f64(&self.matrix_f64(&points).values),
            None => 0.0,
        }
    }

    pub fn correlation(&self, slices: &[TimeSlice], mode: Mode) -> Number {
        match mode {
            Mode::Exact => Number::Exact(self.correlation_exact(slices)),
            Mode::Float => Number::Float(self.correlation_f64(slices)),
        }
    }

    /// `det(I + K χ)` over the union of the supports.
    pub fn fredholm_exact(&self, chi: &[TestFunction<Rational>]) -> Rational {
        let (points, weights) = flatten_support(chi);
        let k = self.matrix_exact(&points).values;
        let a: Vec<Vec<Rational>> = k
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .zip(&weights)
                    .enumerate()
                    .map(|(j, (kij, w))| {
                        let v = kij * w;
                        if i == j {
                            v + Rational::one()
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        det_exact(&a)
    }

    pub fn fredholm_f64(&self, chi: &[TestFunction<f64>]) -> f64 {
        let (points, weights) = flatten_support(chi);
        let k = self.matrix_f64(&points).values;
        let a: Vec<Vec<f64>> = k
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .zip(&weights)
                    .enumerate()
                    .map(|(j, (kij, w))| kij * w + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        det_f64(&a)
    }

    pub fn trace_at_time(&self, t: u32, window: RangeInclusive<i64>) -> TraceReport {
        let u = self.xi.sites();
        let reach_lo = u[0] - i64::from(t);
        let reach_hi = u[u.len() - 1] + i64::from(t);
        let complete = *window.start() <= reach_lo && *window.end() >= reach_hi;
        let value = window
            .filter(|&x| SpaceTimePoint::new(t, x).is_supported())
            .map(|x| self.value_exact(t, x, t, x))
            .sum();
        TraceReport { value, complete }
    }
}

fn unique_times(points: &[SpaceTimePoint]) -> Vec<u32> {
    let mut ts: Vec<u32> = points.iter().map(|p| p.t).collect();
    ts.sort_unstable();
    ts.dedup();
    ts
}

/// Points ordered by time block, or `None` if any violates parity.
fn correlation_points(slices: &[TimeSlice]) -> Option<Vec<SpaceTimePoint>> {
    let mut ordered: Vec<&TimeSlice> = slices.iter().collect();
    ordered.sort_by_key(|s| s.t);
    let points: Vec<SpaceTimePoint> = ordered
        .iter()
        .flat_map(|s| s.sites.iter().map(move |&x| SpaceTimePoint::new(s.t, x)))
        .collect();
    points.iter().all(SpaceTimePoint::is_supported).then_some(points)
}

fn flatten_support<V: Clone>(chi: &[TestFunction<V>]) -> (Vec<SpaceTimePoint>, Vec<V>) {
    let mut ordered: Vec<&TestFunction<V>> = chi.iter().collect();
    ordered.sort_by_key(|c| c.t);
    ordered
        .iter()
        .flat_map(|c| c.values.iter().map(move |(x, v)| (SpaceTimePoint::new(c.t, *x), v.clone())))
        .unzip()
}

pub fn kernel_value(xi: &SiteConfiguration, s: u32, x: i64, t: u32, y: i64, mode: Mode) -> Number {
    FiniteKernel::new(xi.clone()).value(s, x, t, y, mode)
}

pub fn correlation(xi: &SiteConfiguration, slices: &[TimeSlice], mode: Mode) -> Number {
    FiniteKernel::new(xi.clone()).correlation(slices, mode)
}

pub fn fredholm_gf(xi: &SiteConfiguration, chi: &[TestFunction<Rational>]) -> Rational {
    FiniteKernel::new(xi.clone()).fredholm_exact(chi)
}

pub fn trace_at_time(xi: &SiteConfiguration, t: u32, window: RangeInclusive<i64>) -> TraceReport {
    FiniteKernel::new(xi.clone()).trace_at_time(t, window)
}
