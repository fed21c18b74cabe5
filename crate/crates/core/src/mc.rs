//! The noncolliding walk realized as an `h`-transform: free walks weighted by
//! `1(τ_u > T) h(S(T))/h(u)`, sampled or enumerated exhaustively.

use std::io::{self, BufRead, Write};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::finite_kernel::TimeSlice;
use crate::lattice_walk::{PathBundle, PathEnumerator, SpaceTimePoint};
use crate::martingale::{vandermonde, SiteConfiguration};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub paths: PathBundle,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEnsemble {
    pub xi: SiteConfiguration,
    pub horizon: u32,
    pub seed: u64,
    pub streams: u32,
    pub samples: Vec<WeightedSample>,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    paths: Vec<Vec<i64>>,
    weight_num: String,
    weight_den: String,
}

/// Mean and standard error of the mean.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `1(τ_u > T) h(S(T))/h(u)` for a bundle started at `u`.
pub fn h_weight(xi: &SiteConfiguration, bundle: &PathBundle) -> Rational {
    if bundle.survives() {
        vandermonde(&bundle.at(bundle.horizon())) / vandermonde(xi.sites())
    } else {
        Rational::zero()
    }
}

/// `1(τ_u ≤ T) h(S(T))/h(u)`.
pub fn killed_weight(xi: &SiteConfiguration, bundle: &PathBundle) -> Rational {
    if bundle.survives() {
        Rational::zero()
    } else {
        vandermonde(&bundle.at(bundle.horizon())) / vandermonde(xi.sites())
    }
}

fn draw_bundle(rng: &mut ChaCha8Rng, start: &[i64], horizon: u32) -> PathBundle {
    let walkers = start
        .iter()
        .map(|&u| {
            let mut path = Vec::with_capacity(horizon as usize + 1);
            let mut pos = u;
            path.push(pos);
            let mut bits = 0u64;
            for step in 0..horizon {
                if step % 64 == 0 {
                    bits = rng.random();
                }
                pos += if bits & 1 == 1 { 1 } else { -1 };
                bits >>= 1;
                path.push(pos);
            }
            path
        })
        .collect();
    PathBundle { walkers }
}

/// Independent free-walk samples with their `h`-transform weights.
///
/// Stream `k` of `streams` is ChaCha8 keyed by `seed` on stream `k` and
/// produces the `k`-th contiguous block of samples, so the output depends on
/// `(seed, streams)` only.
pub fn sample_weighted(
    xi: &SiteConfiguration,
    horizon: u32,
    n_samples: usize,
    seed: u64,
    streams: u32,
) -> WeightedEnsemble {
    let streams = streams.max(1);
    let k = streams as usize;
    let samples = (0..k)
        .into_par_iter()
        .flat_map_iter(|s| {
            let lo = n_samples * s / k;
            let hi = n_samples * (s + 1) / k;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            (lo..hi)
                .map(|_| {
                    let paths = draw_bundle(&mut rng, xi.sites(), horizon);
                    let weight = h_weight(xi, &paths);
                    WeightedSample { paths, weight }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    WeightedEnsemble { xi: xi.clone(), horizon, seed, streams, samples }
}

fn check_slices(slices: &[TimeSlice], horizon: u32) -> Result<bool> {
    if let Some(s) = slices.iter().find(|s| s.t > horizon) {
        return Err(Error::Domain(format!("time {} exceeds horizon {horizon}", s.t)));
    }
    let parity = slices
        .iter()
        .all(|s| s.sites.iter().all(|&x| SpaceTimePoint::new(s.t, x).is_supported()));
    let distinct = slices.iter().all(|s| {
        let mut v = s.sites.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    });
    Ok(parity && distinct)
}

fn all_occupied(bundle: &PathBundle, slices: &[TimeSlice]) -> bool {
    slices.iter().all(|s| s.sites.iter().all(|&x| bundle.occupied(s.t, x)))
}

impl WeightedEnsemble {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|s| exact::to_f64(&s.weight)).collect()
    }

    pub fn mean_weight(&self) -> (f64, f64) {
        mean_and_std_error(&self.weights_f64())
    }

    /// Weighted estimate of `ρ_ξ` at the slices, with its standard error.
    pub fn estimate_correlation(&self, slices: &[TimeSlice]) -> Result<(f64, f64)> {
        if !check_slices(slices, self.horizon)? {
            return Ok((0.0, 0.0));
        }
        let values: Vec<f64> = self
            .samples
            .par_iter()
            .map(|s| {
                if all_occupied(&s.paths, slices) {
                    exact::to_f64(&s.weight)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(mean_and_std_error(&values))
    }

    /// One JSON object per sample: `{"paths", "weight_num", "weight_den"}`,
    /// with the weight as decimal strings.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for s in &self.samples {
            let rec = SampleRecord {
                paths: s.paths.walkers.clone(),
                weight_num: s.weight.numer().to_string(),
                weight_den: s.weight.denom().to_string(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads samples written by [`WeightedEnsemble::write_jsonl`].
    pub fn read_samples<R: BufRead>(input: R) -> io::Result<Vec<WeightedSample>> {
        let bad = |e: String| io::Error::new(io::ErrorKind::InvalidData, e);
        input
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|line| {
                let rec: SampleRecord = serde_json::from_str(&line?).map_err(|e| bad(e.to_string()))?;
                let num: BigInt = rec.weight_num.parse().map_err(|_| bad(rec.weight_num.clone()))?;
                let den: BigInt = rec.weight_den.parse().map_err(|_| bad(rec.weight_den.clone()))?;
                if den.is_zero() {
                    return Err(bad("zero weight denominator".into()));
                }
                Ok(WeightedSample { paths: PathBundle { walkers: rec.paths }, weight: Rational::new(num, den) })
            })
            .collect()
    }
}

pub fn estimate_correlation(ensemble: &WeightedEnsemble, slices: &[TimeSlice]) -> Result<(f64, f64)> {
    ensemble.estimate_correlation(slices)
}

/// `Σ_paths 2^{-NT} F(path) 1(τ_u > T) h(S(T))/h(u)` over every increment assignment.
pub fn exact_conditional_expectation<F>(xi: &SiteConfiguration, horizon: u32, f: F) -> Result<Rational>
where
    F: Fn(&PathBundle) -> Rational,
{
    exact_expectation_with(&PathEnumerator::default(), xi, horizon, h_weight, f)
}

/// Same sum with the complementary weight `1(τ_u ≤ T) h(S(T))/h(u)`.
///
/// Vanishes whenever `F` depends only on the unlabeled configuration: after
/// the first meeting, swapping the two walkers that met preserves `F` and
/// flips the sign of `h(S(T))`.
pub fn exact_killed_expectation<F>(xi: &SiteConfiguration, horizon: u32, f: F) -> Result<Rational>
where
    F: Fn(&PathBundle) -> Rational,
{
    exact_expectation_with(&PathEnumerator::default(), xi, horizon, killed_weight, f)
}

pub fn exact_expectation_with<F, W>(
    enumerator: &PathEnumerator,
    xi: &SiteConfiguration,
    horizon: u32,
    weight: W,
    f: F,
) -> Result<Rational>
where
    F: Fn(&PathBundle) -> Rational,
    W: Fn(&SiteConfiguration, &PathBundle) -> Rational,
{
    let mut total = Rational::zero();
    for (bundle, prob) in enumerator.paths(xi.sites(), horizon)? {
        let w = weight(xi, &bundle);
        if w.is_zero() {
            continue;
        }
        let v = f(&bundle);
        if !v.is_zero() {
            total += prob * w * v;
        }
    }
    Ok(total)
}

/// Exact `ρ_ξ` at the slices by enumeration up to `horizon`.
pub fn exact_correlation(xi: &SiteConfiguration, horizon: u32, slices: &[TimeSlice]) -> Result<Rational> {
    exact_correlation_with(&PathEnumerator::default(), xi, horizon, slices)
}

pub fn exact_correlation_with(
    enumerator: &PathEnumerator,
    xi: &SiteConfiguration,
    horizon: u32,
    slices: &[TimeSlice],
) -> Result<Rational> {
    if !check_slices(slices, horizon)? {
        return Ok(Rational::zero());
    }
    exact_expectation_with(enumerator, xi, horizon, h_weight, |b| {
        if all_occupied(b, slices) {
            exact::int(1)
        } else {
            Rational::zero()
        }
    })
}
