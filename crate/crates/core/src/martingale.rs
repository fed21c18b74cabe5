//! Lagrange polynomials `Φ_ξ^{u_k}`, the martingale functions `M_ξ^{u_k}(t, y)`
//! and the determinantal martingale `D_ξ(t, s) = det[M_ξ^{u_k}(t, s_j)]`.
//!
//! `M_ξ^{u_k}(t, ·)` is obtained by expanding `Φ_ξ^{u_k}(z) = Σ_n φ_n z^n` and
//! replacing each `z^n` with the Fujita martingale `m_n(t, ·)`. Everything is
//! exact. The exact paths are meant for `N ≤ 8` and `t ≤ 64`; for sites
//! `0, 2, …, 14` the largest coefficient stays below 30 bits over that range.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::fujita::fujita_family;
use crate::lattice_walk::PathEnumerator;
use crate::linalg::det_exact;
use crate::poly::Poly;

/// Initial sites `u_1 < … < u_N`, all even.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SiteConfiguration {
    sites: Vec<i64>,
}

impl SiteConfiguration {
    pub fn new(sites: Vec<i64>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidConfiguration("no sites given".into()));
        }
        if let Some(u) = sites.iter().find(|u| u.rem_euclid(2) != 0) {
            return Err(Error::InvalidConfiguration(format!("site {u} is odd")));
        }
        if let Some(w) = sites.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfiguration(format!(
                "sites must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(SiteConfiguration { sites })
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Sub-configuration `u_J` for increasing indices `J`.
    pub fn select(&self, indices: &[usize]) -> SiteConfiguration {
        SiteConfiguration { sites: indices.iter().map(|&j| self.sites[j]).collect() }
    }
}

impl TryFrom<Vec<i64>> for SiteConfiguration {
    type Error = Error;

    fn try_from(sites: Vec<i64>) -> Result<Self> {
        SiteConfiguration::new(sites)
    }
}

impl From<SiteConfiguration> for Vec<i64> {
    fn from(c: SiteConfiguration) -> Self {
        c.sites
    }
}

/// `M_ξ^{u_k}(t, ·)` as an exact polynomial in `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MartingaleFunction {
    pub k: usize,
    pub t: u32,
    pub poly: Poly,
}

impl MartingaleFunction {
    pub fn coeffs(&self) -> &[Rational] {
        self.poly.coeffs()
    }

    pub fn eval(&self, y: i64) -> Rational {
        self.poly.eval_i64(y)
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.poly.eval_f64(y)
    }
}

/// `Π_{j≠k} (z - u_j)/(u_k - u_j)`, `k` counted from zero.
pub fn phi_poly(xi: &SiteConfiguration, k: usize) -> Poly {
    let u = xi.sites();
    assert!(k < u.len(), "site index {k} out of range for N = {}", u.len());
    let mut p = Poly::one();
    for (j, &uj) in u.iter().enumerate() {
        if j == k {
            continue;
        }
        let denom = exact::int(u[k] - uj);
        let factor = Poly::from_coeffs(vec![exact::int(-uj) / &denom, Rational::one() / &denom]);
        p = &p * &factor;
    }
    p
}

/// Replaces `z^n` by `m_n(t, y)` in `p`.
pub fn substitute_fujita(p: &Poly, t: u32) -> Poly {
    let Some(deg) = p.degree() else {
        return Poly::zero();
    };
    let family = fujita_family(deg, t);
    family
        .iter()
        .zip(p.coeffs())
        .filter(|(_, c)| !c.is_zero())
        .fold(Poly::zero(), |acc, (m, c)| &acc + &m.scale(c))
}

pub fn martingale_fn(xi: &SiteConfiguration, k: usize, t: u32) -> MartingaleFunction {
    MartingaleFunction { k, t, poly: substitute_fujita(&phi_poly(xi, k), t) }
}

/// All `M_ξ^{u_k}(t, ·)`, `k = 0..N`, sharing one Fujita expansion.
pub fn martingale_family(xi: &SiteConfiguration, t: u32) -> Vec<MartingaleFunction> {
    let family = fujita_family(xi.len() - 1, t);
    (0..xi.len())
        .map(|k| {
            let phi = phi_poly(xi, k);
            let poly = family
                .iter()
                .zip(phi.coeffs())
                .fold(Poly::zero(), |acc, (m, c)| &acc + &m.scale(c));
            MartingaleFunction { k, t, poly }
        })
        .collect()
}

fn det_of(ms: &[MartingaleFunction], s_values: &[i64]) -> Rational {
    let matrix: Vec<Vec<Rational>> = s_values
        .iter()
        .map(|&s| ms.iter().map(|m| m.eval(s)).collect())
        .collect();
    det_exact(&matrix)
}

/// `D_ξ(t, s) = det_{j,k}[M_ξ^{u_k}(t, s_j)]`.
pub fn det_martingale(xi: &SiteConfiguration, t: u32, s_values: &[i64]) -> Result<Rational> {
    if s_values.len() != xi.len() {
        return Err(Error::Domain(format!(
            "expected {} positions, got {}",
            xi.len(),
            s_values.len()
        )));
    }
    Ok(det_of(&martingale_family(xi, t), s_values))
}

/// Vandermonde product `Π_{j<k} (x_k - x_j)`.
pub fn vandermonde(x: &[i64]) -> Rational {
    let mut h = Rational::one();
    for k in 0..x.len() {
        for j in 0..k {
            h *= exact::int(x[k] - x[j]);
        }
    }
    h
}

/// `h(x)/h(u)`.
pub fn vandermonde_ratio(u: &[i64], x: &[i64]) -> Result<Rational> {
    if u.len() != x.len() {
        return Err(Error::Domain(format!("length mismatch: {} vs {}", u.len(), x.len())));
    }
    let hu = vandermonde(u);
    if hu.is_zero() {
        return Err(Error::InvalidConfiguration("repeated entries give h(u) = 0".into()));
    }
    Ok(vandermonde(x) / hu)
}

/// Increasing index subsets of `0..n` of size `k`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < k - cur.len() {
                break;
            }
            cur.push(j);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v
}

/// Both sides of the reducibility identity for a symmetric `F` on `N'` points.
///
/// Left: `Σ_J E_u[F(S_J(t)) D_ξ(T, S(T))]` with all `N` walkers.
/// Right: `Σ_J E_{u_J}[F(S(t)) det_{a,b}[M_ξ^{u_{J_b}}(T, S_a(T))]]` with `N'` walkers.
/// `F` always receives its arguments sorted.
pub fn reducibility_check<F>(
    xi: &SiteConfiguration,
    n_prime: usize,
    t: u32,
    horizon: u32,
    f: F,
) -> Result<(Rational, Rational)>
where
    F: Fn(&[i64]) -> Rational,
{
    reducibility_check_with(&PathEnumerator::default(), xi, n_prime, t, horizon, f)
}

pub fn reducibility_check_with<F>(
    enumerator: &PathEnumerator,
    xi: &SiteConfiguration,
    n_prime: usize,
    t: u32,
    horizon: u32,
    f: F,
) -> Result<(Rational, Rational)>
where
    F: Fn(&[i64]) -> Rational,
{
    let n = xi.len();
    if n_prime == 0 || n_prime >= n {
        return Err(Error::Domain(format!("need 1 ≤ N' < N, got N' = {n_prime}, N = {n}")));
    }
    if t > horizon {
        return Err(Error::Domain(format!("observation time {t} exceeds horizon {horizon}")));
    }
    enumerator.check(n, horizon)?;
    let ms = martingale_family(xi, horizon);
    let js = subsets(n, n_prime);

    let mut lhs = Rational::zero();
    for (bundle, prob) in enumerator.paths(xi.sites(), horizon)? {
        let d = det_of(&ms, &bundle.at(horizon));
        if d.is_zero() {
            continue;
        }
        let at_t = bundle.at(t);
        let fsum: Rational = js
            .iter()
            .map(|j| f(&sorted(j.iter().map(|&a| at_t[a]).collect())))
            .sum();
        lhs += prob * d * fsum;
    }

    let mut rhs = Rational::zero();
    for j in &js {
        let sub = xi.select(j);
        let cols: Vec<MartingaleFunction> = j.iter().map(|&b| ms[b].clone()).collect();
        for (bundle, prob) in enumerator.paths(sub.sites(), horizon)? {
            let d = det_of(&cols, &bundle.at(horizon));
            if d.is_zero() {
                continue;
            }
            rhs += prob * d * f(&sorted(bundle.at(t)));
        }
    }
    Ok((lhs, rhs))
}

/// Largest coefficient size, in bits, over `M_ξ^{u_k}(t, ·)` for all `k`.
pub fn coefficient_bits(xi: &SiteConfiguration, t: u32) -> u64 {
    martingale_family(xi, t).iter().map(|m| m.poly.max_bits()).max().unwrap_or(0)
}
