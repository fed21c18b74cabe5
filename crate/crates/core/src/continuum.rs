//! Dyson-model kernels reached by diffusive scaling of the walk, and gaps
//! measuring how close the scaled discrete objects are at finite `n`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::infinite::EquidistantConfig;
use crate::lattice_walk::transition_prob;
use crate::martingale::{martingale_family, phi_poly, SiteConfiguration};
use crate::poly::Poly;
use crate::quad::GaussLegendre;

/// Gaussian tails are cut at this many standard deviations (mass below 1e-15).
pub const GAUSSIAN_CUTOFF_SIGMAS: f64 = 8.0;

pub fn bm_density(t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Brownian density needs t > 0, got {t}")));
    }
    let d = y - x;
    Ok((-d * d / (2.0 * t)).exp() / (2.0 * PI * t).sqrt())
}

fn bm(t: f64, d: f64) -> f64 {
    (-d * d / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// `Σ_j (-1)^j n!/(j!(n-2j)!) x^{n-2j} (t/2)^j`, which is `(t/2)^{n/2} H_n(x/√(2t))`.
pub fn hermite_martingale(n: usize, t: f64, x: f64) -> f64 {
    let mut coef = 1.0;
    let mut total = 0.0;
    for j in 0..=n / 2 {
        if j > 0 {
            // n!/(j!(n-2j)!) from the previous term
            coef *= ((n - 2 * j + 2) * (n - 2 * j + 1)) as f64 / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * coef * x.powi((n - 2 * j) as i32) * (0.5 * t).powi(j as i32);
    }
    total
}

/// `m_n^BM(t, ·)` as an exact polynomial for rational `t`.
pub fn hermite_martingale_poly(n: usize, t: &Rational) -> Poly {
    let half_t = t / exact::int(2);
    let mut coeffs = vec![Rational::zero(); n + 1];
    let n_fact = exact::factorial(n as u64);
    let mut power = Rational::one();
    for j in 0..=n / 2 {
        let denom = exact::factorial(j as u64) * exact::factorial((n - 2 * j) as u64);
        let c = Rational::new(BigInt::from(n_fact.clone()), BigInt::from(denom)) * &power;
        coeffs[n - 2 * j] = if j % 2 == 0 { c } else { -c };
        power *= &half_t;
    }
    Poly::from_coeffs(coeffs)
}

/// `sfM_ξ^{u_k}(t, ·)`: `Φ_ξ^{u_k}` with `z^n ↦ m_n^BM(t, ·)`, exact for rational `t`.
pub fn sfm_poly(xi: &SiteConfiguration, k: usize, t: &Rational) -> Poly {
    let phi = phi_poly(xi, k);
    phi.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(Poly::zero(), |acc, (n, c)| &acc + &hermite_martingale_poly(n, t).scale(c))
}

/// `sfM_ξ^{u_k}(t, y)` for all `k`.
pub fn sfm_family(xi: &SiteConfiguration, t: f64) -> Vec<Poly> {
    let tq = Rational::from_float(t).expect("finite time");
    (0..xi.len()).map(|k| sfm_poly(xi, k, &tq)).collect()
}

pub fn sfm(xi: &SiteConfiguration, k: usize, t: f64, y: f64) -> f64 {
    let tq = Rational::from_float(t).expect("finite time");
    sfm_poly(xi, k, &tq).eval_f64(y)
}

fn check_times(s: f64, t: f64) -> Result<()> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("continuum kernels need s, t > 0, got s = {s}, t = {t}")));
    }
    Ok(())
}

/// Dyson kernel from `N` points: `Σ_j p^BM(s, x | u_j) sfM^{u_j}(t, y) - 1(s > t) p^BM(s - t, x | y)`.
pub fn dyson_kernel_finite(xi: &SiteConfiguration, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    check_times(s, t)?;
    let ms = sfm_family(xi, t);
    Ok(dyson_finite_with(xi, &ms, s, x, t, y))
}

fn dyson_finite_with(xi: &SiteConfiguration, ms: &[Poly], s: f64, x: f64, t: f64, y: f64) -> f64 {
    let main: f64 = xi
        .sites()
        .iter()
        .zip(ms)
        .map(|(&u, m)| bm(s, x - u as f64) * m.eval_f64(y))
        .sum();
    if s > t {
        main - bm(s - t, x - y)
    } else {
        main
    }
}

/// `∫ K(t, x; t, x) dx` over `[u_1 - 8√t, u_N + 8√t]`.
pub fn dyson_finite_trace(xi: &SiteConfiguration, t: f64) -> Result<f64> {
    check_times(t, t)?;
    let ms = sfm_family(xi, t);
    let u = xi.sites();
    let r = GAUSSIAN_CUTOFF_SIGMAS * t.sqrt();
    let (lo, hi) = (u[0] as f64 - r, u[u.len() - 1] as f64 + r);
    let gl = GaussLegendre::shared(32);
    let panels = (4.0 * (hi - lo) / t.sqrt().min(1.0)).ceil() as usize;
    Ok(gl.integrate_composite(lo, hi, panels, |x| dyson_finite_with(xi, &ms, t, x, t, x)))
}

/// Continuum extended sine kernel.
///
/// `dt > 0`: `∫_0^ρ e^{π²u² dt/2} cos(πu dx) du`; `dt = 0`: `sin(πρ dx)/(π dx)`;
/// `dt < 0`: `-∫_ρ^∞ e^{π²u² dt/2} cos(πu dx) du`, cut where the Gaussian drops below 1e-30.
pub fn extended_sine_kernel(rho: f64, dt: f64, dx: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("density must be positive, got {rho}")));
    }
    if dt == 0.0 {
        return Ok(if dx == 0.0 { rho } else { (PI * rho * dx).sin() / (PI * dx) });
    }
    let gl = GaussLegendre::shared(64);
    let f = |u: f64| (PI * PI * u * u * dt / 2.0).exp() * (PI * u * dx).cos();
    if dt > 0.0 {
        let panels = 1 + (rho * (dx.abs() + PI * PI * rho * dt) / 8.0).ceil() as usize;
        return Ok(gl.integrate_composite(0.0, rho, panels, f));
    }
    // e^{-π²u²|dt|/2} < 1e-30 beyond this point
    let upper = (2.0 * 30.0 * std::f64::consts::LN_10 / (-dt)).sqrt() / PI;
    if upper <= rho {
        return Ok(0.0);
    }
    let panels = 1 + ((upper - rho) * (dx.abs() + 1.0) / 4.0).ceil() as usize;
    Ok(-gl.integrate_composite(rho, upper, panels, f))
}

/// `θ3(v, τ) = Σ_j e^{2πivj + πiτj²}` with an explicit half-width `J` about the
/// dominant index.
pub fn theta3_terms(v: Complex64, tau: Complex64, half_width: i64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain(format!("theta needs Im τ > 0, got {}", tau.im)));
    }
    let center = (-v.im / tau.im).round() as i64;
    let i = Complex64::i();
    let mut sum = Complex64::zero();
    for j in center - half_width..=center + half_width {
        let jf = j as f64;
        sum += (2.0 * PI * i * v * jf + PI * i * tau * jf * jf).exp();
    }
    Ok(sum)
}

/// Half-width making the omitted terms smaller than `1e-16` of the largest.
pub fn theta3_half_width(tau: Complex64) -> i64 {
    let tail = 16.0 * std::f64::consts::LN_10 / (PI * tau.im);
    2 + tail.sqrt().ceil() as i64
}

pub fn theta3(v: Complex64, tau: Complex64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain(format!("theta needs Im τ > 0, got {}", tau.im)));
    }
    theta3_terms(v, tau, theta3_half_width(tau))
}

/// `(θ3(v, τ), θ3(v/τ, -1/τ) e^{-πiv²/τ} √(i/τ))`.
pub fn theta3_reciprocity(v: Complex64, tau: Complex64) -> Result<(Complex64, Complex64)> {
    let lhs = theta3(v, tau)?;
    let i = Complex64::i();
    let rhs = theta3(v / tau, -tau.inv())? * (-PI * i * v * v / tau).exp() * (i / tau).sqrt();
    Ok((lhs, rhs))
}

/// `(1/2π) ∫_{-π}^{π} e^{λ²t/8a²} cos(λ(y/2a - k)) dλ`.
pub fn sfm_inf(cfg: &EquidistantConfig, k: i64, t: f64, y: f64) -> f64 {
    let two_a = cfg.spacing() as f64;
    let w = y / two_a - k as f64;
    let gl = GaussLegendre::shared(64);
    let panels = 1 + (w.abs() / 4.0).ceil() as usize;
    gl.integrate_composite(-PI, PI, panels, |l| (l * l * t / (2.0 * two_a * two_a)).exp() * (l * w).cos())
        / (2.0 * PI)
}

/// Equidistant Dyson kernel by direct summation over starting points within 8σ.
pub fn dyson_kernel_equidistant_direct(cfg: &EquidistantConfig, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    check_times(s, t)?;
    let two_a = cfg.spacing() as f64;
    let reach = GAUSSIAN_CUTOFF_SIGMAS * s.sqrt();
    let lo = ((x - reach) / two_a).floor() as i64;
    let hi = ((x + reach) / two_a).ceil() as i64;
    let main: f64 = (lo..=hi).map(|j| bm(s, x - two_a * j as f64) * sfm_inf(cfg, j, t, y)).sum();
    Ok(if s > t { main - bm(s - t, x - y) } else { main })
}

/// Equidistant Dyson kernel in closed form: the extended sine kernel plus a
/// `θ3` correction that dies out as `s` grows.
pub fn dyson_kernel_equidistant(cfg: &EquidistantConfig, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    check_times(s, t)?;
    let rho = cfg.rho();
    let r2 = rho * rho;
    let tau = Complex64::new(0.0, 2.0 * PI * r2 * s);
    let half_width = theta3_half_width(tau);
    let i = Complex64::i();
    // the j = ±1 terms of θ3 - 1 are O(1) only within ~1/(2πρ²s) of λ = ±π
    let gl = GaussLegendre::shared(32);
    let levels = 4 + (1.0 + s).log2().ceil() as u32;
    let panels = 2 * (1 + (rho * ((y - x).abs() + x.abs()) / 2.0).ceil() as usize);
    let h = 2.0 * PI / panels as f64;
    let integrand = |l: f64| {
        let v = Complex64::new(rho * x, -l * r2 * s);
        let th = theta3_terms(v, tau, half_width).expect("Im τ > 0") - 1.0;
        ((l * l * r2 * (t - s) / 2.0 + i * l * rho * (y - x)).exp() * th).re
    };
    let correction: f64 = (0..panels)
        .map(|p| {
            let lo = -PI + h * p as f64;
            gl.integrate_graded(lo, lo + h, levels, integrand)
        })
        .sum();
    Ok(extended_sine_kernel(rho, t - s, y - x)? + rho / (2.0 * PI) * correction)
}

/// Which continuum kernel to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum ContinuumKernelSpec {
    FiniteConfig { sites: SiteConfiguration },
    EquidistantInfinite { a: u32 },
    ExtendedSine { rho: f64 },
}

impl ContinuumKernelSpec {
    pub fn value(&self, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
        match self {
            ContinuumKernelSpec::FiniteConfig { sites } => dyson_kernel_finite(sites, s, x, t, y),
            ContinuumKernelSpec::EquidistantInfinite { a } => {
                dyson_kernel_equidistant(&EquidistantConfig::new(*a)?, s, x, t, y)
            }
            ContinuumKernelSpec::ExtendedSine { rho } => extended_sine_kernel(*rho, t - s, y - x),
        }
    }
}

/// Distances between the diffusively scaled walk and its Brownian limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceGap {
    /// `|n p(n²(t-s), ny | nx)/2 - p^BM(t-s, y | x)|`.
    pub clt: f64,
    /// `max_k |M_{nξ}^{nu_k}(n²t, ny) - sfM_ξ^{u_k}(t, y)|`, computed exactly.
    pub martingale: f64,
}

fn scaled_integer(v: f64, scale: f64, what: &str) -> Result<i64> {
    let w = v * scale;
    if (w - w.round()).abs() > 1e-9 {
        return Err(Error::Domain(format!("{what} = {w} is not an integer")));
    }
    Ok(w.round() as i64)
}

/// Gaps at scale `n` between `(s, x)` and `(t, y)`, `s < t`.
///
/// Supported sites of the walk are two apart, i.e. `2/n` apart after scaling,
/// so the mass `p` at a supported site corresponds to density `n p / 2`.
pub fn convergence_gap(xi: &SiteConfiguration, n: u32, s: f64, x: f64, t: f64, y: f64) -> Result<ConvergenceGap> {
    if n == 0 {
        return Err(Error::Domain("scale n must be at least 1".into()));
    }
    if !(t > s && s >= 0.0) {
        return Err(Error::Domain(format!("need 0 ≤ s < t, got s = {s}, t = {t}")));
    }
    let nf = f64::from(n);
    let ns = scaled_integer(s, nf * nf, "n²s")?;
    let nt = scaled_integer(t, nf * nf, "n²t")?;
    let nx = scaled_integer(x, nf, "nx")?;
    let ny = scaled_integer(y, nf, "ny")?;
    if (ns + nx).rem_euclid(2) != 0 || (nt + ny).rem_euclid(2) != 0 {
        return Err(Error::Domain(format!(
            "parity: (n²s, nx) = ({ns}, {nx}) and (n²t, ny) = ({nt}, {ny}) must both have even sums"
        )));
    }
    let p = transition_prob((nt - ns) as u32, nx, ny);
    let clt = (nf * exact::to_f64(&p) / 2.0 - bm(t - s, y - x)).abs();

    let scaled = SiteConfiguration::new(xi.sites().iter().map(|&u| i64::from(n) * u).collect())?;
    let discrete = martingale_family(&scaled, nt as u32);
    let tq = Rational::from_float(t).expect("finite time");
    let yq = Rational::from_float(y).expect("finite position");
    let martingale = discrete
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let diff = m.eval(ny) - sfm_poly(xi, k, &tq).eval(&yq);
            exact::to_f64(&diff.abs())
        })
        .fold(0.0, f64::max);
    Ok(ConvergenceGap { clt, martingale })
}
