//! Walkers started from every site of `2aZ`: sine martingale functions, the
//! space-time kernel and its relaxation to the discrete extended sine kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_walk::{transition_prob_f64, SpaceTimePoint};
use crate::quad::GaussLegendre;

/// Default Gauss–Legendre node count.
pub const DEFAULT_NODES: usize = 512;

/// Above this time the kernel switches from the site sum to the spectral form.
pub const AUTO_SPECTRAL_THRESHOLD: u32 = 24;

/// `δ_{2aZ}`, density `ρ = 1/(2a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquidistantConfig {
    a: u32,
}

impl EquidistantConfig {
    pub fn new(a: u32) -> Result<Self> {
        if a < 2 {
            return Err(Error::InvalidConfiguration(format!("spacing parameter a = {a} must be at least 2")));
        }
        Ok(EquidistantConfig { a })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn spacing(&self) -> i64 {
        2 * i64::from(self.a)
    }

    pub fn rho(&self) -> f64 {
        0.5 / f64::from(self.a)
    }
}

fn sinc_pi(w: Complex64) -> Complex64 {
    if w.norm() < 1e-8 {
        // sin(πw)/(πw) = 1 - (πw)²/6 + …
        let pw = w * PI;
        return Complex64::new(1.0, 0.0) - pw * pw / 6.0;
    }
    (w * PI).sin() / (w * PI)
}

/// `sin(π(z/2a - k)) / (π(z/2a - k))`.
pub fn phi_sine(cfg: &EquidistantConfig, k: i64, z: Complex64) -> Complex64 {
    sinc_pi(z / cfg.spacing() as f64 - k as f64)
}

/// `∫_{-π}^{π} f` split into panels fine enough for frequency `freq`.
fn integrate_periodic<F: FnMut(f64) -> f64>(gl: &GaussLegendre, freq: f64, f: F) -> f64 {
    let panels = 1 + (freq * 2.0 * PI / gl.len() as f64).ceil() as usize;
    gl.integrate_composite(-PI, PI, panels, f)
}

/// `(1/2π) ∫_{-π}^{π} e^{iλ(y/2a - k)} / cos(λ/2a)^t dλ`, real and imaginary parts.
pub fn martingale_fn_inf_complex(cfg: &EquidistantConfig, k: i64, t: u32, y: i64, nodes: usize) -> Complex64 {
    let gl = GaussLegendre::shared(nodes);
    let two_a = cfg.spacing() as f64;
    let w = y as f64 / two_a - k as f64;
    let ti = t as i32;
    let re = integrate_periodic(&gl, w.abs(), |l| (l * w).cos() / (l / two_a).cos().powi(ti));
    let im = integrate_periodic(&gl, w.abs(), |l| (l * w).sin() / (l / two_a).cos().powi(ti));
    Complex64::new(re, im) / (2.0 * PI)
}

/// `M^{2ak}(t, y)`; bounded by `2^{t/2}` in absolute value.
pub fn martingale_fn_inf(cfg: &EquidistantConfig, k: i64, t: u32, y: i64) -> f64 {
    martingale_fn_inf_complex(cfg, k, t, y, DEFAULT_NODES).re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelRoute {
    /// `Σ_j p(s, x | 2aj) M^{2aj}(t, y)`; loses digits once `M` grows like `2^{t/2}`.
    Direct,
    /// The site sum folded into a single `λ` integral, uniformly bounded integrand.
    Spectral,
    /// Direct for small times, spectral beyond [`AUTO_SPECTRAL_THRESHOLD`].
    Auto,
}

/// Kernel of the system started from `δ_{2aZ}`.
#[derive(Clone, Debug)]
pub struct InfiniteKernel {
    cfg: EquidistantConfig,
    route: KernelRoute,
    nodes: usize,
}

impl InfiniteKernel {
    pub fn new(cfg: EquidistantConfig) -> Self {
        InfiniteKernel { cfg, route: KernelRoute::Auto, nodes: DEFAULT_NODES }
    }

    pub fn with_route(mut self, route: KernelRoute) -> Self {
        self.route = route;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn config(&self) -> &EquidistantConfig {
        &self.cfg
    }

    pub fn value(&self, s: u32, x: i64, t: u32, y: i64) -> f64 {
        if !SpaceTimePoint::new(s, x).is_supported() || !SpaceTimePoint::new(t, y).is_supported() {
            return 0.0;
        }
        let route = match self.route {
            KernelRoute::Auto if s.max(t) > AUTO_SPECTRAL_THRESHOLD => KernelRoute::Spectral,
            KernelRoute::Auto => KernelRoute::Direct,
            r => r,
        };
        let main = match route {
            KernelRoute::Spectral => self.spectral_sum(s, x, t, y),
            _ => self.direct_sum(s, x, t, y),
        };
        if s > t {
            main - transition_prob_f64(s - t, y, x)
        } else {
            main
        }
    }

    fn direct_sum(&self, s: u32, x: i64, t: u32, y: i64) -> f64 {
        let two_a = self.cfg.spacing();
        let si = i64::from(s);
        let lo = (x - si).div_euclid(two_a);
        let hi = (x + si).div_euclid(two_a) + 1;
        (lo..=hi)
            .filter(|j| (two_a * j - x).abs() <= si)
            .map(|j| {
                let p = transition_prob_f64(s, two_a * j, x);
                if p == 0.0 {
                    0.0
                } else {
                    p * martingale_fn_inf_complex(&self.cfg, j, t, y, self.nodes).re
                }
            })
            .sum()
    }

    /// `(1/2πa) ∫ dλ Σ_{m<a} cos(λy/2a + x κ_m) [cos κ_m / cos(λ/2a)]^s cos(λ/2a)^{s-t}`,
    /// `κ_m = (2πm - λ)/2a`.
    fn spectral_sum(&self, s: u32, x: i64, t: u32, y: i64) -> f64 {
        let a = self.cfg.a();
        let two_a = self.cfg.spacing() as f64;
        let (xf, yf) = (x as f64, y as f64);
        let si = s as i32;
        let shift = s as i32 - t as i32;
        let integrand = |l: f64| {
            let c = (l / two_a).cos();
            let tail = c.powi(shift);
            (0..a)
                .map(|m| {
                    let kappa = (2.0 * PI * f64::from(m) - l) / two_a;
                    (l * yf / two_a + xf * kappa).cos() * (kappa.cos() / c).powi(si)
                })
                .sum::<f64>()
                * tail
        };
        // [cos κ_1 / cos(λ/2a)]^s approaches 1 at λ = ±π over a layer of width ~1/s
        let gl = GaussLegendre::shared(32);
        let levels = 6 + (f64::from(s.max(1))).log2().ceil() as u32;
        let freq = (xf.abs() + yf.abs()) / two_a + 1.0;
        let panels = 2 * (1 + (freq / 4.0).ceil() as usize);
        let h = 2.0 * PI / panels as f64;
        let total: f64 = (0..panels)
            .map(|p| {
                let lo = -PI + h * p as f64;
                gl.integrate_graded(lo, lo + h, levels, integrand)
            })
            .sum();
        total / (PI * two_a)
    }

    /// `Σ_x K(t, x; t, x)` over `x ∈ [x0, x0 + 2aW)`; equals `W`.
    pub fn window_trace(&self, t: u32, x0: i64, periods: u32) -> f64 {
        let len = self.cfg.spacing() * i64::from(periods);
        (x0..x0 + len)
            .filter(|&x| SpaceTimePoint::new(t, x).is_supported())
            .map(|x| self.value(t, x, t, x))
            .sum()
    }
}

pub fn kernel_inf(cfg: &EquidistantConfig, s: u32, x: i64, t: u32, y: i64) -> f64 {
    InfiniteKernel::new(*cfg).value(s, x, t, y)
}

/// Discrete extended sine kernel `K_ρ(dt, dx)`, zero unless `dt + dx` is even.
///
/// `dt > 0`: `2∫_0^ρ cos(πu dx) / cos(πu)^dt du`;
/// `dt = 0`: `2 sin(πρ dx)/(π dx)`;
/// `dt < 0`: `-2∫_ρ^{1/2} cos(πu dx) cos(πu)^{|dt|} du`.
pub fn sine_kernel_discrete(rho: f64, dt: i64, dx: i64) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("density {rho} outside (0, 1/2)")));
    }
    if (dt + dx).rem_euclid(2) != 0 {
        return Ok(0.0);
    }
    let d = dx as f64;
    if dt == 0 {
        return Ok(if dx == 0 { 2.0 * rho } else { 2.0 * (PI * rho * d).sin() / (PI * d) });
    }
    let gl = GaussLegendre::shared(DEFAULT_NODES);
    let (lo, hi) = if dt > 0 { (0.0, rho) } else { (rho, 0.5) };
    let panels = 1 + ((hi - lo) * d.abs() * PI / 64.0).ceil() as usize;
    let p = -dt as i32;
    let v = gl.integrate_composite(lo, hi, panels, |u| (PI * u * d).cos() * (PI * u).cos().powi(p));
    Ok(if dt > 0 { 2.0 * v } else { -2.0 * v })
}

/// `|K_{δ_{2aZ}}(s+n, x; t+n, y) - K_ρ(t-s, y-x)|`.
pub fn relaxation_gap(cfg: &EquidistantConfig, s: u32, t: u32, x: i64, y: i64, n: u32) -> f64 {
    let k = InfiniteKernel::new(*cfg).value(s + n, x, t + n, y);
    let sine = sine_kernel_discrete(cfg.rho(), i64::from(t) - i64::from(s), y - x)
        .expect("ρ = 1/2a lies in (0, 1/4]");
    (k - sine).abs()
}
