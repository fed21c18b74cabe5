use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;
use serde_json::{json, Value};

use detmart::continuum::{convergence_gap, ContinuumKernelSpec};
use detmart::exact::{self, Rational};
use detmart::finite_kernel::{FiniteKernel, Mode, Number, TestFunction, TimeSlice};
use detmart::infinite::{sine_kernel_discrete, EquidistantConfig, InfiniteKernel};
use detmart::lattice_walk::{PathBundle, PathEnumerator, SpaceTimePoint};
use detmart::martingale::SiteConfiguration;
use detmart::mc::{exact_correlation_with, exact_expectation_with, h_weight, sample_weighted};

use crate::grid::{parse_axis, parse_int_list, strip_key, to_int, to_time, Grid};
use crate::{open_output, CliError, CorrelateArgs, KernelArgs, SampleArgs, StudyArgs, StudyKind};

fn sites(spec: &str) -> Result<SiteConfiguration, CliError> {
    Ok(SiteConfiguration::new(parse_int_list(spec)?)?)
}

fn equidistant(spec: &str) -> Result<EquidistantConfig, CliError> {
    let v = strip_key(spec, "a");
    let a: u32 = v.parse().map_err(|_| CliError::config(format!("a = {v:?} is not a non-negative integer")))?;
    Ok(EquidistantConfig::new(a)?)
}

fn point(spec: &str) -> Result<SpaceTimePoint, CliError> {
    match parse_int_list(spec)?.as_slice() {
        &[t, x] => Ok(SpaceTimePoint::new(to_time(t as f64, "t")?, x)),
        _ => Err(CliError::config(format!("point {spec:?} is not t,x"))),
    }
}

/// Groups points into slices, one per time, in order of first appearance.
fn slices(points: &[SpaceTimePoint]) -> Vec<TimeSlice> {
    let mut out: Vec<TimeSlice> = Vec::new();
    for p in points {
        match out.iter_mut().find(|s| s.t == p.t) {
            Some(s) => s.sites.push(p.x),
            None => out.push(TimeSlice::new(p.t, vec![p.x])),
        }
    }
    out
}

fn annotation(points: &[SpaceTimePoint]) -> Value {
    if !points.iter().all(SpaceTimePoint::is_supported) {
        return json!("parity");
    }
    let mut seen = HashSet::new();
    if !points.iter().all(|p| seen.insert((p.t, p.x))) {
        return json!("repeated point");
    }
    Value::Null
}

fn number_json(n: &Number) -> Value {
    match n {
        Number::Exact(q) => json!(exact::format(q)),
        Number::Float(v) => json!(v),
    }
}

fn points_json(points: &[SpaceTimePoint]) -> Value {
    json!(points.iter().map(|p| [i64::from(p.t), p.x]).collect::<Vec<_>>())
}

enum KernelSource {
    Finite(FiniteKernel, Mode),
    Infinite(InfiniteKernel),
    Sine(f64),
    Continuum(ContinuumKernelSpec),
}

impl KernelSource {
    fn from_args(a: &KernelArgs) -> Result<Self, CliError> {
        let cfg = a.equidistant.as_deref().map(equidistant).transpose()?;
        let mode = a.mode.map(Mode::from);
        let finite = a.sites.is_some() && !a.sine;
        if mode == Some(Mode::Exact) && !(finite && !a.continuum) {
            return Err(CliError::config("exact mode requires --sites on the lattice"));
        }
        if a.sine {
            if a.sites.is_some() {
                return Err(CliError::config("--sine takes --equidistant or --rho, not --sites"));
            }
            let rho = match (a.rho, cfg) {
                (Some(r), _) => r,
                (None, Some(c)) => c.rho(),
                (None, None) => return Err(CliError::config("--sine needs --rho or --equidistant")),
            };
            if !(rho > 0.0 && rho < 0.5) {
                return Err(CliError::config(format!("density ρ = {rho} must lie in (0, 1/2)")));
            }
            return Ok(if a.continuum {
                KernelSource::Continuum(ContinuumKernelSpec::ExtendedSine { rho })
            } else {
                KernelSource::Sine(rho)
            });
        }
        match (&a.sites, cfg) {
            (Some(s), _) if a.continuum => {
                Ok(KernelSource::Continuum(ContinuumKernelSpec::FiniteConfig { sites: sites(s)? }))
            }
            (Some(s), _) => Ok(KernelSource::Finite(FiniteKernel::new(sites(s)?), mode.unwrap_or(Mode::Exact))),
            (None, Some(c)) if a.continuum => {
                Ok(KernelSource::Continuum(ContinuumKernelSpec::EquidistantInfinite { a: c.a() }))
            }
            (None, Some(c)) => {
                Ok(KernelSource::Infinite(InfiniteKernel::new(c).with_route(a.route.into()).with_nodes(a.nodes)))
            }
            (None, None) => Err(CliError::config("one of --sites, --equidistant or --sine is required")),
        }
    }

    fn mode_label(&self) -> &'static str {
        match self {
            KernelSource::Finite(_, Mode::Exact) => "exact",
            _ => "float",
        }
    }

    fn eval(&self, [s, x, t, y]: [f64; 4]) -> Result<String, CliError> {
        match self {
            KernelSource::Finite(k, mode) => Ok(k
                .value(to_time(s, "s")?, to_int(x, "x")?, to_time(t, "t")?, to_int(y, "y")?, *mode)
                .render()),
            KernelSource::Infinite(k) => {
                Ok(k.value(to_time(s, "s")?, to_int(x, "x")?, to_time(t, "t")?, to_int(y, "y")?).to_string())
            }
            KernelSource::Sine(rho) => Ok(sine_kernel_discrete(*rho, to_int(t, "dt")?, to_int(y, "dx")?)?.to_string()),
            KernelSource::Continuum(spec) => Ok(spec.value(s, x, t, y)?.to_string()),
        }
    }
}

pub fn kernel(a: &KernelArgs) -> Result<(), CliError> {
    let source = KernelSource::from_args(a)?;
    let rows: Vec<[f64; 4]> = if a.sine {
        let dts = parse_axis(&a.dt)?;
        let dxs = parse_axis(&a.dx)?;
        dts.iter().flat_map(|&dt| dxs.iter().map(move |&dx| [0.0, 0.0, dt, dx])).collect()
    } else {
        Grid::parse(&a.grid)?.rows()
    };
    let values: Vec<String> = rows.par_iter().map(|r| source.eval(*r)).collect::<Result<_, _>>()?;
    let mut out = open_output(a.output.as_ref())?;
    writeln!(out, "s,x,t,y,value,mode")?;
    let label = source.mode_label();
    for ([s, x, t, y], v) in rows.iter().zip(&values) {
        writeln!(out, "{s},{x},{t},{y},{v},{label}")?;
    }
    out.flush()?;
    Ok(())
}

fn chi_entry(spec: &str) -> Result<(SpaceTimePoint, Rational), CliError> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [t, x, v] = parts.as_slice() else {
        return Err(CliError::config(format!("test function entry {spec:?} is not t,x,value")));
    };
    let p = point(&format!("{t},{x}"))?;
    let value = exact::parse(v)
        .or_else(|| v.parse::<f64>().ok().and_then(Rational::from_float))
        .ok_or_else(|| CliError::config(format!("test function value {v:?} is not a number")))?;
    Ok((p, value))
}

fn test_functions<V: Clone>(entries: &[(SpaceTimePoint, V)]) -> Vec<TestFunction<V>> {
    let mut out: Vec<TestFunction<V>> = Vec::new();
    for (p, v) in entries {
        match out.iter_mut().find(|c| c.t == p.t) {
            Some(c) => c.values.push((p.x, v.clone())),
            None => out.push(TestFunction { t: p.t, values: vec![(p.x, v.clone())] }),
        }
    }
    out
}

fn agrees(value: &Number, oracle: &Rational, tol: f64) -> bool {
    match value {
        Number::Exact(q) => q == oracle,
        Number::Float(v) => (v - exact::to_f64(oracle)).abs() <= tol,
    }
}

pub fn correlate(a: &CorrelateArgs) -> Result<(), CliError> {
    let xi = sites(&a.sites)?;
    let kernel = FiniteKernel::new(xi.clone());
    let mode = Mode::from(a.mode);
    let enumerator = PathEnumerator::with_cap(a.cap);

    let (points, value, method, weights, oracle) = if a.fredholm {
        if !a.points.is_empty() {
            return Err(CliError::config("--fredholm takes --chi entries, not --point"));
        }
        let entries = a.chi.iter().map(|c| chi_entry(c)).collect::<Result<Vec<_>, _>>()?;
        let points: Vec<SpaceTimePoint> = entries.iter().map(|(p, _)| *p).collect();
        if annotation(&points) == json!("repeated point") {
            return Err(CliError::config("test function entries must be at distinct points"));
        }
        let value = match mode {
            Mode::Exact => Number::Exact(kernel.fredholm_exact(&test_functions(&entries))),
            Mode::Float => {
                let floats: Vec<(SpaceTimePoint, f64)> = entries.iter().map(|(p, v)| (*p, exact::to_f64(v))).collect();
                Number::Float(kernel.fredholm_f64(&test_functions(&floats)))
            }
        };
        let oracle = if a.oracle {
            let horizon = a.horizon.unwrap_or_else(|| points.iter().map(|p| p.t).max().unwrap_or(0));
            let one = exact::int(1);
            let f = |b: &PathBundle| {
                entries
                    .iter()
                    .filter(|(p, _)| p.t <= b.horizon() && b.occupied(p.t, p.x))
                    .fold(one.clone(), |acc, (_, v)| acc * (&one + v))
            };
            if let Some(p) = points.iter().find(|p| p.t > horizon) {
                return Err(CliError::config(format!("time {} exceeds horizon {horizon}", p.t)));
            }
            Some(exact_expectation_with(&enumerator, &xi, horizon, h_weight, f)?)
        } else {
            None
        };
        let weights = json!(entries.iter().map(|(_, v)| exact::format(v)).collect::<Vec<_>>());
        (points, value, "fredholm", Some(weights), oracle)
    } else {
        let points = a.points.iter().map(|p| point(p)).collect::<Result<Vec<_>, _>>()?;
        let slices = slices(&points);
        let value = kernel.correlation(&slices, mode);
        let oracle = if a.oracle {
            let horizon = a.horizon.unwrap_or_else(|| points.iter().map(|p| p.t).max().unwrap_or(0));
            Some(exact_correlation_with(&enumerator, &xi, horizon, &slices)?)
        } else {
            None
        };
        (points, value, "determinant", None, oracle)
    };

    let mut doc = json!({
        "sites": xi.sites(),
        "points": points_json(&points),
        "value": number_json(&value),
        "method": method,
        "mode": if mode == Mode::Exact { "exact" } else { "float" },
        "annotation": annotation(&points),
    });
    if let Some(w) = weights {
        doc["weights"] = w;
    }
    if let Some(o) = oracle {
        doc["oracle"] = json!(exact::format(&o));
        doc["oracle_equal"] = json!(agrees(&value, &o, a.tol));
    }
    let mut out = open_output(a.output.as_ref())?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn sample(a: &SampleArgs) -> Result<(), CliError> {
    let xi = sites(&a.sites)?;
    if a.samples == 0 {
        return Err(CliError::config("sample count must be positive"));
    }
    let points = a.points.iter().map(|p| point(p)).collect::<Result<Vec<_>, _>>()?;
    if let Some(p) = points.iter().find(|p| p.t > a.horizon) {
        return Err(CliError::config(format!("time {} exceeds horizon {}", p.t, a.horizon)));
    }
    let slices = slices(&points);

    let exact_block = if a.exact {
        let enumerator = PathEnumerator::with_cap(a.cap);
        let mean = exact_expectation_with(&enumerator, &xi, a.horizon, h_weight, |_| exact::int(1))?;
        let corr = exact_correlation_with(&enumerator, &xi, a.horizon, &slices)?;
        json!({ "mean_weight": exact::format(&mean), "correlation": exact::format(&corr) })
    } else {
        Value::Null
    };

    let ensemble = sample_weighted(&xi, a.horizon, a.samples, a.seed, a.streams);
    if let Some(path) = &a.ensemble {
        let mut f = open_output(Some(path))?;
        ensemble.write_jsonl(&mut f)?;
        f.flush()?;
    }
    let (mean, mean_se) = ensemble.mean_weight();
    let (estimate, se) = ensemble.estimate_correlation(&slices)?;
    let doc = json!({
        "sites": xi.sites(),
        "horizon": a.horizon,
        "samples": a.samples,
        "seed": a.seed,
        "streams": a.streams,
        "points": points_json(&points),
        "mean_weight": mean,
        "mean_weight_std_error": mean_se,
        "estimate": estimate,
        "std_error": se,
        "exact": exact_block,
    });
    let mut out = open_output(a.output.as_ref())?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn scales(a: &StudyArgs) -> Result<Vec<u32>, CliError> {
    let to_scale = |v: i64| {
        u32::try_from(v)
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config(format!("scale n = {v} must be a positive integer")))
    };
    match (&a.n, &a.geometric) {
        (Some(list), _) => parse_int_list(list)?.into_iter().map(to_scale).collect(),
        (None, Some(g)) => {
            let parts = g.split(':').map(str::trim).collect::<Vec<_>>();
            let [start, ratio, count] = parts.as_slice() else {
                return Err(CliError::config(format!("geometric grid {g:?} is not start:ratio:count")));
            };
            let int = |s: &str| s.parse::<u64>().map_err(|_| CliError::config(format!("not an integer: {s:?}")));
            let (start, ratio, count) = (int(start)?, int(ratio)?, int(count)?);
            (0..count)
                .map(|i| {
                    ratio
                        .checked_pow(i as u32)
                        .and_then(|r| r.checked_mul(start))
                        .and_then(|v| i64::try_from(v).ok())
                        .ok_or_else(|| CliError::config("geometric grid overflows"))
                        .and_then(to_scale)
                })
                .collect()
        }
        (None, None) => Err(CliError::config("one of --n or --geometric is required")),
    }
}

pub fn study(a: &StudyArgs) -> Result<(), CliError> {
    let ns = scales(a)?;
    let mut out = open_output(a.output.as_ref())?;
    match a.kind {
        StudyKind::Relaxation => {
            let cfg = equidistant(&a.a)?;
            let (s, t) = (to_time(a.s, "s")?, to_time(a.t, "t")?);
            let (x, y) = (to_int(a.x, "x")?, to_int(a.y, "y")?);
            let sine = sine_kernel_discrete(cfg.rho(), i64::from(t) - i64::from(s), y - x)?;
            let kernel = InfiniteKernel::new(cfg).with_nodes(a.nodes);
            let gaps: Vec<f64> = ns.par_iter().map(|&n| (kernel.value(s + n, x, t + n, y) - sine).abs()).collect();
            writeln!(out, "n,gap")?;
            for (n, g) in ns.iter().zip(&gaps) {
                writeln!(out, "{n},{g}")?;
            }
        }
        StudyKind::Convergence => {
            let xi = sites(&a.sites)?;
            let gaps = ns
                .par_iter()
                .map(|&n| convergence_gap(&xi, n, a.s, a.x, a.t, a.y))
                .collect::<Result<Vec<_>, _>>()?;
            writeln!(out, "n,clt_gap,m_gap")?;
            for (n, g) in ns.iter().zip(&gaps) {
                writeln!(out, "{n},{},{}", g.clt, g.martingale)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
