//! Parsing of grid axes (`a`, `a..b`, `a..b:step`) and point lists.

use crate::CliError;

/// Values of an inclusive range axis; empty when `hi < lo`.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    let (range, step) = match spec.split_once(':') {
        Some((r, s)) => (r, parse_f64(s)?),
        None => (spec, 1.0),
    };
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::config(format!("grid step must be positive, got {step}")));
    }
    let Some((lo, hi)) = range.split_once("..") else {
        return Ok(vec![parse_f64(range)?]);
    };
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if hi < lo {
        return Ok(Vec::new());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::config(format!("not a number: {s:?}")))
}

/// The four axes of a `s=..,x=..,t=..,y=..` grid; missing axes default to `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub s: Vec<f64>,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl Grid {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let mut grid = Grid { s: vec![0.0], x: vec![0.0], t: vec![0.0], y: vec![0.0] };
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("grid entry {part:?} is not key=value")))?;
            let axis = parse_axis(value)?;
            match key.trim() {
                "s" => grid.s = axis,
                "x" => grid.x = axis,
                "t" => grid.t = axis,
                "y" => grid.y = axis,
                k => return Err(CliError::config(format!("unknown grid axis {k:?}, expected s, x, t or y"))),
            }
        }
        Ok(grid)
    }

    /// Rows in `s, x, t, y` lexicographic order.
    pub fn rows(&self) -> Vec<[f64; 4]> {
        let mut out = Vec::with_capacity(self.s.len() * self.x.len() * self.t.len() * self.y.len());
        for &s in &self.s {
            for &x in &self.x {
                for &t in &self.t {
                    for &y in &self.y {
                        out.push([s, x, t, y]);
                    }
                }
            }
        }
        out
    }
}

pub fn to_int(v: f64, what: &str) -> Result<i64, CliError> {
    if v.fract() != 0.0 || !v.is_finite() {
        return Err(CliError::config(format!("{what} = {v} must be an integer")));
    }
    Ok(v as i64)
}

pub fn to_time(v: f64, what: &str) -> Result<u32, CliError> {
    let i = to_int(v, what)?;
    u32::try_from(i).map_err(|_| CliError::config(format!("{what} = {i} must be a non-negative time")))
}

/// `0,2,4` as a list of integers.
pub fn parse_int_list(spec: &str) -> Result<Vec<i64>, CliError> {
    spec.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<i64>().map_err(|_| CliError::config(format!("not an integer: {p:?}"))))
        .collect()
}

/// `key=value` or bare `value`.
pub fn strip_key<'a>(spec: &'a str, key: &str) -> &'a str {
    match spec.split_once('=') {
        Some((k, v)) if k.trim() == key => v.trim(),
        _ => spec.trim(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes() {
        assert_eq!(parse_axis("3").unwrap(), vec![3.0]);
        assert_eq!(parse_axis("-1..1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_axis("0..1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_axis("2..1").unwrap().is_empty());
        assert!(parse_axis("0..1:0").is_err());
        assert!(parse_axis("a..1").is_err());
    }

    #[test]
    fn grid_defaults_and_order() {
        let g = Grid::parse("s=1,t=1,x=-1..1").unwrap();
        assert_eq!(g.y, vec![0.0]);
        let rows = g.rows();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], [1.0, -1.0, 1.0, 0.0]);
        assert!(Grid::parse("z=1").is_err());
    }

    #[test]
    fn integers() {
        assert_eq!(to_int(2.0, "x").unwrap(), 2);
        assert!(to_int(0.5, "x").is_err());
        assert!(to_time(-1.0, "t").is_err());
        assert_eq!(parse_int_list("0, 2,4").unwrap(), vec![0, 2, 4]);
        assert_eq!(strip_key("a=2", "a"), "2");
        assert_eq!(strip_key("2", "a"), "2");
    }
}
