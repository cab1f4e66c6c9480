//! Scenario configuration: plain `key=value` text, one pair per line,
//! `#` comments. Unknown keys and non-finite numbers are rejected so a
//! typo fails loudly instead of silently running the defaults.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMethodChoice {
    Closed,
    Quadrature,
    Both,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    /// affine | zr | dilation:N | untwisted
    pub example: String,
    pub group: (f64, f64, usize),
    pub base: (f64, f64, usize),
    pub eta: f64,
    pub omega: f64,
    pub s_list: Vec<f64>,
    pub c_list: Vec<f64>,
    pub format: OutputFormat,
    pub seed: u64,
    pub method: TraceMethodChoice,
    pub perturb: f64,
    pub tol_trace_rel: f64,
    pub tol_dimension: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            example: "affine".into(),
            group: (-8.0, 8.0, 33),
            base: (-6.0, 6.0, 65),
            eta: 0.0,
            omega: 1.0,
            s_list: vec![2.5, 3.0, 4.0],
            c_list: vec![0.0, 1.0],
            format: OutputFormat::Csv,
            seed: 0,
            method: TraceMethodChoice::Both,
            perturb: 0.01,
            tol_trace_rel: 1e-6,
            tol_dimension: 0.02,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("{key}: not a number: {v:?}")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: not a count: {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let out: Result<Vec<f64>> = v.split(',').map(|p| parse_f64(key, p.trim())).collect();
    let out = out?;
    if out.is_empty() {
        return Err(Error::Config(format!("{key}: empty list")));
    }
    Ok(out)
}

pub fn parse_format(v: &str) -> Result<OutputFormat> {
    match v {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(Error::Config(format!("format must be csv or json, got {v:?}"))),
    }
}

pub fn parse_method(v: &str) -> Result<TraceMethodChoice> {
    match v {
        "closed" => Ok(TraceMethodChoice::Closed),
        "quadrature" => Ok(TraceMethodChoice::Quadrature),
        "both" => Ok(TraceMethodChoice::Both),
        _ => Err(Error::Config(format!(
            "method must be closed, quadrature or both, got {v:?}"
        ))),
    }
}

impl ScenarioConfig {
    /// Apply one `lo:hi:count` grid spec to a (lo, hi, count) slot.
    pub fn parse_grid_spec(spec: &str) -> Result<(f64, f64, usize)> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid spec must be lo:hi:count, got {spec:?}")));
        }
        let lo = parse_f64("grid.lo", parts[0])?;
        let hi = parse_f64("grid.hi", parts[1])?;
        let count = parse_usize("grid.count", parts[2])?;
        if !(lo < hi) || count < 3 {
            return Err(Error::Config(format!("degenerate grid spec {spec:?}")));
        }
        Ok((lo, hi, count))
    }

    /// Merge `key=value` lines into the current configuration. An empty
    /// body (nothing but blanks and comments) is a configuration error.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut any = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            any = true;
            match key {
                "example" => self.example = value.to_string(),
                "group.lo" => self.group.0 = parse_f64(key, value)?,
                "group.hi" => self.group.1 = parse_f64(key, value)?,
                "group.count" => self.group.2 = parse_usize(key, value)?,
                "base.lo" => self.base.0 = parse_f64(key, value)?,
                "base.hi" => self.base.1 = parse_f64(key, value)?,
                "base.count" => self.base.2 = parse_usize(key, value)?,
                "eta" => self.eta = parse_f64(key, value)?,
                "omega" => {
                    let w = parse_f64(key, value)?;
                    if w == 0.0 {
                        return Err(Error::Config("omega must be nonzero".into()));
                    }
                    self.omega = w;
                }
                "s" => self.s_list = parse_list(key, value)?,
                "c" => self.c_list = parse_list(key, value)?,
                "format" => self.format = parse_format(value)?,
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| Error::Config(format!("seed: not an integer: {value:?}")))?
                }
                "method" => self.method = parse_method(value)?,
                "perturb" => self.perturb = parse_f64(key, value)?,
                "tol.trace_rel" => self.tol_trace_rel = parse_f64(key, value)?,
                "tol.dimension" => self.tol_dimension = parse_f64(key, value)?,
                _ => return Err(Error::Config(format!("unknown key {key:?}"))),
            }
        }
        if !any {
            return Err(Error::Config("empty configuration".into()));
        }
        Ok(())
    }
}
