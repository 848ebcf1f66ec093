//! Point reports and the efficiency sweep behind the temperature-vs-efficiency
//! figures, with their CSV and JSON emitters.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{maximize_work_at_efficiency, DEFAULT_REL_TOL};
use crate::swap::{self, EngineSetup, SwapOutcome};
use crate::temperature::TemperatureReport;
use crate::thermo::BathPair;

pub const CSV_HEADER: &str =
    "eta,nu,a1_star,a2_star,work_extracted,t1_prime,t2_prime,t_effective,t_spectral,t_contact";

/// Significant digits written to CSV.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub t1: f64,
    pub t2: f64,
    pub eta_lo: f64,
    pub eta_hi: f64,
    pub steps: usize,
    pub output_path: PathBuf,
    pub format: OutputFormat,
}

impl SweepConfig {
    pub const DEFAULT_T1: f64 = 9.0;
    pub const DEFAULT_T2: f64 = 1.0;
    pub const DEFAULT_STEPS: usize = 400;
    /// Distance kept from `eta = 0` and from the Carnot efficiency.
    pub const DEFAULT_MARGIN: f64 = 0.01;

    /// Default grid `[0.01, 1 - theta - 0.01]` with 400 steps.
    pub fn with_defaults(t1: f64, t2: f64, output_path: impl Into<PathBuf>) -> Self {
        SweepConfig {
            t1,
            t2,
            eta_lo: Self::DEFAULT_MARGIN,
            eta_hi: 1.0 - t2 / t1 - Self::DEFAULT_MARGIN,
            steps: Self::DEFAULT_STEPS,
            output_path: output_path.into(),
            format: OutputFormat::Csv,
        }
    }

    pub fn baths(&self) -> Result<BathPair> {
        BathPair::new(self.t1, self.t2)
    }

    pub fn validate(&self) -> Result<BathPair> {
        let baths = self.baths()?;
        let carnot = 1.0 - baths.theta();
        if !(self.eta_lo > 0.0) {
            return Err(Error::invalid(format!(
                "eta_lo must be positive, got {}",
                self.eta_lo
            )));
        }
        if !(self.eta_hi > self.eta_lo) {
            return Err(Error::invalid(format!(
                "eta_hi must exceed eta_lo (eta_lo = {}, eta_hi = {})",
                self.eta_lo, self.eta_hi
            )));
        }
        if !(self.eta_hi < carnot) {
            return Err(Error::invalid(format!(
                "eta_hi must stay below the Carnot efficiency 1 - T2/T1 = {carnot}, got {}",
                self.eta_hi
            )));
        }
        if self.steps < 2 {
            return Err(Error::invalid(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        Ok(baths)
    }

    /// Grid points in ascending order, endpoints included.
    pub fn etas(&self) -> Vec<f64> {
        let spacing = (self.eta_hi - self.eta_lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == self.steps - 1 {
                    self.eta_hi
                } else {
                    self.eta_lo + spacing * k as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eta: f64,
    pub nu: f64,
    pub a1_star: f64,
    pub a2_star: f64,
    pub work_extracted: f64,
    pub t1_prime: f64,
    pub t2_prime: f64,
    pub t_effective: f64,
    pub t_spectral: f64,
    pub t_contact: f64,
}

impl SweepRow {
    pub fn values(&self) -> [f64; 10] {
        [
            self.eta,
            self.nu,
            self.a1_star,
            self.a2_star,
            self.work_extracted,
            self.t1_prime,
            self.t2_prime,
            self.t_effective,
            self.t_spectral,
            self.t_contact,
        ]
    }
}

/// Max-work engine and all temperatures at one efficiency.
pub fn sweep_row(baths: &BathPair, eta: f64) -> Result<SweepRow> {
    let best = maximize_work_at_efficiency(baths, 1.0 - eta, DEFAULT_REL_TOL)?;
    let setup = best.setup_star;
    let temps = TemperatureReport::new(&setup)?;
    Ok(SweepRow {
        eta,
        nu: setup.nu(),
        a1_star: setup.a1(),
        a2_star: setup.a2(),
        work_extracted: (-best.work_star).max(0.0),
        t1_prime: temps.t1_prime,
        t2_prime: temps.t2_prime,
        t_effective: temps.t_effective,
        t_spectral: temps.t_spectral,
        t_contact: temps.t_contact,
    })
}

fn row_failure(eta: f64, err: Error) -> Error {
    match err {
        Error::InvalidParameter(msg) => Error::InvalidParameter(format!("at eta = {eta}: {msg}")),
        Error::NonConvergence { method, detail } => Error::NonConvergence {
            method,
            detail: format!("at eta = {eta}: {detail}"),
        },
        other => other,
    }
}

/// Evaluates every grid point. Rows come back in ascending `eta` whether or
/// not the points are evaluated in parallel.
pub fn compute_sweep(config: &SweepConfig, parallel: bool) -> Result<Vec<SweepRow>> {
    let baths = config.validate()?;
    let etas = config.etas();
    let row = |&eta: &f64| sweep_row(&baths, eta).map_err(|e| row_failure(eta, e));
    if parallel {
        etas.par_iter().map(row).collect()
    } else {
        etas.iter().map(row).collect()
    }
}

/// Runs the sweep and writes it to `config.output_path` in the configured
/// format.
pub fn run_sweep(config: &SweepConfig, parallel: bool) -> Result<Vec<SweepRow>> {
    let rows = compute_sweep(config, parallel)?;
    let body = match config.format {
        OutputFormat::Csv => render_csv(&rows),
        OutputFormat::Json => render_json(config, &rows)?,
    };
    write_atomically(&config.output_path, body.as_bytes())?;
    Ok(rows)
}

/// Formats like C's `%.{digits}g`: fixed notation for decimal exponents in
/// `[-4, digits)`, scientific otherwise, trailing zeros removed.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= digits as i32 {
        format!("{}e{}", trim_fraction(mantissa), exponent)
    } else {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_fraction(&format!("{value:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row
            .values()
            .iter()
            .map(|&v| format_significant(v, CSV_DIGITS))
            .collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

#[derive(Serialize)]
struct ConfigEcho {
    t1: f64,
    t2: f64,
    eta_lo: f64,
    eta_hi: f64,
    steps: usize,
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    config: ConfigEcho,
    rows: &'a [SweepRow],
}

pub fn render_json(config: &SweepConfig, rows: &[SweepRow]) -> Result<String> {
    let doc = SweepDocument {
        config: ConfigEcho {
            t1: config.t1,
            t2: config.t2,
            eta_lo: config.eta_lo,
            eta_hi: config.eta_hi,
            steps: config.steps,
        },
        rows,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

/// Writes through a temporary file in the destination directory and renames
/// it into place.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Every swap-engine and temperature quantity for one setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointReport {
    pub t1: f64,
    pub t2: f64,
    pub a1: f64,
    pub a2: f64,
    pub theta: f64,
    pub nu: f64,
    pub eta: f64,
    pub r2: f64,
    pub s2: f64,
    pub c1: f64,
    pub c2: f64,
    pub work_extracted: f64,
    pub swap: SwapOutcome,
    pub temperatures: TemperatureReport,
}

pub fn point_report(t1: f64, t2: f64, a1: f64, a2: f64) -> Result<PointReport> {
    let baths = BathPair::new(t1, t2)?;
    let setup = EngineSetup::new(a1, a2, baths)?;
    let outcome = swap::swap(&setup);
    let (c1, c2) = setup.heat_capacities();
    Ok(PointReport {
        t1,
        t2,
        a1,
        a2,
        theta: baths.theta(),
        nu: setup.nu(),
        eta: setup.eta(),
        r2: setup.r2(),
        s2: setup.s2(),
        c1,
        c2,
        work_extracted: outcome.work_extracted(),
        swap: outcome,
        temperatures: TemperatureReport::new(&setup)?,
    })
}
