//! Parameter-grid scans of the normalizability windows, and their serialization.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{Branch, ProfileSpec};
use crate::dynamics::{default_grid, verify_mode, VerifyOptions};
use crate::eigen::{discriminant, eigen_mode, is_degenerate, Sign};
use crate::error::{Error, Result};
use crate::normalization::{
    classify_profile, norm_integrand, CLASSIFY_QUAD_TOL, window_a, window_b, window_sign_for_mode, Convention, QuadOptions,
    WindowInterval,
};
use crate::params::CouplingParams;

/// Residual tolerance reported alongside `max_residual` when `verify` is set.
pub const SCAN_VERIFY_TOL: f64 = 1e-10;

/// `count` evenly spaced values in `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn fixed(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            count: 1,
        }
    }

    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidGrid(format!("{name}: bounds must be finite")));
        }
        if self.count == 0 {
            return Err(Error::InvalidGrid(format!("{name}: count must be at least 1")));
        }
        if self.min > self.max {
            return Err(Error::InvalidGrid(format!(
                "{name}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub f56: Axis,
    pub ft56: Axis,
    pub ft3: Axis,
    pub ftp: Axis,
    pub ftm: Axis,
    pub n_min: i64,
    pub n_max: i64,
    pub rho0: f64,
    /// Window signs to emit.
    pub signs: Vec<Sign>,
    /// Readings of the B window to emit, one record each.
    pub conventions: Vec<Convention>,
    /// Run residual checks of the closed forms for every integer `n`.
    pub verify: bool,
    /// Reconcile the window against quadrature for every integer `n`.
    pub quad_check: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            f56: Axis::fixed(0.0),
            ft56: Axis::fixed(0.0),
            ft3: Axis::fixed(0.0),
            ftp: Axis::fixed(0.0),
            ftm: Axis::fixed(0.0),
            n_min: -5,
            n_max: 5,
            rho0: 1.0,
            signs: Sign::BOTH.to_vec(),
            conventions: vec![Convention::ShiftedIndex],
            verify: false,
            quad_check: false,
        }
    }
}

impl GridSpec {
    /// Single grid point at the couplings of `c`.
    pub fn point(c: &CouplingParams) -> Self {
        Self {
            f56: Axis::fixed(c.f56()),
            ft56: Axis::fixed(c.ft56()),
            ft3: Axis::fixed(c.ft3()),
            ftp: Axis::fixed(c.ftp()),
            ftm: Axis::fixed(c.ftm()),
            rho0: c.rho0(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in self.axes() {
            axis.validate(name)?;
        }
        if self.n_min > self.n_max {
            return Err(Error::InvalidGrid(format!(
                "n range [{}, {}] is empty",
                self.n_min, self.n_max
            )));
        }
        if !(self.rho0.is_finite() && self.rho0 > 0.0) {
            return Err(Error::InvalidGrid(format!("rho0 must be positive, got {}", self.rho0)));
        }
        if self.signs.is_empty() || self.conventions.is_empty() {
            return Err(Error::InvalidGrid("sign and convention sets must be non-empty".into()));
        }
        Ok(())
    }

    fn axes(&self) -> [(&'static str, &Axis); 5] {
        [
            ("f56", &self.f56),
            ("ft56", &self.ft56),
            ("ft3", &self.ft3),
            ("ftp", &self.ftp),
            ("ftm", &self.ftm),
        ]
    }

    /// Coupling tuples in lexicographic order, `f56` slowest.
    pub fn points(&self) -> Vec<[f64; 5]> {
        let values: Vec<Vec<f64>> = self.axes().iter().map(|(_, a)| a.values()).collect();
        let mut out = Vec::with_capacity(values.iter().map(Vec::len).product());
        for &a in &values[0] {
            for &b in &values[1] {
                for &c in &values[2] {
                    for &d in &values[3] {
                        for &e in &values[4] {
                            out.push([a, b, c, d, e]);
                        }
                    }
                }
            }
        }
        out
    }

    fn dedup<T: PartialEq + Copy>(items: &[T]) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for &it in items {
            if !out.contains(&it) {
                out.push(it);
            }
        }
        out
    }
}

/// One (grid point, window sign, branch, convention) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub f56: f64,
    pub ft56: f64,
    pub ft3: f64,
    pub ftp: f64,
    pub ftm: f64,
    /// The `±` of the window.
    pub sign: Sign,
    pub branch: Branch,
    /// B records only.
    pub convention: Option<Convention>,
    pub window_lower: f64,
    pub window_upper: f64,
    /// Integers of the n range strictly inside the window.
    pub normalizable: Vec<i64>,
    pub degenerate: bool,
    pub ftp_zero: bool,
    /// Set when `quad_check` ran: window verdict equals quadrature for every n.
    pub agree: Option<bool>,
    /// Set when `quad_check` ran: integers for which the quadrature converges.
    pub quadrature_normalizable: Option<Vec<i64>>,
    /// Set when `verify` ran: largest relative residual over all n.
    pub max_residual: Option<f64>,
    pub error: Option<String>,
}

pub const RECORD_FIELDS: [&str; 17] = [
    "f56",
    "ft56",
    "ft3",
    "ftp",
    "ftm",
    "sign",
    "branch",
    "convention",
    "window_lower",
    "window_upper",
    "normalizable",
    "degenerate",
    "ftp_zero",
    "agree",
    "quadrature_normalizable",
    "max_residual",
    "error",
];

struct Extras {
    agree: Option<bool>,
    quadrature_normalizable: Option<Vec<i64>>,
    max_residual: Option<f64>,
}

fn quad_reconcile(c: &CouplingParams, window: &WindowInterval, g: &GridSpec) -> Result<(bool, Vec<i64>)> {
    let mode_sign = window_sign_for_mode(window.branch, window.sign);
    let mut finite = Vec::new();
    for n in g.n_min..=g.n_max {
        let spec = ProfileSpec::new(c.with_n(n as f64)?, window.branch, mode_sign);
        if classify_profile(&spec, CLASSIFY_QUAD_TOL, &QuadOptions::default())?.quadrature.is_finite() {
            finite.push(n);
        }
    }
    Ok((finite == window.integers_inside(g.n_min, g.n_max), finite))
}

fn residual_check(c: &CouplingParams, window: &WindowInterval, g: &GridSpec) -> Result<f64> {
    let mode_sign = window_sign_for_mode(window.branch, window.sign);
    let opts = VerifyOptions {
        propagate: false,
        ..VerifyOptions::default()
    };
    let grid = default_grid(g.rho0);
    let mut worst: f64 = 0.0;
    for n in g.n_min..=g.n_max {
        let cn = c.with_n(n as f64)?;
        let rep = verify_mode(&cn, eigen_mode(&cn, mode_sign), &grid, SCAN_VERIFY_TOL, &opts)?;
        for ch in rep.checks.iter().filter(|ch| ch.branch == window.branch) {
            worst = worst.max(ch.max_residual);
        }
    }
    Ok(worst)
}

fn extras(c: &CouplingParams, window: &WindowInterval, g: &GridSpec) -> Result<Extras> {
    let (agree, quadrature_normalizable) = if g.quad_check {
        let (a, q) = quad_reconcile(c, window, g)?;
        (Some(a), Some(q))
    } else {
        (None, None)
    };
    let max_residual = if g.verify {
        Some(residual_check(c, window, g)?)
    } else {
        None
    };
    Ok(Extras {
        agree,
        quadrature_normalizable,
        max_residual,
    })
}

fn point_records(p: [f64; 5], g: &GridSpec, signs: &[Sign], conventions: &[Convention]) -> Vec<ScanRecord> {
    let [f56, ft56, ft3, ftp, ftm] = p;
    let params = CouplingParams::new(f56, ft56, ft3, ftp, ftm, 0.0, g.rho0);
    let mut windows = Vec::new();
    for &sign in signs {
        windows.push((sign, Branch::A, None));
        for &conv in conventions {
            windows.push((sign, Branch::B, Some(conv)));
        }
    }
    windows
        .into_iter()
        .map(|(sign, branch, convention)| {
            let base = ScanRecord {
                f56,
                ft56,
                ft3,
                ftp,
                ftm,
                sign,
                branch,
                convention,
                window_lower: f64::NAN,
                window_upper: f64::NAN,
                normalizable: Vec::new(),
                degenerate: false,
                ftp_zero: ftp == 0.0,
                agree: None,
                quadrature_normalizable: None,
                max_residual: None,
                error: None,
            };
            let c = match &params {
                Ok(c) => c,
                Err(e) => {
                    return ScanRecord {
                        error: Some(e.to_string()),
                        ..base
                    }
                }
            };
            let window = match convention {
                None => window_a(c, sign),
                Some(conv) => window_b(c, sign, conv),
            };
            let degenerate = is_degenerate(c) || discriminant(c) == 0.0;
            let base = ScanRecord {
                window_lower: window.lower,
                window_upper: window.upper,
                normalizable: window.integers_inside(g.n_min, g.n_max),
                degenerate,
                ..base
            };
            match extras(c, &window, g) {
                Ok(x) => ScanRecord {
                    agree: x.agree,
                    quadrature_normalizable: x.quadrature_normalizable,
                    max_residual: x.max_residual,
                    ..base
                },
                Err(e) => ScanRecord {
                    error: Some(e.to_string()),
                    ..base
                },
            }
        })
        .collect()
}

/// Scans the grid in parallel. Record order is independent of scheduling.
pub fn scan(g: &GridSpec) -> Result<Vec<ScanRecord>> {
    scan_with(g, true)
}

/// Records are ordered by grid point (lexicographic, `f56` slowest), then
/// sign as listed, then branch A followed by one B record per convention.
pub fn scan_with(g: &GridSpec, parallel: bool) -> Result<Vec<ScanRecord>> {
    g.validate()?;
    let signs = GridSpec::dedup(&g.signs);
    let conventions = GridSpec::dedup(&g.conventions);
    let points = g.points();
    let nested: Vec<Vec<ScanRecord>> = if parallel {
        points
            .par_iter()
            .map(|&p| point_records(p, g, &signs, &conventions))
            .collect()
    } else {
        points
            .iter()
            .map(|&p| point_records(p, g, &signs, &conventions))
            .collect()
    };
    Ok(nested.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    PlotColumns,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "plot_columns" | "plot" => Ok(Self::PlotColumns),
            other => Err(format!("unknown format `{other}` (expected csv, json or plot_columns)")),
        }
    }
}

/// Fixed-point rendering with 17 significant digits; scientific notation
/// outside `1e-5 <= |x| < 1e17`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent marker") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let decimals = (16 - exp) as usize;
    format!("{x:.decimals$}")
}

fn join_ints(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(";")
}

fn csv_row(r: &ScanRecord) -> [String; 17] {
    let opt = |o: Option<String>| o.unwrap_or_default();
    [
        format_float(r.f56),
        format_float(r.ft56),
        format_float(r.ft3),
        format_float(r.ftp),
        format_float(r.ftm),
        r.sign.to_string(),
        r.branch.to_string(),
        opt(r.convention.map(|c| c.to_string())),
        format_float(r.window_lower),
        format_float(r.window_upper),
        join_ints(&r.normalizable),
        r.degenerate.to_string(),
        r.ftp_zero.to_string(),
        opt(r.agree.map(|a| a.to_string())),
        opt(r.quadrature_normalizable.as_deref().map(join_ints)),
        opt(r.max_residual.map(format_float)),
        opt(r.error.clone()),
    ]
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes the records. `PlotColumns` emits `(record index, number of
/// normalizable modes)`; use [`write_series`] for radial profiles.
pub fn write_records<W: Write>(records: &[ScanRecord], format: OutputFormat, mut out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(RECORD_FIELDS).map_err(csv_error)?;
            for r in records {
                w.write_record(csv_row(r)).map_err(csv_error)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
        OutputFormat::PlotColumns => {
            let series: Vec<(f64, f64)> = records
                .iter()
                .enumerate()
                .map(|(i, r)| (i as f64, r.normalizable.len() as f64))
                .collect();
            write_series(&series, ("index", "normalizable_count"), out)?;
        }
    }
    Ok(())
}

/// Two whitespace-separated columns under a `#` header line.
pub fn write_series<W: Write>(points: &[(f64, f64)], labels: (&str, &str), mut out: W) -> Result<()> {
    writeln!(out, "# {} {}", labels.0, labels.1)?;
    for (x, y) in points {
        writeln!(out, "{x:.16e} {y:.16e}")?;
    }
    Ok(())
}

/// Scalar extracted from a profile for plotting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileQuantity {
    /// `sqrt(|I|^2 + |II|^2)`.
    Modulus,
    ReI,
    ImI,
    ReII,
    ImII,
    /// Norm integrand `rho f^-2 (|I|^2 + |II|^2)`.
    Integrand,
}

impl ProfileQuantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Modulus => "modulus",
            Self::ReI => "re_i",
            Self::ImI => "im_i",
            Self::ReII => "re_ii",
            Self::ImII => "im_ii",
            Self::Integrand => "integrand",
        }
    }
}

impl std::str::FromStr for ProfileQuantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "modulus" => Ok(Self::Modulus),
            "re_i" => Ok(Self::ReI),
            "im_i" => Ok(Self::ImI),
            "re_ii" => Ok(Self::ReII),
            "im_ii" => Ok(Self::ImII),
            "integrand" => Ok(Self::Integrand),
            other => Err(format!(
                "unknown quantity `{other}` (expected modulus, re_i, im_i, re_ii, im_ii or integrand)"
            )),
        }
    }
}

/// `(rho, quantity)` pairs of `spec` over `grid`.
pub fn profile_series(spec: &ProfileSpec, grid: &[f64], q: ProfileQuantity) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&rho| {
            let (p1, p2) = spec.eval(rho)?;
            let v = match q {
                ProfileQuantity::Modulus => (p1.norm_sqr() + p2.norm_sqr()).sqrt(),
                ProfileQuantity::ReI => p1.re,
                ProfileQuantity::ImI => p1.im,
                ProfileQuantity::ReII => p2.re,
                ProfileQuantity::ImII => p2.im,
                ProfileQuantity::Integrand => norm_integrand(spec, rho)?,
            };
            Ok((rho, v))
        })
        .collect()
}
