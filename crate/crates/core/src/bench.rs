//! Experiment harness: configuration, convergence sweeps, rate fits and reports.
//!
//! Configuration files are flat `key = value` text with `#` comments. Every key can
//! also be set with [`ExperimentConfig::set`], which is how command-line flags override
//! file values.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{recovery_error, reference_weighted_integral, spline_weighted_norm, CorpusFunction, Domain, RealFunction};
use crate::blend::{apply_p_bar, apply_p_truncated};
use crate::error::{Error, Result};
use crate::integrate::IntegrationSpec;
use crate::quadrature::{build_rule, integrate, RuleKind};
use crate::quasi::{apply_q_bar, apply_q_truncated, OperatorConfig};
use crate::rates::{loglog_slope, quadrature_exponent_d, recovery_exponent, recovery_exponent_d, saturation_exponent};
use crate::space::{
    fooling_resolution, fooling_spline, format_exponent, ratio_ensemble, write_ensemble_csv, Boundedness, EnsembleSpec,
    RatioKind, RatioSummary,
};
use crate::spline::SplineFunction;
use crate::tensor::{apply_pd_truncated, apply_qd_truncated, integrate_d, recovery_error_d, MultiFunction, Separable};
use crate::weight::FreudWeight;

/// What a convergence run measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Q,
    P,
    QBar,
    PBar,
    QuadQ,
    QuadP,
}

impl OperatorKind {
    pub fn is_quadrature(self) -> bool {
        matches!(self, OperatorKind::QuadQ | OperatorKind::QuadP)
    }

    /// Rule kind generated by this operator.
    pub fn rule_kind(self) -> RuleKind {
        match self {
            OperatorKind::Q | OperatorKind::QBar | OperatorKind::QuadQ => RuleKind::Q,
            OperatorKind::P | OperatorKind::PBar | OperatorKind::QuadP => RuleKind::P,
        }
    }

    /// The quadrature counterpart, for `integrate`.
    pub fn as_quadrature(self) -> Self {
        match self.rule_kind() {
            RuleKind::Q => OperatorKind::QuadQ,
            RuleKind::P => OperatorKind::QuadP,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Q => "Q",
            OperatorKind::P => "P",
            OperatorKind::QBar => "Qbar",
            OperatorKind::PBar => "Pbar",
            OperatorKind::QuadQ => "quad-Q",
            OperatorKind::QuadP => "quad-P",
        })
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "q" => Ok(OperatorKind::Q),
            "p" => Ok(OperatorKind::P),
            "qbar" => Ok(OperatorKind::QBar),
            "pbar" => Ok(OperatorKind::PBar),
            "quad-q" | "quadq" => Ok(OperatorKind::QuadQ),
            "quad-p" | "quadp" => Ok(OperatorKind::QuadP),
            other => Err(Error::Config(format!("unknown operator '{other}'; expected Q, P, Qbar, Pbar, quad-Q or quad-P"))),
        }
    }
}

/// Parses `1`, `2.5`, `inf` or `infinity`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.as_str() {
        "inf" | "infinity" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| Error::Config(format!("bad exponent '{s}'")))?,
    };
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("exponent must lie in [1, inf], got {s}")))
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub ell: usize,
    pub op: OperatorKind,
    pub p: f64,
    pub q: f64,
    pub r: u32,
    pub d: usize,
    pub nmin: usize,
    pub nmax: usize,
    /// Corpus function; `None` picks the extremal witness for `(r, p, q)`.
    pub function: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Overrides the constructive truncation parameter.
    pub rho: Option<f64>,
    /// Fixed resolution for `rule export`.
    pub m: Option<usize>,
    /// Allowed gap between fitted slope and predicted rate.
    pub tolerance: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lambda: 2.0,
            a: 0.5,
            b: 0.0,
            ell: 2,
            op: OperatorKind::Q,
            p: 2.0,
            q: 2.0,
            r: 2,
            d: 1,
            nmin: 33,
            nmax: 4097,
            function: None,
            seed: 0,
            out: None,
            rho: None,
            m: None,
            tolerance: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for key '{key}'")))
}

impl ExperimentConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "lambda" => self.lambda = parse(key, value)?,
            "a" => self.a = parse(key, value)?,
            "b" => self.b = parse(key, value)?,
            "ell" | "l" => self.ell = parse(key, value)?,
            "op" | "operator" => self.op = value.parse()?,
            "p" => self.p = parse_exponent(value)?,
            "q" => self.q = parse_exponent(value)?,
            "r" => self.r = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "nmin" => self.nmin = parse(key, value)?,
            "nmax" => self.nmax = parse(key, value)?,
            "function" | "f" => self.function = Some(value.to_string()),
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "rho" => self.rho = Some(parse(key, value)?),
            "m" => self.m = Some(parse(key, value)?),
            "tol" | "tolerance" => self.tolerance = Some(parse(key, value)?),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got '{raw}'", i + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// The configuration as `key = value` lines, readable by [`ExperimentConfig::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "lambda = {}\na = {}\nb = {}\nell = {}\nop = {}\np = {}\nq = {}\nr = {}\nd = {}\nnmin = {}\nnmax = {}\nseed = {}\n",
            self.lambda,
            self.a,
            self.b,
            self.ell,
            self.op,
            format_exponent(self.p),
            format_exponent(self.q),
            self.r,
            self.d,
            self.nmin,
            self.nmax,
            self.seed
        );
        if let Some(f) = &self.function {
            s += &format!("function = {f}\n");
        }
        if let Some(o) = &self.out {
            s += &format!("out = {}\n", o.display());
        }
        if let Some(rho) = self.rho {
            s += &format!("rho = {rho}\n");
        }
        if let Some(m) = self.m {
            s += &format!("m = {m}\n");
        }
        if let Some(t) = self.tolerance {
            s += &format!("tol = {t}\n");
        }
        s
    }

    pub fn weight(&self) -> Result<FreudWeight> {
        Ok(FreudWeight::new(self.lambda, self.a)?.with_offset(self.b))
    }

    pub fn operator_config(&self) -> Result<OperatorConfig> {
        let cfg = OperatorConfig::new(self.weight()?, self.ell)?;
        match self.rho {
            Some(rho) => cfg.with_rho(rho),
            None => Ok(cfg),
        }
    }

    /// Predicted decay exponent of the measured error in the number of samples.
    pub fn predicted_exponent(&self) -> f64 {
        let r = self.r as f64;
        if self.op.is_quadrature() {
            quadrature_exponent_d(r, self.lambda, self.p, self.d)
        } else if self.d == 1 {
            recovery_exponent(r, self.lambda, self.p, self.q)
        } else {
            recovery_exponent_d(r, self.lambda, self.p, self.q, self.d)
        }
    }

    pub fn slope_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(if self.d == 1 { 0.25 } else { 0.3 })
    }

    /// Checks the hypotheses under which a rate is predicted.
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::UnsupportedDimension(self.d));
        }
        if self.r == 0 || self.r as usize > 2 * self.ell {
            return Err(Error::Config(format!("r = {} must lie in 1..={}", self.r, 2 * self.ell)));
        }
        if self.nmin > self.nmax {
            return Err(Error::Config(format!("nmin = {} exceeds nmax = {}", self.nmin, self.nmax)));
        }
        if self.d > 1 && matches!(self.op, OperatorKind::QBar | OperatorKind::PBar) {
            return Err(Error::Config(format!("{} is univariate only", self.op)));
        }
        let e = self.predicted_exponent();
        if !(e > 0.0) {
            let what = if self.op.is_quadrature() { "quadrature" } else { "recovery" };
            return Err(Error::Config(format!("predicted {what} exponent {e} is not positive for this (r, p, q, d)")));
        }
        self.weight()?;
        Ok(())
    }

    /// Univariate test function: the named corpus entry, or the extremal witness
    /// (`edge` for recovery with `p < q`, `growth` otherwise).
    pub fn corpus_function(&self) -> Result<CorpusFunction> {
        let w = self.weight()?;
        let name = match &self.function {
            Some(f) => f.clone(),
            None if self.op.is_quadrature() || self.p >= self.q => "growth".into(),
            None => "edge".into(),
        };
        CorpusFunction::by_name(&name, self.r, self.p, &w)
    }

    /// The geometric n-grid `nmin, 2(nmin - 1) + 1, ...` up to `nmax`.
    pub fn n_grid(&self) -> Vec<usize> {
        n_grid(self.nmin, self.nmax)
    }
}

/// `n_k = (nmin - 1) 2^k + 1` for `n_k <= nmax` (33, 65, ..., 4097 by default).
pub fn n_grid(nmin: usize, nmax: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = nmin.max(2);
    while n <= nmax {
        out.push(n);
        n = 2 * (n - 1) + 1;
    }
    out
}

/// Largest `m >= 1` with `[2(m + l + j0) - 1]^d <= n`.
pub fn n_to_m(n: usize, ell: usize, j0: usize, d: usize) -> Result<usize> {
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let min_extent = 2 * (ell + j0) + 1;
    let min = min_extent.pow(d as u32);
    if n < min {
        return Err(Error::BudgetTooSmall { n, min });
    }
    // Largest extent e with e^d <= n.
    let mut e = (n as f64).powf(1.0 / d as f64).floor() as usize + 1;
    while e.pow(d as u32) > n {
        e -= 1;
    }
    Ok((e + 1) / 2 - ell - j0)
}

/// Resolution and sample count used for budget `n`. `Qbar`/`Pbar` read only `2m + 1`
/// values and need `m >= 2l`.
fn budget(op: OperatorKind, n: usize, cfg: &OperatorConfig, d: usize) -> Result<(usize, usize)> {
    match op {
        OperatorKind::QBar | OperatorKind::PBar => {
            let min = 4 * cfg.ell() + 1;
            if n < min {
                return Err(Error::BudgetTooSmall { n, min });
            }
            let m = (n - 1) / 2;
            Ok((m, 2 * m + 1))
        }
        _ => {
            let m = n_to_m(n, cfg.ell(), cfg.j0(), d)?;
            Ok((m, cfg.sample_count(m).pow(d as u32)))
        }
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub m: usize,
    /// Samples actually used, never above `n`.
    pub samples: usize,
    /// Measured error, or the failure message of this cell.
    pub error: std::result::Result<f64, String>,
    pub seconds: f64,
}

/// Least-squares fit on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual of `ln error`.
    pub residual: f64,
    /// Number of points used.
    pub points: usize,
}

/// Slope of `ln error` against `ln n` over the largest `ceil(len/2)` values of `n`.
pub fn fit_rate(pairs: &[(usize, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::TooFewPoints(pairs.len()));
    }
    if let Some(&(n, error)) = pairs.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::ExactReproduction { n, error });
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by_key(|p| p.0);
    let keep = sorted.len().div_ceil(2).max(2);
    let tail: Vec<(f64, f64)> = sorted[sorted.len() - keep..].iter().map(|(n, e)| (*n as f64, *e)).collect();
    let slope = loglog_slope(&tail).ok_or(Error::TooFewPoints(tail.len()))?;
    let k = tail.len() as f64;
    let intercept = tail.iter().map(|(n, e)| e.ln() - slope * n.ln()).sum::<f64>() / k;
    let residual = (tail
        .iter()
        .map(|(n, e)| (e.ln() - intercept - slope * n.ln()).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(RateFit {
        slope,
        intercept,
        residual,
        points: tail.len(),
    })
}

/// Outcome of a convergence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub config: ExperimentConfig,
    pub function: String,
    pub rows: Vec<RateRow>,
    /// Predicted exponent `e`; errors should decay like `n^{-e}`.
    pub predicted: f64,
    pub fit: std::result::Result<RateFit, String>,
    /// Whether the witness has a declared finite smoothness.
    pub exact_smoothness: bool,
    pub total_seconds: f64,
}

impl RateReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.as_ref().ok().map(|f| f.slope)
    }

    pub fn partial(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_err())
    }

    /// Exact-smoothness witnesses must match `-predicted` within the tolerance; smooth
    /// ones must decay at least that fast.
    pub fn passes(&self) -> bool {
        let tol = self.config.slope_tolerance();
        match self.slope() {
            Some(s) if self.exact_smoothness => (s + self.predicted).abs() <= tol,
            Some(s) => s <= -self.predicted + tol,
            None => false,
        }
    }

    /// No fitted slope steeper than the order saturation `2l(1 - 1/lambda)/d` allows.
    pub fn saturation_ok(&self) -> bool {
        let sat = saturation_exponent(self.config.ell, self.config.lambda) / self.config.d as f64;
        self.slope().is_none_or(|s| s >= -sat - 0.3)
    }

    /// CSV `n,m,error,seconds`; failed cells carry `nan`.
    pub fn write_csv(&self, out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
        writeln!(out, "n,m,error,seconds")?;
        for row in &self.rows {
            writeln!(out, "{},{},{},{:.6}", row.n, row.m, format_error(&row.error), row.seconds)?;
        }
        Ok(())
    }

    /// Two columns `n error`, for gnuplot.
    pub fn write_dat(&self, out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
        writeln!(out, "# n error")?;
        for row in &self.rows {
            if let Ok(e) = row.error {
                writeln!(out, "{} {:.16e}", row.n, e)?;
            }
        }
        Ok(())
    }

    /// `key = value` summary.
    pub fn write_summary(&self, out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
        writeln!(out, "operator = {}", self.config.op)?;
        writeln!(out, "function = {}", self.function)?;
        writeln!(out, "lambda = {}", self.config.lambda)?;
        writeln!(out, "ell = {}", self.config.ell)?;
        writeln!(out, "p = {}", format_exponent(self.config.p))?;
        writeln!(out, "q = {}", format_exponent(self.config.q))?;
        writeln!(out, "r = {}", self.config.r)?;
        writeln!(out, "d = {}", self.config.d)?;
        writeln!(out, "predicted_exponent = {:.6}", self.predicted)?;
        match &self.fit {
            Ok(f) => {
                writeln!(out, "fitted_slope = {:.6}", f.slope)?;
                writeln!(out, "fit_residual = {:.3e}", f.residual)?;
                writeln!(out, "fit_points = {}", f.points)?;
            }
            Err(e) => writeln!(out, "fitted_slope = none ({e})")?,
        }
        writeln!(out, "tolerance = {}", self.config.slope_tolerance())?;
        writeln!(out, "pass = {}", self.passes())?;
        writeln!(out, "saturation_ok = {}", self.saturation_ok())?;
        writeln!(out, "partial = {}", self.partial())?;
        for row in self.rows.iter().filter(|r| r.error.is_err()) {
            writeln!(out, "failure_n{} = {}", row.n, row.error.as_ref().unwrap_err())?;
        }
        writeln!(out, "total_seconds = {:.3}", self.total_seconds)
    }
}

fn format_error(e: &std::result::Result<f64, String>) -> String {
    match e {
        Ok(v) => format!("{v:.16e}"),
        Err(_) => "nan".into(),
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    body(&mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Writes `path` (CSV), `path.summary` and `path.dat`.
pub fn emit_report(report: &RateReport, path: &Path) -> Result<()> {
    write_file(path, |b| report.write_csv(b))?;
    write_file(&path.with_extension("summary"), |b| report.write_summary(b))?;
    write_file(&path.with_extension("dat"), |b| report.write_dat(b))
}

/// Reads back `(n, error)` pairs from an emitted CSV.
pub fn read_report_csv(text: &str) -> Result<Vec<(usize, f64)>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split(',');
            let n = it.next().unwrap_or("");
            let _m = it.next();
            let e = it.next().unwrap_or("");
            Ok((parse("n", n)?, parse("error", e)?))
        })
        .collect()
}

fn measure(config: &ExperimentConfig, cfg: &OperatorConfig, f: &CorpusFunction, m: usize, spec: &IntegrationSpec) -> Result<f64> {
    let w = &cfg.weight;
    let d = config.d;
    if config.op.is_quadrature() {
        let kind = config.op.rule_kind();
        let exact_1d = reference_weighted_integral(f, w, Domain::Real, spec)?;
        if d == 1 {
            let rule = build_rule(kind, m, cfg)?;
            let approx = integrate(&rule, |x: f64| f.eval(x))?;
            Ok((approx - exact_1d).abs())
        } else {
            let fd = Separable::power(f.clone(), d)?;
            let approx = integrate_d(kind, &fd, d, m, cfg)?;
            let exact = exact_1d.powi(d as i32);
            Ok((approx - exact).abs())
        }
    } else if d == 1 {
        let sample = |x: f64| f.eval(x);
        let s: SplineFunction = match config.op {
            OperatorKind::Q => apply_q_truncated(sample, m, cfg)?,
            OperatorKind::P => apply_p_truncated(sample, m, cfg)?,
            OperatorKind::QBar => apply_q_bar(sample, m, cfg)?,
            OperatorKind::PBar => apply_p_bar(sample, m, cfg)?,
            _ => unreachable!(),
        };
        recovery_error(f, &s, config.q, w, spec)
    } else {
        let fd = Separable::power(f.clone(), d)?;
        let s = match config.op {
            OperatorKind::Q => apply_qd_truncated(&fd, d, m, cfg)?,
            _ => apply_pd_truncated(&fd, d, m, cfg)?,
        };
        recovery_error_d(&fd as &dyn MultiFunction, &s, config.q, w, spec)
    }
}

/// Runs the sweep over the n-grid. Cell failures are recorded in their row.
pub fn run_convergence(config: &ExperimentConfig) -> Result<RateReport> {
    config.validate()?;
    let cfg = config.operator_config()?;
    let f = config.corpus_function()?;
    let spec = IntegrationSpec::default();
    let start = Instant::now();
    let mut rows = Vec::new();
    for n in config.n_grid() {
        let t = Instant::now();
        let (m, samples, error) = match budget(config.op, n, &cfg, config.d) {
            Ok((m, samples)) => (m, samples, measure(config, &cfg, &f, m, &spec).map_err(|e| e.to_string())),
            Err(e) => (0, 0, Err(e.to_string())),
        };
        rows.push(RateRow {
            n,
            m,
            samples,
            error,
            seconds: t.elapsed().as_secs_f64(),
        });
    }
    let pairs: Vec<(usize, f64)> = rows.iter().filter_map(|r| r.error.as_ref().ok().map(|e| (r.n, *e))).collect();
    let prefix = if config.d > 1 { format!("{}^{} ", f.description, config.d) } else { String::new() };
    Ok(RateReport {
        config: config.clone(),
        function: if prefix.is_empty() { f.description.clone() } else { prefix.trim().to_string() },
        predicted: config.predicted_exponent(),
        fit: fit_rate(&pairs).map_err(|e| e.to_string()),
        exact_smoothness: f.smoothness.is_some(),
        rows,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Resolutions `nmin, 2 nmin, ...` up to `nmax`, used directly as `m` by `inequalities`.
pub fn m_grid(nmin: usize, nmax: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = nmin.max(1);
    while m <= nmax {
        out.push(m);
        m *= 2;
    }
    out
}

/// Ensemble ratios of every inequality applicable to `(p, q, r)` over `m_grid(nmin, nmax)`.
/// Bernstein uses orders `1..=min(r, 2l - 1)`; Nikol'skii runs when `p != q`.
pub fn run_inequalities(config: &ExperimentConfig) -> Result<Vec<(EnsembleSpec, Vec<RatioSummary>, Boundedness)>> {
    let cfg = config.operator_config()?;
    let spec = IntegrationSpec::default();
    let ms = m_grid(config.nmin, config.nmax);
    if ms.is_empty() {
        return Err(Error::Config(format!("empty m range {}..{}", config.nmin, config.nmax)));
    }
    let mut ensembles = vec![
        EnsembleSpec::new(RatioKind::MarcinkiewiczNode, config.p, config.p, 0, config.seed),
        EnsembleSpec::new(RatioKind::MarcinkiewiczCoeff, config.p, config.p, 0, config.seed),
    ];
    let max_r = (config.r as usize).min(2 * config.ell - 1);
    for r in 1..=max_r {
        ensembles.push(EnsembleSpec::new(RatioKind::Bernstein, config.p, config.p, r, config.seed));
    }
    if config.p != config.q {
        ensembles.push(EnsembleSpec::new(RatioKind::Nikolskii, config.p, config.q, 0, config.seed));
    }
    ensembles
        .into_iter()
        .map(|ens| {
            let rows = ms
                .iter()
                .map(|m| ratio_ensemble(&ens, *m, &cfg, &spec))
                .collect::<Result<Vec<_>>>()?;
            let b = Boundedness::from_summaries(&rows);
            Ok((ens, rows, b))
        })
        .collect()
}

pub fn write_inequalities(results: &[(EnsembleSpec, Vec<RatioSummary>, Boundedness)], out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    let rows: Vec<RatioSummary> = results.iter().flat_map(|(_, rows, _)| rows.iter().cloned()).collect();
    write_ensemble_csv(&rows, out)
}

/// One fooling-spline witness.
#[derive(Debug, Clone, PartialEq)]
pub struct FoolingRow {
    pub n: usize,
    pub m: usize,
    /// `max |phi(x_i)|` over the points.
    pub max_at_points: f64,
    pub sobolev_norm: f64,
    pub lq_norm: f64,
    /// `lq_norm / n^{-r_{lambda,p,q}}`.
    pub scaled: f64,
}

/// `n` points uniform on the truncation interval of the fooling resolution.
pub fn fooling_points(n: usize, cfg: &OperatorConfig, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let l = cfg.grid(fooling_resolution(n, cfg.ell()))?.half_width();
    let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(-l..=l)).collect();
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

fn fooling_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Fooling splines for `n` in `m_grid(nmin, nmax)` with seeded random point sets.
pub fn run_fooling(config: &ExperimentConfig) -> Result<Vec<FoolingRow>> {
    let cfg = config.operator_config()?;
    let spec = IntegrationSpec::default();
    let exponent = recovery_exponent(config.r as f64, config.lambda, config.p, config.q);
    m_grid(config.nmin, config.nmax)
        .into_iter()
        .map(|n| {
            let mut rng = ChaCha8Rng::seed_from_u64(fooling_seed(config.seed, n));
            let pts = fooling_points(n, &cfg, &mut rng)?;
            let phi = fooling_spline(&pts, config.r as usize, config.p, config.q, &cfg, &spec)?;
            let max_at_points = pts.iter().map(|x| phi.eval(*x).abs()).fold(0.0, f64::max);
            let sobolev_norm = crate::analysis::spline_sobolev_norm(&phi, config.r as usize, config.p, &cfg.weight, &spec)?;
            let lq_norm = spline_weighted_norm(&phi, 0, config.q, &cfg.weight, &spec)?;
            Ok(FoolingRow {
                n,
                m: phi.grid().m(),
                max_at_points,
                sobolev_norm,
                lq_norm,
                scaled: lq_norm / (n as f64).powf(-exponent),
            })
        })
        .collect()
}

pub fn write_fooling_csv(rows: &[FoolingRow], out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    writeln!(out, "n,m,max_at_points,sobolev_norm,lq_norm,scaled")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.n, r.m, r.max_at_points, r.sobolev_norm, r.lq_norm, r.scaled
        )?;
    }
    Ok(())
}

/// Resolution for `rule export`: `m` if set, otherwise the budget `nmax`.
pub fn export_resolution(config: &ExperimentConfig) -> Result<usize> {
    match config.m {
        Some(m) => Ok(m),
        None => {
            let cfg = config.operator_config()?;
            n_to_m(config.nmax, cfg.ell(), cfg.j0(), 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_examples() {
        assert_eq!(n_to_m(11, 2, 1, 1).unwrap(), 3);
        assert_eq!(n_to_m(7, 1, 0, 1).unwrap(), 3);
        assert_eq!(n_to_m(121, 2, 1, 2).unwrap(), 3);
        assert_eq!(n_to_m(120, 2, 1, 2).unwrap(), 2);
        assert!(matches!(n_to_m(6, 2, 1, 1), Err(Error::BudgetTooSmall { n: 6, min: 7 })));
        assert!(matches!(n_to_m(100, 2, 1, 4), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn budget_is_monotone_and_respected() {
        let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
        for d in 1..=3 {
            let mut last = 0;
            for n in (7usize.pow(d as u32))..2000 {
                let m = n_to_m(n, 2, 1, d).unwrap();
                assert!(m >= last);
                assert!(cfg.sample_count(m).pow(d as u32) <= n);
                assert!(cfg.sample_count(m + 1).pow(d as u32) > n);
                last = m;
            }
        }
    }

    #[test]
    fn default_grid() {
        assert_eq!(n_grid(33, 4097), vec![33, 65, 129, 257, 513, 1025, 2049, 4097]);
        assert_eq!(m_grid(16, 256), vec![16, 32, 64, 128, 256]);
    }

    #[test]
    fn fit_exact_power_laws() {
        let pairs: Vec<(usize, f64)> = n_grid(33, 4097).iter().map(|n| (*n, 7.0 * (*n as f64).powf(-1.5))).collect();
        assert!((fit_rate(&pairs).unwrap().slope + 1.5).abs() < 1e-10);
        let flat: Vec<(usize, f64)> = pairs.iter().map(|(n, _)| (*n, 3.0)).collect();
        assert!(fit_rate(&flat).unwrap().slope.abs() < 1e-12);
        let sq: Vec<(usize, f64)> = pairs.iter().map(|(n, _)| (*n, 2.0 / (*n as f64 * *n as f64))).collect();
        assert!((fit_rate(&sq).unwrap().slope + 2.0).abs() < 1e-10);
    }

    #[test]
    fn fit_noisy_power_law() {
        let pairs: Vec<(usize, f64)> = (10..40)
            .map(|n| (n, (1.0 + 0.01 * if n % 2 == 0 { 1.0 } else { -1.0 }) / n as f64))
            .collect();
        assert!((fit_rate(&pairs).unwrap().slope + 1.0).abs() < 0.02);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_rate(&[(1, 1.0), (2, 0.5)]), Err(Error::TooFewPoints(2))));
        assert!(matches!(
            fit_rate(&[(1, 1.0), (2, 0.0), (4, 0.1)]),
            Err(Error::ExactReproduction { n: 2, .. })
        ));
    }

    #[test]
    fn config_parsing_and_overrides() {
        let text = "# sweep\nlambda = 3\nop = Pbar\np = inf\nq=1 # trailing\nr = 2\nfunction = growth\n";
        let mut c = ExperimentConfig::from_text(text).unwrap();
        assert_eq!(c.lambda, 3.0);
        assert_eq!(c.op, OperatorKind::PBar);
        assert!(c.p.is_infinite());
        assert_eq!(c.q, 1.0);
        c.set("op", "quad-Q").unwrap();
        assert_eq!(c.op, OperatorKind::QuadQ);
        assert_eq!(ExperimentConfig::from_text(&c.to_text()).unwrap(), c);
        assert!(ExperimentConfig::from_text("bogus = 1").is_err());
        assert!(ExperimentConfig::from_text("lambda 2").is_err());
        assert!(ExperimentConfig::from_text("p = 0.5").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.r = 5;
        assert!(c.validate().is_err());
        c.r = 1;
        c.p = f64::INFINITY;
        c.q = 1.0;
        // r_lambda = 1/2 equals delta = 1/2.
        assert!(c.validate().is_err());
        c.d = 4;
        assert!(matches!(c.validate(), Err(Error::UnsupportedDimension(4))));
    }

    fn synthetic_report(rows: Vec<RateRow>) -> RateReport {
        let pairs: Vec<(usize, f64)> = rows.iter().filter_map(|r| r.error.as_ref().ok().map(|e| (r.n, *e))).collect();
        RateReport {
            config: ExperimentConfig::default(),
            function: "synthetic".into(),
            predicted: 1.0,
            fit: fit_rate(&pairs).map_err(|e| e.to_string()),
            exact_smoothness: true,
            rows,
            total_seconds: 0.0,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = synthetic_report(vec![]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,m,error,seconds\n");
    }

    #[test]
    fn emitted_report_round_trips() {
        let rows: Vec<RateRow> = [33usize, 65, 129]
            .iter()
            .map(|n| RateRow {
                n: *n,
                m: n / 2,
                samples: *n,
                error: Ok(0.3 * (*n as f64).powf(-1.1) * (1.0 + 1e-3 * (*n % 7) as f64)),
                seconds: 0.5,
            })
            .collect();
        let r = synthetic_report(rows);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        emit_report(&r, &path).unwrap();
        let csv = fs::read_to_string(&path).unwrap();
        assert_eq!(csv.lines().count(), 4);
        let back = read_report_csv(&csv).unwrap();
        assert!((fit_rate(&back).unwrap().slope - r.slope().unwrap()).abs() < 1e-12);
        let summary = fs::read_to_string(path.with_extension("summary")).unwrap();
        assert!(summary.contains("predicted_exponent = 1.000000"));
        assert!(summary.contains("pass = "));
        assert_eq!(fs::read_to_string(path.with_extension("dat")).unwrap().lines().count(), 4);
    }

    #[test]
    fn failed_cells_are_flagged() {
        let mut rows: Vec<RateRow> = [33usize, 65, 129, 257]
            .iter()
            .map(|n| RateRow {
                n: *n,
                m: 1,
                samples: 1,
                error: Ok(1.0 / *n as f64),
                seconds: 0.0,
            })
            .collect();
        rows[1].error = Err("boom".into());
        let r = synthetic_report(rows);
        assert!(r.partial());
        let mut buf = Vec::new();
        r.write_summary(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("partial = true") && s.contains("failure_n65 = boom"));
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let c = ExperimentConfig {
            nmin: 17,
            nmax: 65,
            ..Default::default()
        };
        let a = run_convergence(&c).unwrap();
        let b = run_convergence(&c).unwrap();
        let dat = |r: &RateReport| {
            let mut buf = Vec::new();
            r.write_dat(&mut buf).unwrap();
            buf
        };
        assert_eq!(dat(&a), dat(&b));
        assert!(a.rows.iter().all(|r| r.samples <= r.n));
    }
}
