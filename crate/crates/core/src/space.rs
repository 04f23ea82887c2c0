//! The spline space `S_{rho,m}` of truncated B-spline sums, its discrete weighted norms,
//! empirical Marcinkiewicz / Nikol'skii / Bernstein ratios, and the fooling spline that
//! vanishes on a given point set.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{abs_pow, spline_sobolev_norm, spline_weighted_norm};
use crate::error::{Error, Result};
use crate::integrate::{pairwise_sum, IntegrationSpec};
use crate::quasi::OperatorConfig;
use crate::rates::{delta, loglog_slope, r_lambda};
use crate::spline::SplineFunction;
use crate::weight::{FreudWeight, RecoveryGrid};

/// `phi = sum_{|s| <= m-l} b_s M(x/h - s)`, supported in `[-rho a_m, rho a_m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpaceElement {
    spline: SplineFunction,
    ell: usize,
    weight: FreudWeight,
}

impl SplineSpaceElement {
    pub fn new(coeffs: &[f64], m: usize, cfg: &OperatorConfig) -> Result<Self> {
        Ok(Self {
            spline: make_spline(coeffs, m, cfg)?,
            ell: cfg.ell(),
            weight: cfg.weight,
        })
    }

    pub fn spline(&self) -> &SplineFunction {
        &self.spline
    }

    pub fn grid(&self) -> &RecoveryGrid {
        self.spline.grid()
    }

    pub fn weight(&self) -> &FreudWeight {
        &self.weight
    }

    pub fn m(&self) -> usize {
        self.grid().m()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `b_s` for `|s| <= m - l`.
    pub fn coefficients(&self) -> &[f64] {
        self.spline.coefficients()
    }

    /// `phi(x_s)` for `|s| <= m`.
    pub fn node_values(&self) -> Vec<f64> {
        let m = self.m() as i64;
        (-m..=m).map(|s| self.spline.eval(self.grid().node(s))).collect()
    }

    fn is_zero(&self) -> bool {
        self.coefficients().iter().all(|c| *c == 0.0)
    }
}

/// Dimension `2(m - l) + 1` of `S_{rho,m}`.
pub fn space_dimension(m: usize, ell: usize) -> usize {
    2 * m.saturating_sub(ell) + 1
}

/// Builds the element with coefficients `b_s`, `s = -(m-l)..=m-l` in increasing order.
pub fn make_spline(coeffs: &[f64], m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let ell = cfg.ell();
    if m <= ell {
        return Err(Error::ResolutionTooSmall { m, min: ell + 1 });
    }
    let expected = space_dimension(m, ell);
    if coeffs.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: coeffs.len(),
        });
    }
    let grid = cfg.grid(m)?;
    let first = -((m - ell) as i64);
    Ok(SplineFunction::from_parts(grid, cfg.coefficients.order(), 1, first, coeffs.to_vec()))
}

/// `||(c_s)||_{p,w,n} = (sum_{|s|<=n} |w(x_s) c_s|^p)^{1/p}`, maximum for `p = inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteWeightedNorm {
    pub p: f64,
    pub half_width: usize,
    pub value: f64,
}

/// Discrete norm of `values`, indexed `-n..=n`, at the grid nodes.
pub fn discrete_weighted_norm(values: &[f64], grid: &RecoveryGrid, p: f64, w: &FreudWeight) -> DiscreteWeightedNorm {
    let n = (values.len() as i64 - 1) / 2;
    let weighted = values
        .iter()
        .enumerate()
        .map(|(i, c)| (w.eval(grid.node(i as i64 - n)) * c).abs());
    let value = if p.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        let powered: Vec<f64> = weighted.map(|v| abs_pow(v, p)).collect();
        pairwise_sum(&powered).powf(1.0 / p)
    };
    DiscreteWeightedNorm {
        p,
        half_width: n as usize,
        value,
    }
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn norm_or_zero_error(phi: &SplineSpaceElement, order: usize, p: f64, spec: &IntegrationSpec) -> Result<f64> {
    if phi.is_zero() {
        return Err(Error::ZeroSpline);
    }
    let w = *phi.weight();
    spline_weighted_norm(phi.spline(), order, p, &w, spec)
}

/// `||phi||_{L_{p,w}}` divided by `m^{(1/lambda - 1)/p}` times the discrete norms of the
/// node values and of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcinkiewiczRatios {
    pub node_ratio: f64,
    pub coeff_ratio: f64,
}

pub fn marcinkiewicz_ratios(phi: &SplineSpaceElement, p: f64, spec: &IntegrationSpec) -> Result<MarcinkiewiczRatios> {
    let norm = norm_or_zero_error(phi, 0, p, spec)?;
    let w = *phi.weight();
    let m = phi.m() as f64;
    let scale = m.powf((1.0 / w.lambda() - 1.0) * inv(p));
    let nodes = discrete_weighted_norm(&phi.node_values(), phi.grid(), p, &w).value;
    let coeffs = discrete_weighted_norm(phi.coefficients(), phi.grid(), p, &w).value;
    Ok(MarcinkiewiczRatios {
        node_ratio: norm / (scale * nodes),
        coeff_ratio: norm / (scale * coeffs),
    })
}

/// `||phi||_{L_{q,w}} / (m^{delta_{lambda,p,q}} ||phi||_{L_{p,w}})`.
pub fn nikolskii_ratio(phi: &SplineSpaceElement, p: f64, q: f64, spec: &IntegrationSpec) -> Result<f64> {
    let np = norm_or_zero_error(phi, 0, p, spec)?;
    if p == q {
        return Ok(1.0);
    }
    let nq = norm_or_zero_error(phi, 0, q, spec)?;
    let lambda = phi.weight().lambda();
    Ok(nq / ((phi.m() as f64).powf(delta(lambda, p, q)) * np))
}

/// `||phi^{(r)}||_{L_{p,w}} / (m^{r_lambda} ||phi||_{L_{p,w}})` for `r <= 2l - 1`.
pub fn bernstein_ratio(phi: &SplineSpaceElement, r: usize, p: f64, spec: &IntegrationSpec) -> Result<f64> {
    let order = phi.spline().order();
    if r >= order {
        return Err(Error::DerivativeOrder {
            order: r,
            spline_order: order,
        });
    }
    let base = norm_or_zero_error(phi, 0, p, spec)?;
    if r == 0 {
        return Ok(1.0);
    }
    let deriv = norm_or_zero_error(phi, r, p, spec)?;
    let lambda = phi.weight().lambda();
    Ok(deriv / ((phi.m() as f64).powf(r_lambda(r as f64, lambda)) * base))
}

/// Smallest `m` with `2m + 1 > 4l(n + 1)`.
pub fn fooling_resolution(n: usize, ell: usize) -> usize {
    2 * ell * (n + 1)
}

/// Unit-norm spline in `W^r_{p,w}` vanishing at every point of `points`, built from
/// `M(x/h - 2l s)` bumps on blocks `[2l s - l, 2l s + l]` (grid units) free of points.
///
/// For `p > q` one bump per point is used, each scaled by `1/w` at its centre so every
/// bump carries the same weighted mass; for `p <= q` a single bump closest to the origin.
/// The overall constant is calibrated so the computed `||phi||_{W^r_{p,w}}` equals one.
pub fn fooling_spline(
    points: &[f64],
    r: usize,
    p: f64,
    q: f64,
    cfg: &OperatorConfig,
    spec: &IntegrationSpec,
) -> Result<SplineFunction> {
    let n = points.len().max(1);
    let ell = cfg.ell();
    let m = fooling_resolution(n, ell);
    let grid = cfg.grid(m)?;
    let h = grid.step();
    let block = 2 * ell as i64;
    let max_block = (m - ell) as i64 / block;
    // A point touching a block boundary (up to rounding) rules out both neighbours.
    let mut blocked = vec![false; (2 * max_block + 1) as usize];
    for x in points {
        let u = x / h;
        for s in -max_block..=max_block {
            let centre = (block * s) as f64;
            if (u - centre).abs() <= ell as f64 + 1e-9 {
                blocked[(s + max_block) as usize] = true;
            }
        }
    }
    let mut free: Vec<i64> = (-max_block..=max_block)
        .filter(|s| !blocked[(s + max_block) as usize])
        .collect();
    free.sort_by_key(|s| (s.abs(), *s));
    let needed = if p > q { points.len().max(1) } else { 1 };
    if free.len() < needed {
        return Err(Error::InfeasiblePlacement {
            needed,
            available: free.len(),
        });
    }
    let chosen = &free[..needed];
    let first = -((m - ell) as i64);
    let mut coeffs = vec![0.0; space_dimension(m, ell)];
    for s in chosen {
        let t = block * s;
        let amplitude = if p > q { 1.0 / cfg.weight.eval(t as f64 * h) } else { 1.0 };
        coeffs[(t - first) as usize] = amplitude;
    }
    let raw = SplineFunction::from_parts(grid, cfg.coefficients.order(), 1, first, coeffs);
    let norm = spline_sobolev_norm(&raw, r, p, &cfg.weight, spec)?;
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::ZeroSpline);
    }
    Ok(raw.scaled(1.0 / norm))
}

/// How random ensemble coefficients are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    /// `b_s` i.i.d. uniform on `[-1, 1]`.
    Plain,
    /// `b_s = u_s / w(x_s)`, so `phi w` is of unit size across the whole interval.
    Profiled,
    /// Five consecutive uniform coefficients at a random position, zero elsewhere.
    Localized,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Plain => "plain",
            EnsembleKind::Profiled => "profiled",
            EnsembleKind::Localized => "localized",
        })
    }
}

/// Random element of `S_{rho,m}`.
pub fn random_element(m: usize, cfg: &OperatorConfig, kind: EnsembleKind, rng: &mut impl Rng) -> Result<SplineSpaceElement> {
    let ell = cfg.ell();
    let dim = space_dimension(m, ell);
    let half = (m - ell.min(m)) as i64;
    let grid = cfg.grid(m)?;
    let coeffs: Vec<f64> = match kind {
        EnsembleKind::Plain => (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        EnsembleKind::Profiled => (0..dim)
            .map(|i| rng.random_range(-1.0..=1.0) / cfg.weight.eval(grid.node(i as i64 - half)))
            .collect(),
        EnsembleKind::Localized => {
            let width = 5.min(dim);
            let start = rng.random_range(0..=dim - width);
            let mut c = vec![0.0; dim];
            for v in c.iter_mut().skip(start).take(width) {
                *v = rng.random_range(-1.0..=1.0);
            }
            c
        }
    };
    SplineSpaceElement::new(&coeffs, m, cfg)
}

/// The inequality whose ratio is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatioKind {
    MarcinkiewiczNode,
    MarcinkiewiczCoeff,
    Nikolskii,
    Bernstein,
}

impl fmt::Display for RatioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioKind::MarcinkiewiczNode => "marcinkiewicz_node",
            RatioKind::MarcinkiewiczCoeff => "marcinkiewicz_coeff",
            RatioKind::Nikolskii => "nikolskii",
            RatioKind::Bernstein => "bernstein",
        })
    }
}

impl RatioKind {
    /// Ensemble that probes the extremal behaviour of each inequality: concentrated
    /// splines for Nikol'skii with `p <= q`, weight-profiled ones for `p > q` and for
    /// the Marcinkiewicz equivalences, plain coefficients for Bernstein.
    pub fn default_ensemble(self, p: f64, q: f64) -> EnsembleKind {
        match self {
            RatioKind::Nikolskii if p <= q => EnsembleKind::Localized,
            RatioKind::Nikolskii => EnsembleKind::Profiled,
            RatioKind::MarcinkiewiczNode | RatioKind::MarcinkiewiczCoeff => EnsembleKind::Profiled,
            RatioKind::Bernstein => EnsembleKind::Plain,
        }
    }
}

/// Ratio statistics over one ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub r: usize,
    pub kind: RatioKind,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

/// One ensemble run: `size` random splines at resolution `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub kind: RatioKind,
    pub ensemble: EnsembleKind,
    pub p: f64,
    pub q: f64,
    pub r: usize,
    pub size: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: RatioKind, p: f64, q: f64, r: usize, seed: u64) -> Self {
        Self {
            kind,
            ensemble: kind.default_ensemble(p, q),
            p,
            q,
            r,
            size: 64,
            seed,
        }
    }
}

fn member_seed(seed: u64, m: usize, index: usize) -> u64 {
    seed ^ (m as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (index as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Samples the ratio over the ensemble at resolution `m`.
pub fn ratio_ensemble(
    ens: &EnsembleSpec,
    m: usize,
    cfg: &OperatorConfig,
    spec: &IntegrationSpec,
) -> Result<RatioSummary> {
    let ratios: Vec<Result<f64>> = (0..ens.size)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(member_seed(ens.seed, m, i));
            let phi = random_element(m, cfg, ens.ensemble, &mut rng)?;
            match ens.kind {
                RatioKind::MarcinkiewiczNode => Ok(marcinkiewicz_ratios(&phi, ens.p, spec)?.node_ratio),
                RatioKind::MarcinkiewiczCoeff => Ok(marcinkiewicz_ratios(&phi, ens.p, spec)?.coeff_ratio),
                RatioKind::Nikolskii => nikolskii_ratio(&phi, ens.p, ens.q, spec),
                RatioKind::Bernstein => bernstein_ratio(&phi, ens.r, ens.p, spec),
            }
        })
        .collect();
    let mut values = ratios.into_iter().collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(Error::Config("ensemble size must be positive".into()));
    }
    values.sort_by(f64::total_cmp);
    Ok(RatioSummary {
        m,
        p: ens.p,
        q: ens.q,
        r: ens.r,
        kind: ens.kind,
        min: values[0],
        max: *values.last().unwrap(),
        median: median(&values),
    })
}

/// Spread and drift of the ensemble medians across `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundedness {
    /// `max / min` of the medians.
    pub spread: f64,
    /// Slope of `ln median` against `ln m`.
    pub slope: f64,
}

impl Boundedness {
    pub fn from_summaries(rows: &[RatioSummary]) -> Self {
        let medians: Vec<f64> = rows.iter().map(|r| r.median).collect();
        let hi = medians.iter().copied().fold(f64::MIN, f64::max);
        let lo = medians.iter().copied().fold(f64::MAX, f64::min);
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.median)).collect();
        Self {
            spread: hi / lo,
            slope: loglog_slope(&pts).unwrap_or(0.0),
        }
    }

    /// `max/min < 10` and `|slope| < 0.1`.
    pub fn holds(&self) -> bool {
        self.spread < 10.0 && self.slope.abs() < 0.1
    }
}

pub(crate) fn format_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// CSV `m,p,q,r,ratio_kind,min,max,median`.
pub fn write_ensemble_csv(rows: &[RatioSummary], out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    writeln!(out, "m,p,q,r,ratio_kind,min,max,median")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e}",
            row.m,
            format_exponent(row.p),
            format_exponent(row.q),
            row.r,
            row.kind,
            row.min,
            row.max,
            row.median
        )?;
    }
    Ok(())
}
