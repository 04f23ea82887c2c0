//! Composite adaptive Gauss-Legendre integration on knot panels plus tail panels.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::weight::FreudWeight;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule; nodes from Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs on `[-1, 1]`.
    pub(crate) fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `int_a^b g`.
    pub fn apply(&self, g: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(mid + half * x);
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise summation in the given order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Numerical integration policy.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationSpec {
    /// Gauss-Legendre points per panel.
    pub points: usize,
    /// Relative accuracy target of the adaptive refinement.
    pub rel_tol: f64,
    /// Per-panel absolute floor on the adaptive tolerance; zero means purely relative.
    pub abs_tol: f64,
    /// Cancellation noise of the integrand, if it is a power of a difference.
    pub roundoff: Option<Roundoff>,
    /// Tail panels stop once the declared integrand bound drops below this.
    pub tail_epsilon: f64,
    /// Maximum bisection depth per panel.
    pub max_depth: usize,
    /// Scan points per knot interval for sup norms.
    pub scan_density: usize,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self {
            points: 16,
            rel_tol: 1e-11,
            abs_tol: 0.0,
            roundoff: None,
            tail_epsilon: 1e-18,
            max_depth: 48,
            scan_density: 64,
        }
    }
}

impl IntegrationSpec {
    /// Same policy with twice the points per panel.
    pub fn doubled(&self) -> Self {
        Self {
            points: 2 * self.points,
            ..self.clone()
        }
    }
}

/// Integrand `|e|^q` where `e` carries absolute rounding noise `delta`. A panel of
/// length `len` whose integral is `I` is then resolved to
/// `q delta I^{(q-1)/q} (len volume)^{1/q}` and no further; `volume` accounts for
/// integrands that are themselves integrals over that much inner volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roundoff {
    pub delta: f64,
    pub q: f64,
    pub volume: f64,
}

impl Roundoff {
    fn bound(&self, integral: f64, len: f64) -> f64 {
        let extent = len.abs() * self.volume;
        if self.q == 1.0 {
            self.delta * extent
        } else {
            self.q * self.delta * integral.abs().powf((self.q - 1.0) / self.q) * extent.powf(1.0 / self.q)
        }
    }
}

/// How the integrand behaves towards infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `|g(x)| <= (scale (1 + |x|)^degree w(x))^power`.
    Polynomial { scale: f64, degree: f64 },
    /// `|g(x)| ~ C |x|^(-decay)` with `decay > 1` (already including any power).
    Algebraic { decay: f64 },
}

/// Where an endpoint singularity sits relative to a panel.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Grading {
    None,
    Left,
    Right,
}

fn coarse_rule<G: Fn(f64) -> f64>(rule: &GaussLegendre, g: &G, panel: &Panel) -> f64 {
    let len = panel.b - panel.a;
    match panel.grading {
        Grading::None => rule.apply(g, panel.a, panel.b),
        Grading::Left => rule.apply(&|u: f64| graded(g, panel.a, len, u), 0.0, 1.0),
        Grading::Right => rule.apply(&|u: f64| graded(g, panel.b, -len, u), 0.0, 1.0),
    }
}

struct Panel {
    a: f64,
    b: f64,
    grading: Grading,
}

/// Integrates `g` over consecutive `knots`, grading panels that touch a point of `singular`.
/// Integrands should already include the weight.
pub(crate) fn integrate_panels<G>(g: &G, knots: &[f64], singular: &[f64], spec: &IntegrationSpec) -> Result<f64>
where
    G: Fn(f64) -> f64 + Sync,
{
    if knots.len() < 2 {
        return Ok(0.0);
    }
    let rule = GaussLegendre::new(spec.points);
    let panels: Vec<Panel> = knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let left = singular.iter().any(|s| *s == w[0]);
            let right = singular.iter().any(|s| *s == w[1]);
            let grading = match (left, right) {
                (true, _) => Grading::Left,
                (false, true) => Grading::Right,
                _ => Grading::None,
            };
            Panel {
                a: w[0],
                b: w[1],
                grading,
            }
        })
        .collect();
    let coarse: Vec<f64> = panels
        .par_iter()
        .map(|p| coarse_rule(&rule, g, p).abs())
        .collect();
    let scale = pairwise_sum(&coarse);
    if scale == 0.0 || !scale.is_finite() {
        if scale.is_finite() {
            return Ok(0.0);
        }
        return Err(Error::NonConvergence {
            a: knots[0],
            b: *knots.last().unwrap(),
            previous: scale,
            last: scale,
        });
    }
    let tol = (spec.rel_tol * scale / panels.len() as f64).max(spec.abs_tol);
    let parts: Vec<Result<f64>> = panels
        .par_iter()
        .map(|p| panel_integral(&rule, g, p, tol, spec))
        .collect();
    let values: Vec<f64> = parts.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&values))
}

/// Exponent of the graded substitution `x = a + (b - a) u^k` next to singular points.
const GRADING_POWER: i32 = 12;

/// Integrand in the graded variable. Points that round onto the singular end are
/// dropped, since `g` cannot be evaluated there.
#[inline]
fn graded<G: Fn(f64) -> f64>(g: &G, end: f64, len: f64, u: f64) -> f64 {
    let k = GRADING_POWER;
    let x = end + len * u.powi(k);
    if x == end {
        return 0.0;
    }
    g(x) * len.abs() * k as f64 * u.powi(k - 1)
}

/// Adaptive integral over one panel. Graded panels are integrated in the substituted
/// variable, where a fixed per-leaf tolerance is used because the refinement only
/// deepens towards the singular end.
fn panel_integral<G: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    g: &G,
    panel: &Panel,
    tol: f64,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let len = panel.b - panel.a;
    let k = GRADING_POWER;
    let ctl = |halve| Control {
        halve,
        max_depth: spec.max_depth,
        roundoff: spec.roundoff,
    };
    match panel.grading {
        Grading::None => {
            let whole = rule.apply(g, panel.a, panel.b);
            adapt(rule, g, panel.a, panel.b, whole, tol, 0, &ctl(true), &|a, b| b - a)
        }
        Grading::Left => {
            let gu = |u: f64| graded(g, panel.a, len, u);
            let whole = rule.apply(&gu, 0.0, 1.0);
            adapt(rule, &gu, 0.0, 1.0, whole, tol, 0, &ctl(false), &|a, b| len * (b.powi(k) - a.powi(k)))
        }
        Grading::Right => {
            let gu = |u: f64| graded(g, panel.b, -len, u);
            let whole = rule.apply(&gu, 0.0, 1.0);
            adapt(rule, &gu, 0.0, 1.0, whole, tol, 0, &ctl(false), &|a, b| len * (b.powi(k) - a.powi(k)))
        }
    }
}

struct Control {
    halve: bool,
    max_depth: usize,
    roundoff: Option<Roundoff>,
}

/// Bisection until two-level estimates agree to `tol` or to the rounding noise.
/// `x_len` maps a subinterval to its length in the original variable.
#[allow(clippy::too_many_arguments)]
fn adapt<G: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    g: &G,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    ctl: &Control,
    x_len: &dyn Fn(f64, f64) -> f64,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.apply(g, a, mid);
    let right = rule.apply(g, mid, b);
    let refined = left + right;
    let diff = (refined - whole).abs();
    let noise = ctl.roundoff.map_or(0.0, |r| r.bound(refined, x_len(a, b)));
    if diff <= tol.max(noise) || !(diff > 0.0) || mid <= a || mid >= b {
        return Ok(refined);
    }
    if depth >= ctl.max_depth {
        return Err(Error::NonConvergence {
            a,
            b,
            previous: whole,
            last: refined,
        });
    }
    let sub_tol = if ctl.halve { 0.5 * tol } else { tol };
    let l = adapt(rule, g, a, mid, left, sub_tol, depth + 1, ctl, x_len)?;
    let r = adapt(rule, g, mid, b, right, sub_tol, depth + 1, ctl, x_len)?;
    Ok(l + r)
}

/// `int_start^inf g` for `start >= 0`, panel by panel, for integrands that decay
/// like a Freud weight (to the power `power`) or algebraically.
pub(crate) fn integrate_tail<G>(
    g: &G,
    start: f64,
    tail: Tail,
    power: f64,
    w: &FreudWeight,
    interior_scale: f64,
    spec: &IntegrationSpec,
) -> Result<f64>
where
    G: Fn(f64) -> f64 + Sync,
{
    match tail {
        Tail::Polynomial { scale, degree } => {
            let bound = |x: f64| (scale * (1.0 + x).powf(degree)).powf(power) * (power * w.ln_eval(x)).exp();
            let mut x = start;
            let mut panels = vec![x];
            // Panels sized to the local decay length of w^power.
            for _ in 0..100_000 {
                if bound(x) < spec.tail_epsilon {
                    break;
                }
                let decay = power * w.a() * w.lambda() * x.max(1.0).powf(w.lambda() - 1.0);
                let width = (2.0 / decay).min(1.0);
                x += width;
                panels.push(x);
            }
            integrate_panels(g, &panels, &[], spec)
        }
        Tail::Algebraic { decay } => {
            if decay <= 1.0 {
                return Err(Error::NonConvergence {
                    a: start,
                    b: f64::INFINITY,
                    previous: f64::INFINITY,
                    last: f64::INFINITY,
                });
            }
            let rule = GaussLegendre::new(spec.points);
            let ratio = 2f64.powf(1.0 - decay);
            let mut a = start;
            let mut b = start.max(1.0) * 2.0;
            let mut parts = Vec::new();
            let mut previous = f64::NAN;
            for _ in 0..400 {
                let whole = rule.apply(g, a, b);
                let tol = spec.rel_tol * (interior_scale.abs() + whole.abs()) * 1e-2;
                let ctl = Control {
                    halve: true,
                    max_depth: spec.max_depth,
                    roundoff: None,
                };
                let v = adapt(&rule, g, a, b, whole, tol.max(f64::MIN_POSITIVE), 0, &ctl, &|a, b| b - a)?;
                parts.push(v);
                let acc = pairwise_sum(&parts);
                // Geometric remainder of the asymptotic power law.
                let estimate = acc + v * ratio / (1.0 - ratio);
                if (estimate - previous).abs() <= spec.rel_tol * 1e-2 * (interior_scale.abs() + estimate.abs()) {
                    return Ok(estimate);
                }
                previous = estimate;
                a = b;
                b *= 2.0;
            }
            Err(Error::NonConvergence {
                a: start,
                b,
                previous,
                last: pairwise_sum(&parts),
            })
        }
    }
}

/// Splits each panel at sign changes of `e`, found by scanning `density + 1` points
/// and bisecting.
pub(crate) fn split_at_roots<E: Fn(f64) -> f64 + Sync>(e: &E, knots: &[f64], density: usize) -> Vec<f64> {
    let pieces: Vec<Vec<f64>> = knots
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mut out = vec![a];
            let mut prev_x = a;
            let mut prev = e(a);
            for i in 1..=density {
                let x = if i == density { b } else { a + (b - a) * i as f64 / density as f64 };
                let v = e(x);
                if prev != 0.0 && v != 0.0 && (prev < 0.0) != (v < 0.0) {
                    let (mut lo, mut hi, mut flo) = (prev_x, x, prev);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        let fm = e(mid);
                        if (fm < 0.0) == (flo < 0.0) && fm != 0.0 {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
                            break;
                        }
                    }
                    let root = 0.5 * (lo + hi);
                    if root > *out.last().unwrap() && root < b {
                        out.push(root);
                    }
                }
                prev_x = x;
                prev = v;
            }
            out
        })
        .collect();
    let mut all: Vec<f64> = pieces.into_iter().flatten().collect();
    all.push(*knots.last().unwrap());
    all.dedup();
    all
}

/// `max |g|` over a dense scan of each panel, including all knots.
pub(crate) fn scan_max<G: Fn(f64) -> f64 + Sync>(g: &G, knots: &[f64], density: usize) -> f64 {
    knots
        .par_windows(2)
        .map(|w| {
            (0..=density)
                .map(|i| {
                    let x = if i == density { w[1] } else { w[0] + (w[1] - w[0]) * i as f64 / density as f64 };
                    g(x).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Sorted, deduplicated union of point sets restricted to `[lo, hi]`, with both ends.
pub(crate) fn merge_knots(lo: f64, hi: f64, sets: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = vec![lo, hi];
    for s in sets {
        all.extend(s.iter().copied().filter(|x| *x > lo && *x < hi));
    }
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Uniform panels of width at most `width` between `lo` and `hi`.
pub(crate) fn uniform_knots(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    let n = ((hi - lo) / width).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect()
}
