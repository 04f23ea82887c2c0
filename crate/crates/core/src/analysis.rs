//! Weighted Lebesgue and Sobolev norms, the reference weighted integral, recovery
//! errors, and the built-in test-function corpus.

use std::fmt;

use crate::error::{Error, Result};
use crate::integrate::{Roundoff, 
    integrate_panels, integrate_tail, merge_knots, pairwise_sum, scan_max, split_at_roots, uniform_knots,
    IntegrationSpec, Tail,
};
use crate::jet::Jet;
use crate::spline::SplineFunction;
use crate::weight::FreudWeight;

/// A real function with optional analytic derivatives, as seen by the norm routines.
pub trait RealFunction: Sync {
    fn eval(&self, x: f64) -> f64;

    /// `f^{(k)}(x) w(x)` for `k = 0..=order`, or `None` when not available.
    fn weighted_derivatives(&self, x: f64, order: usize, w: &FreudWeight) -> Option<Vec<f64>>;

    /// `f(x) w(x)`; override when `f` alone would overflow.
    fn weighted_value(&self, x: f64, w: &FreudWeight) -> f64 {
        self.eval(x) * w.eval(x)
    }

    /// Points where `f` or a derivative is singular.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Growth of `|f^{(k)} w|` at infinity.
    fn tail(&self) -> Tail {
        Tail::Polynomial {
            scale: 1.0,
            degree: 0.0,
        }
    }

    /// True when derivatives come from finite differences.
    fn reduced_accuracy(&self) -> bool {
        false
    }
}

/// Wraps a plain closure; derivatives up to order 2 by central differences (step `1e-5`).
pub struct FiniteDifference<F> {
    f: F,
    tail: Tail,
}

/// Step of the central differences used by [`FiniteDifference`].
pub const FD_STEP: f64 = 1e-5;

impl<F: Fn(f64) -> f64 + Sync> FiniteDifference<F> {
    /// `degree` bounds the polynomial growth of `f` at infinity.
    pub fn new(f: F, degree: f64) -> Self {
        Self {
            f,
            tail: Tail::Polynomial { scale: 1.0, degree },
        }
    }
}

impl<F: Fn(f64) -> f64 + Sync> RealFunction for FiniteDifference<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn weighted_derivatives(&self, x: f64, order: usize, w: &FreudWeight) -> Option<Vec<f64>> {
        if order > 2 {
            return None;
        }
        let h = FD_STEP;
        let (fm, f0, fp) = ((self.f)(x - h), (self.f)(x), (self.f)(x + h));
        let all = [f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)];
        let wx = w.eval(x);
        Some(all[..=order].iter().map(|v| v * wx).collect())
    }

    fn tail(&self) -> Tail {
        self.tail
    }

    fn reduced_accuracy(&self) -> bool {
        true
    }
}

/// Built-in test functions with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusKind {
    /// `exp(-x^2/2)`.
    Gauss,
    /// `x_+^r exp(-x^2/2)`, `r = 1..=4`.
    Kink(u32),
    /// `x_+^beta exp(-x^2/2)` for real `beta > 0`.
    Edge(f64),
    /// `cos(3x) exp(-x^2/4)`.
    Oscil,
    /// Probabilists' Hermite polynomial `He_k`.
    Poly(u32),
    /// `exp(a|x|^lambda) (1 + x^2)^(-gamma/2)` for the weight parameters `(lambda, a)`.
    Growth { lambda: f64, a: f64, gamma: f64 },
}

/// A corpus function together with its declared smoothness.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFunction {
    pub kind: CorpusKind,
    /// Highest derivative order available analytically.
    pub max_order: usize,
    /// Largest `r` with `f` in `W^r_{p,w}` for the exponent it was built for (`None`: all `r`).
    pub smoothness: Option<u32>,
    pub description: String,
}

/// Derivative orders carried by the jets.
const JET_ORDERS: usize = 9;

impl CorpusFunction {
    pub fn gauss() -> Self {
        Self {
            kind: CorpusKind::Gauss,
            max_order: JET_ORDERS - 1,
            smoothness: None,
            description: "exp(-x^2/2)".into(),
        }
    }

    pub fn kink(r: u32) -> Result<Self> {
        if !(1..=4).contains(&r) {
            return Err(Error::Config(format!("kink order must be 1..=4, got {r}")));
        }
        Ok(Self {
            kind: CorpusKind::Kink(r),
            max_order: JET_ORDERS - 1,
            smoothness: Some(r),
            description: format!("x_+^{r} exp(-x^2/2)"),
        })
    }

    /// `x_+^beta exp(-x^2/2)` with `beta = r - 1/p + eps`: in `W^r_{p,w}` but with an
    /// endpoint singularity of exactly that strength.
    pub fn edge(r: u32, p: f64, eps: f64) -> Self {
        let beta = r as f64 - inv(p) + eps;
        Self::edge_beta(beta, r)
    }

    pub fn edge_beta(beta: f64, smoothness: u32) -> Self {
        Self {
            kind: CorpusKind::Edge(beta),
            max_order: JET_ORDERS - 1,
            smoothness: Some(smoothness),
            description: format!("x_+^{beta} exp(-x^2/2)"),
        }
    }

    pub fn oscil() -> Self {
        Self {
            kind: CorpusKind::Oscil,
            max_order: JET_ORDERS - 1,
            smoothness: None,
            description: "cos(3x) exp(-x^2/4)".into(),
        }
    }

    pub fn poly(k: u32) -> Self {
        Self {
            kind: CorpusKind::Poly(k),
            max_order: JET_ORDERS - 1,
            smoothness: None,
            description: format!("He_{k}(x)"),
        }
    }

    /// `exp(a|x|^lambda) (1 + x^2)^(-gamma/2)` with `gamma = r(lambda - 1) + 1/p + eps`:
    /// `f w` decays algebraically and `f^{(r)} w` is barely in `L_p`.
    pub fn growth(r: u32, p: f64, eps: f64, w: &FreudWeight) -> Self {
        let gamma = r as f64 * (w.lambda() - 1.0) + inv(p) + eps;
        Self {
            kind: CorpusKind::Growth {
                lambda: w.lambda(),
                a: w.a(),
                gamma,
            },
            max_order: JET_ORDERS - 1,
            smoothness: Some(r),
            description: format!("exp({}|x|^{}) (1+x^2)^(-{gamma}/2)", w.a(), w.lambda()),
        }
    }

    /// Looks up `gauss`, `oscil`, `kink<r>` / `kink_<r>`, `poly<k>` / `poly_<k>`,
    /// `edge` and `growth` (the last two tuned to `r`, `p`).
    pub fn by_name(name: &str, r: u32, p: f64, w: &FreudWeight) -> Result<Self> {
        let trimmed = name.trim().to_ascii_lowercase();
        let suffix = |prefix: &str| -> Option<u32> {
            trimmed
                .strip_prefix(prefix)
                .map(|s| s.trim_start_matches('_'))
                .and_then(|s| if s.is_empty() { Some(r) } else { s.parse().ok() })
        };
        match trimmed.as_str() {
            "gauss" => Ok(Self::gauss()),
            "oscil" => Ok(Self::oscil()),
            "edge" => Ok(Self::edge(r, p, WITNESS_EPS)),
            "growth" => Ok(Self::growth(r, p, WITNESS_EPS, w)),
            _ => {
                if let Some(k) = suffix("kink") {
                    Self::kink(k)
                } else if let Some(k) = suffix("poly") {
                    Ok(Self::poly(k))
                } else {
                    Err(Error::UnknownFunction(name.to_string()))
                }
            }
        }
    }

    /// Closed-form value split like [`CorpusFunction::jet`]: `f(x) = v e^{ln_scale}`.
    fn value_parts(&self, x: f64) -> (f64, f64) {
        match &self.kind {
            CorpusKind::Gauss => ((-0.5 * x * x).exp(), 0.0),
            CorpusKind::Kink(r) => {
                if x <= 0.0 {
                    (0.0, 0.0)
                } else {
                    (x.powi(*r as i32) * (-0.5 * x * x).exp(), 0.0)
                }
            }
            CorpusKind::Edge(beta) => {
                if x <= 0.0 {
                    (0.0, 0.0)
                } else {
                    (x.powf(*beta) * (-0.5 * x * x).exp(), 0.0)
                }
            }
            CorpusKind::Oscil => ((3.0 * x).cos() * (-0.25 * x * x).exp(), 0.0),
            CorpusKind::Poly(k) => {
                let (mut prev, mut cur) = (1.0, x);
                if *k == 0 {
                    return (1.0, 0.0);
                }
                for n in 1..*k {
                    let next = x * cur - n as f64 * prev;
                    prev = cur;
                    cur = next;
                }
                (cur, 0.0)
            }
            CorpusKind::Growth { lambda, a, gamma } => (1.0, a * x.abs().powf(*lambda) - 0.5 * gamma * x.mul_add(x, 1.0).ln()),
        }
    }

    /// `ln_scale + ln w(x)`. For a growth witness built for `w` the two exponentials
    /// cancel exactly, which matters far out where each exponent is huge.
    fn ln_weighted_scale(&self, x: f64, ln_scale: f64, w: &FreudWeight) -> f64 {
        match &self.kind {
            CorpusKind::Growth { lambda, a, gamma } if *lambda == w.lambda() && *a == w.a() => {
                w.b() - 0.5 * gamma * x.mul_add(x, 1.0).ln()
            }
            _ => ln_scale + w.ln_eval(x),
        }
    }

    /// Jet of `f` at `x`, or of `f / e^{ln_scale}` together with `ln_scale`.
    fn jet(&self, x: f64, len: usize) -> (Jet, f64) {
        let var = Jet::variable(x, len);
        let half_gauss = |scale: f64| (&var * &var).scale(-scale).exp();
        match &self.kind {
            CorpusKind::Gauss => (half_gauss(0.5), 0.0),
            CorpusKind::Kink(r) => {
                if x <= 0.0 {
                    return (Jet::constant(0.0, len), 0.0);
                }
                let mut p = Jet::constant(1.0, len);
                for _ in 0..*r {
                    p = &p * &var;
                }
                (&p * &half_gauss(0.5), 0.0)
            }
            CorpusKind::Edge(beta) => {
                if x <= 0.0 {
                    return (Jet::constant(0.0, len), 0.0);
                }
                (&var.powf(*beta) * &half_gauss(0.5), 0.0)
            }
            CorpusKind::Oscil => {
                let (_, c) = var.scale(3.0).sin_cos();
                (&c * &half_gauss(0.25), 0.0)
            }
            CorpusKind::Poly(k) => {
                let mut prev = Jet::constant(1.0, len);
                if *k == 0 {
                    return (prev, 0.0);
                }
                let mut cur = var.clone();
                for n in 1..*k {
                    let next = &(&var * &cur) - &prev.scale(n as f64);
                    prev = cur;
                    cur = next;
                }
                (cur, 0.0)
            }
            CorpusKind::Growth { lambda, a, gamma } => {
                let abs_pow = if *lambda == 2.0 {
                    &var * &var
                } else if x > 0.0 {
                    var.powf(*lambda)
                } else if x < 0.0 {
                    var.scale(-1.0).powf(*lambda)
                } else {
                    Jet::constant(0.0, len)
                };
                let one_plus = (&var * &var).offset(1.0);
                let g = &abs_pow.scale(*a) - &one_plus.ln().scale(0.5 * gamma);
                let g0 = g.value();
                (g.offset(-g0).exp(), g0)
            }
        }
    }
}

/// Offset above the critical smoothness used by the `edge` and `growth` witnesses.
pub const WITNESS_EPS: f64 = 0.1;

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

impl RealFunction for CorpusFunction {
    fn eval(&self, x: f64) -> f64 {
        let (v, ln_scale) = self.value_parts(x);
        v * ln_scale.exp()
    }

    fn weighted_derivatives(&self, x: f64, order: usize, w: &FreudWeight) -> Option<Vec<f64>> {
        if order > self.max_order {
            return None;
        }
        let (j, ln_scale) = self.jet(x, order + 1);
        let factor = self.ln_weighted_scale(x, ln_scale, w).exp();
        Some(j.derivatives().into_iter().map(|d| d * factor).collect())
    }

    fn weighted_value(&self, x: f64, w: &FreudWeight) -> f64 {
        let (v, ln_scale) = self.value_parts(x);
        v * self.ln_weighted_scale(x, ln_scale, w).exp()
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            CorpusKind::Kink(_) | CorpusKind::Edge(_) => vec![0.0],
            _ => Vec::new(),
        }
    }

    fn tail(&self) -> Tail {
        match &self.kind {
            CorpusKind::Poly(k) => Tail::Polynomial {
                scale: 2f64.powi(*k as i32) * (1..=*k).product::<u32>().max(1) as f64,
                degree: *k as f64,
            },
            CorpusKind::Kink(r) => Tail::Polynomial {
                scale: 1.0,
                degree: *r as f64,
            },
            CorpusKind::Edge(beta) => Tail::Polynomial {
                scale: 1.0,
                degree: beta.ceil(),
            },
            CorpusKind::Growth { gamma, .. } => Tail::Algebraic { decay: *gamma },
            CorpusKind::Gauss | CorpusKind::Oscil => Tail::Polynomial {
                scale: 1.0,
                degree: 0.0,
            },
        }
    }
}

impl fmt::Display for CorpusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Real,
    Interval(f64, f64),
}

/// Half-width of the central block used when no knots are given.
fn central_half_width(w: &FreudWeight) -> f64 {
    (8.0 / w.a()).powf(1.0 / w.lambda())
}

/// Widens a tail bound so it also covers derivatives up to `order`.
fn tail_for_order(tail: Tail, order: usize, w: &FreudWeight) -> Tail {
    match tail {
        Tail::Polynomial { scale, degree } => Tail::Polynomial {
            scale: scale * (1.0 + w.a() * w.lambda()).powi(order as i32),
            degree: degree + order as f64 * (w.lambda() - 1.0),
        },
        Tail::Algebraic { decay } => Tail::Algebraic {
            decay: decay - order as f64 * (w.lambda() - 1.0),
        },
    }
}

fn powered_tail(tail: Tail, power: f64) -> Tail {
    match tail {
        Tail::Algebraic { decay } => Tail::Algebraic { decay: decay * power },
        other => other,
    }
}

/// `int g` over `domain`, where `g` already includes the weight and decays like `tail`
/// raised to `power`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_over<G: Fn(f64) -> f64 + Sync>(
    g: &G,
    domain: Domain,
    inner_knots: &[f64],
    singular: &[f64],
    tail: Tail,
    power: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    match domain {
        Domain::Interval(a, b) => {
            let base = uniform_knots(a, b, 0.25);
            let knots = merge_knots(a, b, &[&base, inner_knots, singular]);
            integrate_panels(g, &knots, singular, spec)
        }
        Domain::Real => {
            let c = inner_knots
                .iter()
                .fold(central_half_width(w), |acc, x| acc.max(x.abs()));
            let base = uniform_knots(-c, c, 0.25);
            let knots = merge_knots(-c, c, &[&base, inner_knots, singular]);
            let middle = integrate_panels(g, &knots, singular, spec)?;
            let t = powered_tail(tail, power);
            let right = integrate_tail(g, c, t, power, w, middle, spec)?;
            let left = integrate_tail(&|x: f64| g(-x), c, t, power, w, middle, spec)?;
            Ok(pairwise_sum(&[left, middle, right]))
        }
    }
}

/// `int f w` over `domain`.
pub fn reference_weighted_integral(
    f: &dyn RealFunction,
    w: &FreudWeight,
    domain: Domain,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let g = |x: f64| f.weighted_value(x, w);
    integrate_over(&g, domain, &[], &f.breakpoints(), f.tail(), 1.0, w, spec)
}

/// Exponent in `[1, inf]`.
fn check_exponent(q: f64) -> Result<()> {
    if q >= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("norm exponent must lie in [1, inf], got {q}")))
    }
}

/// `|v|^q`, exact for `q = 1, 2`.
#[inline]
pub(crate) fn abs_pow(v: f64, q: f64) -> f64 {
    if q == 1.0 {
        v.abs()
    } else if q == 2.0 {
        v * v
    } else {
        v.abs().powf(q)
    }
}

/// `|| f^{(order)} w ||_{L_q(domain)}`.
pub fn weighted_derivative_norm(
    f: &dyn RealFunction,
    order: usize,
    q: f64,
    w: &FreudWeight,
    domain: Domain,
    spec: &IntegrationSpec,
) -> Result<f64> {
    check_exponent(q)?;
    if f.weighted_derivatives(0.0, order, w).is_none() {
        return Err(Error::MissingDerivative(order));
    }
    let value = |x: f64| {
        f.weighted_derivatives(x, order, w)
            .map(|d| d[order])
            .unwrap_or(f64::NAN)
    };
    let singular = f.breakpoints();
    let tail = tail_for_order(f.tail(), order, w);
    if q.is_infinite() {
        return Ok(sup_over(&value, domain, &singular, tail, w, spec));
    }
    let g = |x: f64| abs_pow(value(x), q);
    let knots = root_knots(&value, domain, &singular, w, q, spec);
    let integral = integrate_over(&g, domain, &knots, &singular, tail, q, w, spec)?;
    Ok(integral.powf(1.0 / q))
}

/// Knots for a non-even `q`: sign changes of the integrand base on the central block.
fn root_knots<E: Fn(f64) -> f64 + Sync>(
    e: &E,
    domain: Domain,
    singular: &[f64],
    w: &FreudWeight,
    q: f64,
    _spec: &IntegrationSpec,
) -> Vec<f64> {
    if q == 2.0 || q == 4.0 {
        return Vec::new();
    }
    let (a, b) = match domain {
        Domain::Interval(a, b) => (a, b),
        Domain::Real => {
            let c = central_half_width(w);
            (-c, c)
        }
    };
    let base = uniform_knots(a, b, 0.25);
    let knots = merge_knots(a, b, &[&base, singular]);
    split_at_roots(e, &knots, 32)
}

fn sup_over<E: Fn(f64) -> f64 + Sync>(
    e: &E,
    domain: Domain,
    singular: &[f64],
    tail: Tail,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> f64 {
    let (a, b) = match domain {
        Domain::Interval(a, b) => (a, b),
        Domain::Real => {
            let mut c = central_half_width(w);
            if let Tail::Algebraic { .. } = tail {
                c *= 64.0;
            }
            (-c, c)
        }
    };
    let base = uniform_knots(a, b, 0.125);
    let knots = merge_knots(a, b, &[&base, singular]);
    scan_max(e, &knots, spec.scan_density)
}

/// `|| f w ||_{L_q(domain)}`.
pub fn weighted_lq_norm(
    f: &dyn RealFunction,
    q: f64,
    w: &FreudWeight,
    domain: Domain,
    spec: &IntegrationSpec,
) -> Result<f64> {
    check_exponent(q)?;
    let value = |x: f64| f.weighted_value(x, w);
    let singular = f.breakpoints();
    if q.is_infinite() {
        return Ok(sup_over(&value, domain, &singular, f.tail(), w, spec));
    }
    let g = |x: f64| abs_pow(value(x), q);
    let knots = root_knots(&value, domain, &singular, w, q, spec);
    let integral = integrate_over(&g, domain, &knots, &singular, f.tail(), q, w, spec)?;
    Ok(integral.powf(1.0 / q))
}

/// Combines per-order norms into `(sum_k n_k^p)^{1/p}`, or the maximum when `p = inf`.
pub fn combine_orders(norms: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        let powered: Vec<f64> = norms.iter().map(|n| abs_pow(*n, p)).collect();
        pairwise_sum(&powered).powf(1.0 / p)
    }
}

/// `|| f ||_{W^r_{p,w}} = (sum_{k<=r} || f^{(k)} w ||_p^p)^{1/p}` (maximum for `p = inf`).
pub fn weighted_sobolev_norm(
    f: &dyn RealFunction,
    r: usize,
    p: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let norms = (0..=r)
        .map(|k| weighted_derivative_norm(f, k, p, w, Domain::Real, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_orders(&norms, p))
}

/// `|| f - s ||_{L_{q,w}(R)}`: the error on the truncation interval (panels on the spline
/// knots and the singular points of `f`) combined with the tail norm of `f` outside.
pub fn recovery_error(
    f: &dyn RealFunction,
    approx: &SplineFunction,
    q: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    check_exponent(q)?;
    let (lo, hi) = approx.support();
    let singular = f.breakpoints();
    let knots = merge_knots(lo, hi, &[&approx.breakpoints(), &singular]);
    let err = |x: f64| f.weighted_value(x, w) - approx.eval(x) * w.eval(x);
    let fw = |x: f64| f.weighted_value(x, w);
    if q.is_infinite() {
        let inside = scan_max(&err, &knots, spec.scan_density);
        let outside = sup_outside(&fw, hi, f.tail(), w, spec).max(sup_outside(&|x: f64| fw(-x), -lo, f.tail(), w, spec));
        return Ok(inside.max(outside));
    }
    let knots = if q == 2.0 || q == 4.0 {
        knots
    } else {
        split_at_roots(&err, &knots, 32)
    };
    let g = |x: f64| abs_pow(err(x), q);
    let floored = IntegrationSpec {
        roundoff: Some(Roundoff {
            delta: roundoff_delta(scan_max(&fw, &knots, 4)),
            q,
            volume: 1.0,
        }),
        ..spec.clone()
    };
    let inside = integrate_panels(&g, &knots, &singular, &floored)?;
    let gq = |x: f64| abs_pow(fw(x), q);
    let t = powered_tail(f.tail(), q);
    let right = integrate_tail(&gq, hi, t, q, w, inside, spec)?;
    let left = integrate_tail(&|x: f64| gq(-x), -lo, t, q, w, inside, spec)?;
    Ok(pairwise_sum(&[left, inside, right]).powf(1.0 / q))
}

/// Rounding noise of a difference of terms of size `scale`.
pub(crate) fn roundoff_delta(scale: f64) -> f64 {
    64.0 * f64::EPSILON * scale
}

/// `sup_{x >= start} |g(x)|` by scanning geometric panels.
fn sup_outside<G: Fn(f64) -> f64 + Sync>(g: &G, start: f64, tail: Tail, w: &FreudWeight, spec: &IntegrationSpec) -> f64 {
    let end = match tail {
        Tail::Polynomial { .. } => start.max(central_half_width(w)) + 4.0,
        Tail::Algebraic { .. } => start.max(1.0) * 64.0,
    };
    let mut knots = vec![start];
    let mut x = start;
    let step = 0.05f64.max(start * 1e-3);
    while x < end {
        x = (x + step.max(0.02 * x)).min(end);
        knots.push(x);
    }
    scan_max(g, &knots, spec.scan_density.min(16))
}

/// `|| s^{(order)} w ||_{L_q}` for a spline, integrating knot interval by knot interval.
pub fn spline_weighted_norm(
    s: &SplineFunction,
    order: usize,
    q: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    check_exponent(q)?;
    let knots = s.breakpoints();
    let value = |x: f64| s.derivative(order, x).unwrap_or(f64::NAN) * w.eval(x);
    if order >= s.order() {
        return Err(Error::DerivativeOrder {
            order,
            spline_order: s.order(),
        });
    }
    if q.is_infinite() {
        // Right-hand limits at knots; also take the left limit at the last knot.
        let inner = scan_max(&value, &knots, spec.scan_density);
        let (_, hi) = s.support();
        let edge = (s.derivative(order, hi - 1e-12 * hi.max(1.0)).unwrap_or(0.0) * w.eval(hi)).abs();
        return Ok(inner.max(edge));
    }
    let knots = if q == 2.0 || q == 4.0 {
        knots
    } else {
        split_at_roots(&value, &knots, 32)
    };
    let g = |x: f64| abs_pow(value(x), q);
    Ok(integrate_panels(&g, &knots, &[], spec)?.powf(1.0 / q))
}

/// `|| s ||_{W^r_{p,w}}` for a spline.
pub fn spline_sobolev_norm(
    s: &SplineFunction,
    r: usize,
    p: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let norms = (0..=r)
        .map(|k| spline_weighted_norm(s, k, p, w, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_orders(&norms, p))
}

/// `int s w` over the support of a spline.
pub fn spline_weighted_integral(s: &SplineFunction, w: &FreudWeight, spec: &IntegrationSpec) -> Result<f64> {
    let g = |x: f64| s.eval(x) * w.eval(x);
    integrate_panels(&g, &s.breakpoints(), &[], spec)
}
