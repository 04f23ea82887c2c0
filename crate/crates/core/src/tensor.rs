//! Tensor-product operators `Q_{d,rho,m}`, `P_{rho,d,m}`, their quadratures and
//! weighted norms on `R^d` for `d <= 3`.
//!
//! Operators act on a dense sample tensor by sweeping the univariate coefficient map
//! along each axis in turn.

use std::sync::Mutex;

use rayon::prelude::*;

use crate::analysis::{abs_pow, integrate_over, roundoff_delta, CorpusFunction, Domain, RealFunction};
use crate::blend::p_map;
use crate::bspline::{cardinal_values, locate};
use crate::error::{Error, Result};
use crate::integrate::{Roundoff, integrate_panels, integrate_tail, merge_knots, pairwise_sum, IntegrationSpec, Tail};
use crate::quadrature::{basis_moments, build_rule, RuleKind};
use crate::quasi::{quasi_map, OperatorConfig};
use crate::weight::{FreudWeight, RecoveryGrid};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

fn check_dim(d: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// A function on `R^d`.
pub trait MultiFunction: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// `f(x) prod_i w(x_i)`.
    fn weighted_value(&self, x: &[f64], w: &FreudWeight) -> f64 {
        let ln_w: f64 = x.iter().map(|xi| w.ln_eval(*xi)).sum();
        self.eval(x) * ln_w.exp()
    }

    /// Coordinates along `axis` where `f` is not smooth.
    fn singular(&self, _axis: usize) -> Vec<f64> {
        Vec::new()
    }

    /// Decay of `f w` along each axis.
    fn tail(&self) -> Tail {
        Tail::Polynomial {
            scale: 1.0,
            degree: 0.0,
        }
    }
}

/// `f(x) = prod_i g_i(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Separable {
    pub factors: Vec<CorpusFunction>,
}

impl Separable {
    pub fn new(factors: Vec<CorpusFunction>) -> Result<Self> {
        check_dim(factors.len())?;
        Ok(Self { factors })
    }

    /// The same univariate factor on every axis.
    pub fn power(g: CorpusFunction, d: usize) -> Result<Self> {
        Self::new(vec![g; d])
    }
}

impl MultiFunction for Separable {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(g, xi)| g.eval(*xi)).product()
    }

    fn weighted_value(&self, x: &[f64], w: &FreudWeight) -> f64 {
        self.factors
            .iter()
            .zip(x)
            .map(|(g, xi)| g.weighted_value(*xi, w))
            .product()
    }

    fn singular(&self, axis: usize) -> Vec<f64> {
        self.factors[axis].breakpoints()
    }

    fn tail(&self) -> Tail {
        // Slowest decay among the factors.
        self.factors
            .iter()
            .map(|g| g.tail())
            .fold(None, |acc: Option<Tail>, t| match (acc, t) {
                (None, t) => Some(t),
                (Some(Tail::Algebraic { decay: a }), Tail::Algebraic { decay: b }) => Some(Tail::Algebraic { decay: a.min(b) }),
                (Some(Tail::Algebraic { decay }), _) | (Some(_), Tail::Algebraic { decay }) => Some(Tail::Algebraic { decay }),
                (Some(Tail::Polynomial { scale: s1, degree: d1 }), Tail::Polynomial { scale: s2, degree: d2 }) => {
                    Some(Tail::Polynomial {
                        scale: s1.max(s2),
                        degree: d1.max(d2),
                    })
                }
            })
            .unwrap_or(Tail::Polynomial {
                scale: 1.0,
                degree: 0.0,
            })
    }
}

/// Plain closure on `R^d` with polynomial growth of the given degree.
pub struct ClosureFunction<F> {
    d: usize,
    f: F,
    degree: f64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> ClosureFunction<F> {
    pub fn new(d: usize, f: F, degree: f64) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { d, f, degree })
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> MultiFunction for ClosureFunction<F> {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn tail(&self) -> Tail {
        Tail::Polynomial {
            scale: 1.0,
            degree: self.degree,
        }
    }
}

/// Row-major dense tensor; axis 0 varies slowest.
fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

/// Samples `f(x_k)` on the tensor grid `|k_i| <= m + l + j0 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSampleBlock {
    pub d: usize,
    /// Largest index per axis.
    pub radius: i64,
    pub values: Vec<f64>,
}

impl TensorSampleBlock {
    /// `2 radius + 1 = 2(m + l + j0) - 1` values per axis.
    pub fn extent(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.extent(); self.d]
    }

    pub fn sample(f: &dyn MultiFunction, d: usize, grid: &RecoveryGrid, radius: i64) -> Result<Self> {
        check_dim(d)?;
        let extent = (2 * radius + 1) as usize;
        let total = extent.pow(d as u32);
        let values: Vec<Result<f64>> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut x = [0.0; MAX_DIM];
                let mut rest = flat;
                for a in (0..d).rev() {
                    let k = (rest % extent) as i64 - radius;
                    rest /= extent;
                    x[a] = grid.node(k);
                }
                let v = f.eval(&x[..d]);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Evaluator {
                        index: flat as i64,
                        x: x[0],
                        reason: format!("non-finite value {v} at {:?}", &x[..d]),
                    })
                }
            })
            .collect();
        Ok(Self {
            d,
            radius,
            values: values.into_iter().collect::<Result<_>>()?,
        })
    }
}

/// `sum_t c_t prod_i M(R x_i / h - t_i)`, zero outside `[-rho a_m, rho a_m]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpline {
    d: usize,
    grid: RecoveryGrid,
    order: usize,
    refinement: u32,
    first: i64,
    len: usize,
    coeffs: Vec<f64>,
}

impl TensorSpline {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grid(&self) -> &RecoveryGrid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    /// Coefficient index range per axis.
    pub fn coefficient_range(&self) -> std::ops::RangeInclusive<i64> {
        self.first..=self.first + self.len as i64 - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Knots along one axis, ends pinned to the interval ends.
    pub fn axis_breakpoints(&self) -> Vec<f64> {
        let n = self.refinement as i64 * self.grid.m() as i64;
        let step = self.grid.step() / self.refinement as f64;
        (-n..=n)
            .map(|t| {
                if t == n {
                    self.grid.half_width()
                } else if t == -n {
                    -self.grid.half_width()
                } else {
                    t as f64 * step
                }
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        if x.iter().any(|xi| !self.grid.contains(*xi)) {
            return 0.0;
        }
        let n = self.order;
        let scale = self.refinement as f64 / self.grid.step();
        let mut idx = [[0usize; 8]; MAX_DIM];
        let mut val = [[0.0; 8]; MAX_DIM];
        let mut count = [0usize; MAX_DIM];
        for (a, xi) in x.iter().enumerate() {
            let (j, u) = locate(n, xi * scale);
            let v = cardinal_values(n, u);
            for (i, vi) in v.iter().take(n).enumerate() {
                let t = j - i as i64 - self.first;
                if t >= 0 && (t as usize) < self.len && *vi != 0.0 {
                    idx[a][count[a]] = t as usize;
                    val[a][count[a]] = *vi;
                    count[a] += 1;
                }
            }
        }
        let st = strides(&vec![self.len; self.d]);
        let mut acc = 0.0;
        match self.d {
            1 => {
                for i in 0..count[0] {
                    acc += val[0][i] * self.coeffs[idx[0][i]];
                }
            }
            2 => {
                for i in 0..count[0] {
                    let mut inner = 0.0;
                    for k in 0..count[1] {
                        inner += val[1][k] * self.coeffs[idx[0][i] * st[0] + idx[1][k]];
                    }
                    acc += val[0][i] * inner;
                }
            }
            _ => {
                for i in 0..count[0] {
                    let mut mid = 0.0;
                    for k in 0..count[1] {
                        let mut inner = 0.0;
                        for l in 0..count[2] {
                            inner += val[2][l] * self.coeffs[idx[0][i] * st[0] + idx[1][k] * st[1] + idx[2][l]];
                        }
                        mid += val[1][k] * inner;
                    }
                    acc += val[0][i] * mid;
                }
            }
        }
        acc
    }

    /// `int S w` over the box, from the univariate basis moments.
    pub fn weighted_integral(&self, cfg: &OperatorConfig) -> Result<f64> {
        let (mu_first, mu) = basis_moments(&self.grid, self.order, self.refinement, cfg);
        let factor: Vec<f64> = (0..self.len)
            .map(|i| {
                let t = self.first + i as i64 - mu_first;
                if t < 0 {
                    0.0
                } else {
                    mu.get(t as usize).copied().unwrap_or(0.0)
                }
            })
            .collect();
        let total = self.coeffs.len();
        let terms: Vec<f64> = (0..total)
            .map(|flat| {
                let mut rest = flat;
                let mut prod = self.coeffs[flat];
                for _ in 0..self.d {
                    prod *= factor[rest % self.len];
                    rest /= self.len;
                }
                prod
            })
            .collect();
        Ok(pairwise_sum(&terms))
    }
}

/// Univariate coefficient map along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisOperator {
    Q,
    P,
}

fn axis_map(op: AxisOperator, cfg: &OperatorConfig, fiber: &[f64], shift: i64) -> (u32, i64, Vec<f64>) {
    match op {
        AxisOperator::Q => (1, -shift, quasi_map(&cfg.coefficients, fiber, shift)),
        AxisOperator::P => p_map(cfg, fiber, shift),
    }
}

/// Applies the univariate map along `axis` of a tensor with the given shape.
fn sweep(values: &[f64], shape: &[usize], axis: usize, map: &(dyn Fn(&[f64]) -> Vec<f64> + Sync)) -> (Vec<f64>, Vec<usize>) {
    let st = strides(shape);
    let n_axis = shape[axis];
    let fibers = values.len() / n_axis;
    // Fiber f enumerates all indices except `axis`, in row-major order.
    let outer = st[axis] * n_axis;
    let mapped: Vec<Vec<f64>> = (0..fibers)
        .into_par_iter()
        .map(|f| {
            let base = (f / st[axis]) * outer + f % st[axis];
            let fiber: Vec<f64> = (0..n_axis).map(|i| values[base + i * st[axis]]).collect();
            map(&fiber)
        })
        .collect();
    let new_len = mapped.first().map_or(0, Vec::len);
    let mut new_shape = shape.to_vec();
    new_shape[axis] = new_len;
    let nst = strides(&new_shape);
    let new_outer = nst[axis] * new_len;
    let mut out = vec![0.0; values.len() / n_axis * new_len];
    for (f, fiber) in mapped.iter().enumerate() {
        let base = (f / st[axis]) * new_outer + f % st[axis];
        for (i, v) in fiber.iter().enumerate() {
            out[base + i * nst[axis]] = *v;
        }
    }
    (out, new_shape)
}

/// Runs the operator on a sample block, sweeping the axes in `axis_order`.
pub fn apply_to_block(
    op: AxisOperator,
    block: &TensorSampleBlock,
    m: usize,
    cfg: &OperatorConfig,
    axis_order: &[usize],
) -> Result<TensorSpline> {
    let d = block.d;
    check_dim(d)?;
    let mut sorted = axis_order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..d).collect::<Vec<_>>() {
        return Err(Error::Config(format!("axis order {axis_order:?} is not a permutation of 0..{d}")));
    }
    let grid = cfg.grid(m)?;
    let shift = cfg.shift_radius(m);
    let expected = cfg.sample_radius(m);
    if block.radius != expected {
        return Err(Error::LengthMismatch {
            expected: (2 * expected + 1) as usize,
            got: block.extent(),
        });
    }
    let (refinement, first, _) = axis_map(op, cfg, &vec![0.0; block.extent()], shift);
    let map = |fiber: &[f64]| axis_map(op, cfg, fiber, shift).2;
    let mut values = block.values.clone();
    let mut shape = block.shape();
    for &axis in axis_order {
        let (v, s) = sweep(&values, &shape, axis, &map);
        values = v;
        shape = s;
    }
    Ok(TensorSpline {
        d,
        grid,
        order: cfg.coefficients.order(),
        refinement,
        first,
        len: shape[0],
        coeffs: values,
    })
}

fn apply_d(op: AxisOperator, f: &dyn MultiFunction, d: usize, m: usize, cfg: &OperatorConfig) -> Result<TensorSpline> {
    check_dim(d)?;
    if f.dim() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: f.dim(),
        });
    }
    let grid = cfg.grid(m)?;
    let block = TensorSampleBlock::sample(f, d, &grid, cfg.sample_radius(m))?;
    let order: Vec<usize> = (0..d).collect();
    apply_to_block(op, &block, m, cfg, &order)
}

/// `Q_{d,rho,m} f`, the product of the univariate truncated operators.
pub fn apply_qd_truncated(f: &dyn MultiFunction, d: usize, m: usize, cfg: &OperatorConfig) -> Result<TensorSpline> {
    apply_d(AxisOperator::Q, f, d, m, cfg)
}

/// `P_{rho,d,m} f`; interpolates at the tensor nodes `|k_i| <= m`.
pub fn apply_pd_truncated(f: &dyn MultiFunction, d: usize, m: usize, cfg: &OperatorConfig) -> Result<TensorSpline> {
    apply_d(AxisOperator::P, f, d, m, cfg)
}

/// Tensor-product rule: `sum_s (prod_i lambda_{s_i}) f(x_s)`.
pub fn integrate_d(kind: RuleKind, f: &dyn MultiFunction, d: usize, m: usize, cfg: &OperatorConfig) -> Result<f64> {
    check_dim(d)?;
    let rule = build_rule(kind, m, cfg)?;
    let grid = cfg.grid(m)?;
    let block = TensorSampleBlock::sample(f, d, &grid, rule.radius())?;
    let n = rule.len();
    let terms: Vec<f64> = block
        .values
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let mut rest = flat;
            let mut prod = *v;
            for _ in 0..d {
                prod *= rule.weights[rest % n];
                rest /= n;
            }
            prod
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Node count `[2(m + l + j0) - 1]^d` of the tensor rule and operators.
pub fn tensor_node_count(m: usize, d: usize, cfg: &OperatorConfig) -> usize {
    cfg.sample_count(m).pow(d as u32)
}

/// Integration region along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Axis {
    Inside(f64),
    Outside(f64),
    Real,
}

/// `int |g|^q` over the product region `axes`, iterating one-dimensional panel integrals.
/// The first failure of an inner integral is kept in `failure`.
#[allow(clippy::too_many_arguments)]
fn iterated(
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    prefix: &[f64],
    axes: &[Axis],
    knots: &[f64],
    singular: &[Vec<f64>],
    tail: Tail,
    q: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
    failure: &Mutex<Option<Error>>,
) -> Result<f64> {
    let k = prefix.len();
    let last = k + 1 == axes.len();
    let inner = |x: f64| -> f64 {
        let mut p = [0.0; MAX_DIM];
        p[..k].copy_from_slice(prefix);
        p[k] = x;
        if last {
            abs_pow(g(&p[..=k]), q)
        } else {
            match iterated(g, &p[..=k], axes, knots, singular, tail, q, w, spec, failure) {
                Ok(v) => v,
                Err(e) => {
                    let mut slot = failure.lock().unwrap_or_else(|p| p.into_inner());
                    slot.get_or_insert(e);
                    f64::NAN
                }
            }
        }
    };
    let powered_tail = match tail {
        Tail::Algebraic { decay } => Tail::Algebraic { decay: decay * q },
        other => other,
    };
    let out = match axes[k] {
        Axis::Inside(l) => {
            let ks = merge_knots(-l, l, &[knots, &singular[k]]);
            // Inner integrals carry the noise of their whole inner box.
            let inner_volume: f64 = axes[k + 1..]
                .iter()
                .map(|a| if let Axis::Inside(l) = a { 2.0 * l } else { 1.0 })
                .product();
            let level = IntegrationSpec {
                roundoff: spec.roundoff.map(|r| Roundoff {
                    volume: inner_volume,
                    ..r
                }),
                ..spec.clone()
            };
            integrate_panels(&inner, &ks, &singular[k], &level)
        }
        Axis::Outside(l) => integrate_tail(&inner, l, powered_tail, q, w, 0.0, spec)
            .and_then(|right| Ok(right + integrate_tail(&|x: f64| inner(-x), l, powered_tail, q, w, 0.0, spec)?)),
        Axis::Real => integrate_over(&inner, Domain::Real, &[], &singular[k], tail, q, w, spec),
    };
    match out {
        Err(e) => Err(failure.lock().unwrap_or_else(|p| p.into_inner()).take().unwrap_or(e)),
        ok => ok,
    }
}

fn iterated_top(
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    axes: &[Axis],
    knots: &[f64],
    singular: &[Vec<f64>],
    tail: Tail,
    q: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let failure = Mutex::new(None);
    iterated(g, &[], axes, knots, singular, tail, q, w, spec, &failure)
}

/// `|| f ||_{L_{q,w}(R^d)}` for finite `q`, by iterated integration.
pub fn weighted_lq_norm_d(f: &dyn MultiFunction, q: f64, w: &FreudWeight, spec: &IntegrationSpec) -> Result<f64> {
    let d = f.dim();
    check_dim(d)?;
    if !(q >= 1.0) || q.is_infinite() {
        return Err(Error::Config(format!("d-dimensional norms need a finite q >= 1, got {q}")));
    }
    let singular: Vec<Vec<f64>> = (0..d).map(|a| f.singular(a)).collect();
    let g = |x: &[f64]| f.weighted_value(x, w);
    let axes = vec![Axis::Real; d];
    Ok(iterated_top(&g, &axes, &[], &singular, f.tail(), q, w, spec)?.powf(1.0 / q))
}

/// `|| f - S ||_{L_{q,w}(R^d)}`: iterated panel integrals on the box aligned with the
/// spline knots, plus the norm of `f` on the complement of the box.
pub fn recovery_error_d(
    f: &dyn MultiFunction,
    approx: &TensorSpline,
    q: f64,
    w: &FreudWeight,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let d = f.dim();
    if d != approx.dim() {
        return Err(Error::LengthMismatch {
            expected: approx.dim(),
            got: d,
        });
    }
    if !(q >= 1.0) {
        return Err(Error::Config(format!("norm exponent must lie in [1, inf], got {q}")));
    }
    let l = approx.grid().half_width();
    let knots = approx.axis_breakpoints();
    let singular: Vec<Vec<f64>> = (0..d).map(|a| f.singular(a)).collect();
    let err = |x: &[f64]| {
        let ln_w: f64 = x.iter().map(|xi| w.ln_eval(*xi)).sum();
        f.weighted_value(x, w) - approx.eval(x) * ln_w.exp()
    };
    if q.is_infinite() {
        return sup_error_d(&err, &|x: &[f64]| f.weighted_value(x, w), d, &knots, l, spec);
    }
    let fw = |x: &[f64]| f.weighted_value(x, w);
    let boxed = vec![Axis::Inside(l); d];
    // Round-off in an exactly reproduced region sits far below any relative target, so
    // refinement stops at the cancellation noise of `f w - S w`.
    let nk = knots.len();
    let fw_max = (0..nk.pow(d as u32))
        .into_par_iter()
        .map(|flat| {
            let mut x = [0.0; MAX_DIM];
            let mut rest = flat;
            for xa in x.iter_mut().take(d) {
                *xa = knots[rest % nk];
                rest /= nk;
            }
            f.weighted_value(&x[..d], w).abs()
        })
        .reduce(|| 0.0, f64::max);
    let floor = IntegrationSpec {
        roundoff: Some(Roundoff {
            delta: roundoff_delta(fw_max),
            q,
            volume: 1.0,
        }),
        ..spec.clone()
    };
    let inside = iterated_top(&err, &boxed, &knots, &singular, f.tail(), q, w, &floor)?;
    // Complement of the box: first axis outside, earlier axes inside, later axes free.
    let mut parts = vec![inside];
    for a in 0..d {
        let axes: Vec<Axis> = (0..d)
            .map(|i| match i.cmp(&a) {
                std::cmp::Ordering::Less => Axis::Inside(l),
                std::cmp::Ordering::Equal => Axis::Outside(l),
                std::cmp::Ordering::Greater => Axis::Real,
            })
            .collect();
        parts.push(iterated_top(&fw, &axes, &knots, &singular, f.tail(), q, w, spec)?);
    }
    Ok(pairwise_sum(&parts).powf(1.0 / q))
}

/// Sup of the error on a scan lattice of the box and of `|f w|` on a shell around it.
fn sup_error_d(
    err: &(dyn Fn(&[f64]) -> f64 + Sync),
    fw: &(dyn Fn(&[f64]) -> f64 + Sync),
    d: usize,
    knots: &[f64],
    l: f64,
    spec: &IntegrationSpec,
) -> Result<f64> {
    let density = (spec.scan_density / 8).max(4);
    let mut axis_pts = Vec::new();
    for win in knots.windows(2) {
        for i in 0..density {
            axis_pts.push(win[0] + (win[1] - win[0]) * i as f64 / density as f64);
        }
    }
    axis_pts.push(l);
    let outer: Vec<f64> = (0..=64).map(|i| l + (l.max(1.0) * 3.0) * i as f64 / 64.0).collect();
    let mut shell_pts: Vec<f64> = outer.iter().map(|x| -x).collect();
    shell_pts.extend(axis_pts.iter().copied());
    shell_pts.extend(outer.iter().copied());
    let lattice = |pts: &[f64], g: &(dyn Fn(&[f64]) -> f64 + Sync)| -> f64 {
        let n = pts.len();
        let total = n.pow(d as u32);
        (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut x = [0.0; MAX_DIM];
                let mut rest = flat;
                for a in (0..d).rev() {
                    x[a] = pts[rest % n];
                    rest /= n;
                }
                g(&x[..d]).abs()
            })
            .reduce(|| 0.0, f64::max)
    };
    let inside = lattice(&axis_pts, err);
    let outside = lattice(&shell_pts, &|x: &[f64]| if x.iter().all(|xi| xi.abs() <= l) { 0.0 } else { fw(x) });
    Ok(inside.max(outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::weighted_lq_norm;
    use crate::blend::apply_p_truncated;
    use crate::quasi::apply_q_truncated;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> OperatorConfig {
        OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap()
    }

    fn random_points(d: usize, l: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..d).map(|_| rng.random_range(-l..l)).collect()).collect()
    }

    #[test]
    fn rejects_unsupported_dimension() {
        let f = ClosureFunction::new(2, |x: &[f64]| x[0], 1.0).unwrap();
        assert!(matches!(apply_qd_truncated(&f, 4, 8, &cfg()), Err(Error::UnsupportedDimension(4))));
        assert!(ClosureFunction::new(0, |_: &[f64]| 0.0, 0.0).is_err());
    }

    #[test]
    fn one_dimensional_case_matches_univariate_operator() {
        let c = cfg();
        let g = CorpusFunction::oscil();
        let f = Separable::new(vec![g.clone()]).unwrap();
        let qd = apply_qd_truncated(&f, 1, 12, &c).unwrap();
        let pd = apply_pd_truncated(&f, 1, 12, &c).unwrap();
        let q = apply_q_truncated(|x: f64| g.eval(x), 12, &c).unwrap();
        let p = apply_p_truncated(|x: f64| g.eval(x), 12, &c).unwrap();
        for x in random_points(1, q.grid().half_width(), 100, 1) {
            assert!((qd.eval(&x) - q.eval(x[0])).abs() < 1e-13);
            assert!((pd.eval(&x) - p.eval(x[0])).abs() < 1e-13);
        }
    }

    #[test]
    fn separable_functions_give_product_outputs() {
        let c = cfg();
        let (g, h) = (CorpusFunction::gauss(), CorpusFunction::oscil());
        let f = Separable::new(vec![g.clone(), h.clone()]).unwrap();
        let m = 10;
        let qd = apply_qd_truncated(&f, 2, m, &c).unwrap();
        let pd = apply_pd_truncated(&f, 2, m, &c).unwrap();
        let (qg, qh) = (
            apply_q_truncated(|x: f64| g.eval(x), m, &c).unwrap(),
            apply_q_truncated(|x: f64| h.eval(x), m, &c).unwrap(),
        );
        let (pg, ph) = (
            apply_p_truncated(|x: f64| g.eval(x), m, &c).unwrap(),
            apply_p_truncated(|x: f64| h.eval(x), m, &c).unwrap(),
        );
        for x in random_points(2, qd.grid().half_width(), 100, 2) {
            assert!((qd.eval(&x) - qg.eval(x[0]) * qh.eval(x[1])).abs() < 1e-11);
            assert!((pd.eval(&x) - pg.eval(x[0]) * ph.eval(x[1])).abs() < 1e-11);
        }
    }

    #[test]
    fn bivariate_cubics_reproduced_inside() {
        let c = cfg();
        let f = ClosureFunction::new(2, |x: &[f64]| 1.0 + x[0] * x[0] * x[0] * x[1] - 2.0 * x[1] * x[1] * x[1] + x[0] * x[1], 6.0).unwrap();
        let m = 12;
        for s in [apply_qd_truncated(&f, 2, m, &c).unwrap(), apply_pd_truncated(&f, 2, m, &c).unwrap()] {
            let l = s.grid().half_width();
            for x in random_points(2, l, 100, 3) {
                let exact = f.eval(&x);
                assert!((s.eval(&x) - exact).abs() < 1e-9 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn interpolation_at_tensor_nodes() {
        let c = cfg();
        let f = Separable::new(vec![CorpusFunction::kink(2).unwrap(), CorpusFunction::oscil()]).unwrap();
        let m = 8;
        let p = apply_pd_truncated(&f, 2, m, &c).unwrap();
        let grid = c.grid(m).unwrap();
        let mut worst: f64 = 0.0;
        for i in -(m as i64)..=m as i64 {
            for k in -(m as i64)..=m as i64 {
                let x = [grid.node(i), grid.node(k)];
                worst = worst.max((p.eval(&x) - f.eval(&x)).abs());
            }
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn axis_order_does_not_matter() {
        let c = cfg();
        let f = ClosureFunction::new(3, |x: &[f64]| (x[0] - 0.3 * x[1]).sin() * (0.5 * x[2]).cos() + x[0] * x[2], 2.0).unwrap();
        let m = 5;
        let grid = c.grid(m).unwrap();
        let block = TensorSampleBlock::sample(&f, 3, &grid, c.sample_radius(m)).unwrap();
        assert_eq!(block.values.len(), tensor_node_count(m, 3, &c));
        for op in [AxisOperator::Q, AxisOperator::P] {
            let base = apply_to_block(op, &block, m, &c, &[0, 1, 2]).unwrap();
            for order in [[2, 1, 0], [1, 0, 2], [0, 2, 1]] {
                let other = apply_to_block(op, &block, m, &c, &order).unwrap();
                for (a, b) in base.coefficients().iter().zip(other.coefficients()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tensor_rule_factorizes() {
        let c = cfg();
        let (g, h) = (CorpusFunction::gauss(), CorpusFunction::kink(3).unwrap());
        let f = Separable::new(vec![g.clone(), h.clone()]).unwrap();
        let m = 9;
        for kind in [RuleKind::Q, RuleKind::P] {
            let rule = build_rule(kind, m, &c).unwrap();
            let ig = crate::quadrature::integrate(&rule, |x: f64| g.eval(x)).unwrap();
            let ih = crate::quadrature::integrate(&rule, |x: f64| h.eval(x)).unwrap();
            let both = integrate_d(kind, &f, 2, m, &c).unwrap();
            assert!((both - ig * ih).abs() < 1e-10 * (ig * ih).abs());
        }
        let zero = ClosureFunction::new(2, |_: &[f64]| 0.0, 0.0).unwrap();
        assert_eq!(integrate_d(RuleKind::Q, &zero, 2, m, &c).unwrap(), 0.0);
    }

    #[test]
    fn rule_matches_integral_of_tensor_recovery() {
        let c = cfg();
        let f = ClosureFunction::new(2, |x: &[f64]| (x[0] * x[1]).cos() + x[0], 1.0).unwrap();
        let m = 7;
        let q = apply_qd_truncated(&f, 2, m, &c).unwrap();
        let via_rule = integrate_d(RuleKind::Q, &f, 2, m, &c).unwrap();
        let via_spline = q.weighted_integral(&c).unwrap();
        assert!((via_rule - via_spline).abs() < 1e-12 * via_spline.abs());
    }

    #[test]
    fn separable_norm_factorizes() {
        let w = FreudWeight::gaussian();
        let spec = IntegrationSpec::default();
        let (g, h) = (CorpusFunction::oscil(), CorpusFunction::kink(2).unwrap());
        let f = Separable::new(vec![g.clone(), h.clone()]).unwrap();
        let n2 = weighted_lq_norm_d(&f, 2.0, &w, &spec).unwrap();
        let a = weighted_lq_norm(&g, 2.0, &w, Domain::Real, &spec).unwrap();
        let b = weighted_lq_norm(&h, 2.0, &w, Domain::Real, &spec).unwrap();
        assert!((n2 - a * b).abs() < 1e-10 * a * b, "{n2} vs {}", a * b);
    }

    #[test]
    fn exact_recovery_leaves_only_the_tail() {
        // A bivariate cubic is reproduced on the box; the error is the norm outside it.
        let c = cfg();
        let w = c.weight;
        let spec = IntegrationSpec::default();
        let f = Separable::new(vec![CorpusFunction::poly(1), CorpusFunction::poly(2)]).unwrap();
        let q = apply_qd_truncated(&f, 2, 10, &c).unwrap();
        let e = recovery_error_d(&f, &q, 2.0, &w, &spec).unwrap();
        let l = q.grid().half_width();
        let (g1, g2) = (CorpusFunction::poly(1), CorpusFunction::poly(2));
        let part = |g: &CorpusFunction, dom| weighted_lq_norm(g, 2.0, &w, dom, &spec).unwrap().powi(2);
        let (in1, in2) = (part(&g1, Domain::Interval(-l, l)), part(&g2, Domain::Interval(-l, l)));
        let (all1, all2) = (part(&g1, Domain::Real), part(&g2, Domain::Real));
        let outside = all1 * all2 - in1 * in2;
        assert!((e * e - outside).abs() < 1e-6 * outside, "{} vs {outside}", e * e);
    }
}
