//! Quadratures generated by the truncated operators: `I f = int (S f) w` over
//! `[-rho a_m, rho a_m]`, written as `sum_s lambda_s f(x_s)`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::blend::p_map;
use crate::bspline::cardinal_values;
use crate::error::{Error, Result};
use crate::integrate::{pairwise_sum, GaussLegendre};
use crate::quasi::{OperatorConfig, Sampler};
use crate::weight::RecoveryGrid;

/// Which operator generates the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Q,
    P,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Q => "Q",
            RuleKind::P => "P",
        })
    }
}

/// Nodes `x_s` and weights `lambda_s` for `|s| <= m + l + j0 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuadratureRule {
    pub kind: RuleKind,
    pub m: usize,
    pub rho: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl WeightedQuadratureRule {
    /// Largest node index.
    pub fn radius(&self) -> i64 {
        (self.nodes.len() as i64 - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(s, x_s, lambda_s)` in increasing `s`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let r = self.radius();
        self.nodes
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(move |(i, (x, l))| (i as i64 - r, *x, *l))
    }

    pub fn weight_sum(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// CSV with header `s,x_s,lambda_s` and 17 significant digits.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "s,x_s,lambda_s")?;
        for (s, x, l) in self.entries() {
            writeln!(out, "{s},{x:.16e},{l:.16e}")?;
        }
        Ok(())
    }

    pub fn export_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = std::io::BufWriter::new(file);
        self.write_csv(&mut buf)
            .and_then(|_| buf.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// `mu_t = int_{-L}^{L} M(R x / h - t) w(x) dx` for `t` in `-(R m + l - 1)..=R m + l - 1`,
/// one Gauss-Legendre pass per knot interval. Returns the first index and the values.
pub(crate) fn basis_moments(grid: &RecoveryGrid, order: usize, refinement: u32, cfg: &OperatorConfig) -> (i64, Vec<f64>) {
    let half = order as i64 / 2;
    let knots = refinement as i64 * grid.m() as i64;
    let first = -(knots + half - 1);
    let step = grid.step() / refinement as f64;
    let rule = GaussLegendre::new(16);
    let w = &cfg.weight;
    let knot = |t: i64| {
        if t == knots {
            grid.half_width()
        } else if t == -knots {
            -grid.half_width()
        } else {
            t as f64 * step
        }
    };
    // Per knot interval [tau, tau + 1] (basis units) the active shifts are s = j - i with
    // j = tau + l, and the basis values are N(u + i) for the local fraction u.
    let per_interval: Vec<(i64, [f64; 8])> = (-knots..knots)
        .into_par_iter()
        .map(|tau| {
            let (a, b) = (knot(tau), knot(tau + 1));
            let (mid, halfw) = (0.5 * (a + b), 0.5 * (b - a));
            let mut acc = [0.0; 8];
            for (xi, wt) in rule.points() {
                let vals = cardinal_values(order, 0.5 * (1.0 + xi));
                let wx = w.eval(mid + halfw * xi) * wt * halfw;
                for (slot, v) in vals.iter().take(order).enumerate() {
                    acc[slot] += v * wx;
                }
            }
            (tau + half, acc)
        })
        .collect();
    let len = (2 * -first + 1) as usize;
    let mut parts: Vec<Vec<f64>> = vec![Vec::new(); len];
    for (j_ref, acc) in per_interval {
        for (slot, v) in acc.iter().take(order).enumerate() {
            let t = j_ref - slot as i64;
            if (first..=-first).contains(&t) {
                parts[(t - first) as usize].push(*v);
            }
        }
    }
    (first, parts.iter().map(|p| pairwise_sum(p)).collect())
}

fn dot_moments(first: i64, coeffs: &[f64], mu_first: i64, mu: &[f64]) -> f64 {
    let terms: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let t = first + i as i64;
            let idx = t - mu_first;
            if *c == 0.0 || idx < 0 {
                return None;
            }
            mu.get(idx as usize).map(|m| c * m)
        })
        .collect();
    pairwise_sum(&terms)
}

fn compute_rule(kind: RuleKind, m: usize, cfg: &OperatorConfig) -> Result<WeightedQuadratureRule> {
    let grid = cfg.grid(m)?;
    let radius = cfg.sample_radius(m);
    let shift = cfg.shift_radius(m);
    let order = cfg.coefficients.order();
    let nodes: Vec<f64> = (-radius..=radius).map(|k| grid.node(k)).collect();
    let weights: Vec<f64> = match kind {
        RuleKind::Q => {
            let (mu_first, mu) = basis_moments(&grid, order, 1, cfg);
            let j0 = cfg.j0() as i64;
            // lambda_k = sum_j lambda(j) mu_{k+j}, restricted to the shifts kept by the truncation.
            (-radius..=radius)
                .map(|k| {
                    let terms: Vec<f64> = (-j0..=j0)
                        .filter(|j| (k + j).abs() <= shift)
                        .map(|j| cfg.coefficients.lambda(j) * mu[(k + j - mu_first) as usize])
                        .collect();
                    pairwise_sum(&terms)
                })
                .collect()
        }
        RuleKind::P => {
            let probe = vec![0.0; nodes.len()];
            let (refine, _, _) = p_map(cfg, &probe, shift);
            let (mu_first, mu) = basis_moments(&grid, order, refine, cfg);
            // Influence of each unit sample, integrated against the weight.
            (0..nodes.len())
                .into_par_iter()
                .map(|i| {
                    let mut unit = vec![0.0; nodes.len()];
                    unit[i] = 1.0;
                    let (_, first, coeffs) = p_map(cfg, &unit, shift);
                    dot_moments(first, &coeffs, mu_first, &mu)
                })
                .collect()
        }
    };
    Ok(WeightedQuadratureRule {
        kind,
        m,
        rho: cfg.rho,
        nodes,
        weights,
    })
}

type CacheKey = (RuleKind, usize, u64, u64, u64, u64, usize, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<WeightedQuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<WeightedQuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: RuleKind, m: usize, cfg: &OperatorConfig) -> Result<Arc<WeightedQuadratureRule>> {
    let w = &cfg.weight;
    let key = (
        kind,
        cfg.ell(),
        cfg.coefficients.fingerprint(),
        w.lambda().to_bits(),
        w.a().to_bits(),
        w.b().to_bits(),
        m,
        cfg.rho.to_bits(),
    );
    if let Some(rule) = cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(compute_rule(kind, m, cfg)?);
    cache()
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// `I^Q_{rho,m}`: `lambda_s = int L(x/h - s) chi(x) w(x) dx`, integrated per knot interval.
pub fn build_rule_q(m: usize, cfg: &OperatorConfig) -> Result<Arc<WeightedQuadratureRule>> {
    cached(RuleKind::Q, m, cfg)
}

/// `I^P_{rho,m}`: weights are the weighted integrals of `P_{rho,m}` applied to unit samples.
pub fn build_rule_p(m: usize, cfg: &OperatorConfig) -> Result<Arc<WeightedQuadratureRule>> {
    cached(RuleKind::P, m, cfg)
}

pub fn build_rule(kind: RuleKind, m: usize, cfg: &OperatorConfig) -> Result<Arc<WeightedQuadratureRule>> {
    cached(kind, m, cfg)
}

/// `sum_s lambda_s f(x_s)`.
pub fn integrate(rule: &WeightedQuadratureRule, mut f: impl Sampler) -> Result<f64> {
    let grid_like = rule.nodes.iter().enumerate();
    let radius = rule.radius();
    let mut terms = Vec::with_capacity(rule.len());
    for (i, x) in grid_like {
        let v = f.sample(*x).map_err(|reason| Error::Evaluator {
            index: i as i64 - radius,
            x: *x,
            reason,
        })?;
        if !v.is_finite() {
            return Err(Error::Evaluator {
                index: i as i64 - radius,
                x: *x,
                reason: format!("non-finite value {v}"),
            });
        }
        terms.push(rule.weights[i] * v);
    }
    Ok(pairwise_sum(&terms))
}
