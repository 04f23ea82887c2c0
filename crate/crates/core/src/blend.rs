//! The refined interpolant `R`, the blend `P = R + Q - RQ`, and their truncated
//! and edge-extended forms.
//!
//! All outputs live on the refined basis `M(R x / h - t)` with `R = 2^kappa`. The
//! `Q` part is moved onto that basis with the two-scale relation of `M_{2l}`.

use crate::bspline::{binomial, centered_value};
use crate::error::Result;
use crate::quasi::{quasi_map, sample_extended, sample_nodes, OperatorConfig, QuasiCoefficients, Sampler};
use crate::spline::SplineFunction;
use crate::weight::RecoveryGrid;

/// Order, refinement exponent and `M(0)` for the blended operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendConfig {
    pub ell: usize,
    pub kappa: u32,
    pub quasi: QuasiCoefficients,
    pub m0: f64,
}

impl BlendConfig {
    pub fn new(quasi: &QuasiCoefficients) -> Self {
        Self {
            ell: quasi.ell(),
            kappa: quasi.kappa(),
            quasi: quasi.clone(),
            m0: centered_value(quasi.order(), 0.0),
        }
    }

    /// `2^kappa`.
    pub fn refinement(&self) -> u32 {
        1 << self.kappa
    }

    /// Coefficients `a_t` with `M(y) = sum_t a_t M(2^kappa y - t)`.
    pub fn two_scale_mask(&self) -> Vec<(i64, f64)> {
        let n = 2 * self.ell;
        let half = self.ell as i64;
        let mut mask = vec![(0i64, 1.0)];
        for _ in 0..self.kappa {
            let mut next: Vec<(i64, f64)> = Vec::new();
            for (t, a) in &mask {
                for i in 0..=n {
                    let idx = 2 * t + i as i64 - half;
                    let w = a * binomial(n, i) * 2f64.powi(1 - n as i32);
                    match next.iter_mut().find(|(k, _)| *k == idx) {
                        Some(entry) => entry.1 += w,
                        None => next.push((idx, w)),
                    }
                }
            }
            next.sort_by_key(|(k, _)| *k);
            mask = next;
        }
        mask
    }
}

/// Refined coefficients of `R`, `Q` and `-RQ` for the given sample vector
/// (indexed `-sample_radius..=sample_radius`), truncated to shifts `|s| <= shift_radius`.
/// Returns the first refined index and the coefficient vector.
fn blend_coefficients(
    blend: &BlendConfig,
    samples: &[f64],
    shift_radius: i64,
    parts: Parts,
) -> (i64, Vec<f64>) {
    let refine = blend.refinement() as i64;
    let mask = blend.two_scale_mask();
    let reach = mask.iter().map(|(t, _)| t.abs()).max().unwrap_or(0);
    let first = -(refine * shift_radius + reach);
    let mut out = vec![0.0; (2 * -first + 1) as usize];
    let sample_radius = (samples.len() as i64 - 1) / 2;
    let at = |t: i64| (t - first) as usize;
    let q = quasi_map(&blend.quasi, samples, shift_radius);
    let inv_m0 = 1.0 / blend.m0;
    let n = blend.quasi.order();

    for s in -shift_radius..=shift_radius {
        if parts.r {
            out[at(refine * s)] += inv_m0 * samples[(s + sample_radius) as usize];
        }
        let cs = q[(s + shift_radius) as usize];
        if parts.q && cs != 0.0 {
            for (t, a) in &mask {
                out[at(refine * s + t)] += cs * a;
            }
        }
    }
    if parts.rq {
        // (Q f)(x_i) for |i| <= shift_radius, then R applied to those values.
        let ell = blend.ell as i64;
        for i in -shift_radius..=shift_radius {
            let mut v = 0.0;
            for s in (i - ell + 1).max(-shift_radius)..=(i + ell - 1).min(shift_radius) {
                v += q[(s + shift_radius) as usize] * centered_value(n, (i - s) as f64);
            }
            out[at(refine * i)] -= inv_m0 * v;
        }
    }
    (first, out)
}

#[derive(Clone, Copy)]
struct Parts {
    r: bool,
    q: bool,
    rq: bool,
}

const ALL: Parts = Parts {
    r: true,
    q: true,
    rq: true,
};

/// Refined coefficient map of `P_{rho,m}` (or `Q_{rho,m}` when `l = 1`) from full samples.
pub(crate) fn p_map(cfg: &OperatorConfig, samples: &[f64], shift_radius: i64) -> (u32, i64, Vec<f64>) {
    let blend = BlendConfig::new(&cfg.coefficients);
    if cfg.ell() == 1 {
        let q = quasi_map(&cfg.coefficients, samples, shift_radius);
        return (1, -shift_radius, q);
    }
    let (first, c) = blend_coefficients(&blend, samples, shift_radius, ALL);
    (blend.refinement(), first, c)
}

fn p_from_samples(cfg: &OperatorConfig, grid: RecoveryGrid, samples: &[f64]) -> SplineFunction {
    let (refine, first, coeffs) = p_map(cfg, samples, cfg.shift_radius(grid.m()));
    SplineFunction::from_parts(grid, cfg.coefficients.order(), refine, first, coeffs)
}

fn part_from_samples(cfg: &OperatorConfig, grid: RecoveryGrid, samples: &[f64], parts: Parts) -> SplineFunction {
    let blend = BlendConfig::new(&cfg.coefficients);
    let (first, coeffs) = blend_coefficients(&blend, samples, cfg.shift_radius(grid.m()), parts);
    SplineFunction::from_parts(grid, cfg.coefficients.order(), blend.refinement(), first, coeffs)
}

/// `R_{rho,m} f = M(0)^{-1} sum_{|s| <= m+l-1} f(x_s) M(2^kappa (x / h - s))`.
pub fn apply_r_truncated(mut f: impl Sampler, m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let grid = cfg.grid(m)?;
    let samples = sample_nodes(&mut f, &grid, cfg.shift_radius(m))?;
    let parts = Parts {
        r: true,
        q: false,
        rq: false,
    };
    // `R` only reads f_s for |s| <= m + l - 1; pad so the shared routine sees a full vector.
    let pad = cfg.j0();
    let mut full = vec![0.0; pad];
    full.extend_from_slice(&samples);
    full.extend(std::iter::repeat_n(0.0, pad));
    Ok(part_from_samples(cfg, grid, &full, parts))
}

/// `(RQ)_{rho,m} f`, the composition of the truncated `R` with the truncated `Q`.
pub fn apply_rq_truncated(mut f: impl Sampler, m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let grid = cfg.grid(m)?;
    let samples = sample_nodes(&mut f, &grid, cfg.sample_radius(m))?;
    let parts = Parts {
        r: false,
        q: false,
        rq: true,
    };
    Ok(part_from_samples(cfg, grid, &samples, parts).scaled(-1.0))
}

/// `P_{rho,m} f = R_{rho,m} f + Q_{rho,m} f - (RQ)_{rho,m} f`; equals `Q_{rho,m}` when `l = 1`.
/// Uses the `2(m + l + j0) - 1` samples at `|k| <= m + l + j0 - 1`.
pub fn apply_p_truncated(mut f: impl Sampler, m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let grid = cfg.grid(m)?;
    let samples = sample_nodes(&mut f, &grid, cfg.sample_radius(m))?;
    Ok(p_from_samples(cfg, grid, &samples))
}

/// `P_{rho,m}` applied to the Lagrange-extended `f`; uses the `2m + 1` samples at `|k| <= m`.
pub fn apply_p_bar(mut f: impl Sampler, m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let grid = cfg.grid(m)?;
    let samples = sample_extended(&mut f, &grid, cfg.ell(), cfg.sample_radius(m))?;
    Ok(p_from_samples(cfg, grid, &samples))
}

/// Coefficients of the untruncated `P` applied to the unit sample at the origin, on the
/// refined basis `M(2^kappa x - t)`: `P f = sum_s f(s) sum_t c_t M(2^kappa (x - s) - t)`.
pub fn blended_stencil(quasi: &QuasiCoefficients) -> Vec<(i64, f64)> {
    let blend = BlendConfig::new(quasi);
    let radius = 4 * (quasi.ell() + quasi.j0()) as i64 + 4;
    let mut samples = vec![0.0; (2 * radius + 1) as usize];
    samples[radius as usize] = 1.0;
    let shift_radius = radius - quasi.j0() as i64;
    let (first, c) = if quasi.ell() == 1 {
        (-shift_radius, quasi_map(quasi, &samples, shift_radius))
    } else {
        blend_coefficients(&blend, &samples, shift_radius, ALL)
    };
    c.into_iter()
        .enumerate()
        .map(|(i, v)| (first + i as i64, v))
        .filter(|(_, v)| v.abs() > 1e-15)
        .collect()
}
