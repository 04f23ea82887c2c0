//! Quasi-interpolation coefficients, the kernel `L`, and the truncated operators
//! `Q_{rho,m}` and its edge-extended variant.

use std::fmt;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bspline::{shifted_sum, ExtensionPolynomials, PiecewisePolynomial, MAX_ORDER};
#[cfg(test)]
use crate::bspline::centered_value;
use crate::error::{Error, Result};
use crate::spline::SplineFunction;
use crate::weight::{select_rho, FreudWeight, RecoveryGrid};

/// Even stencil `lambda(j)`, `|j| <= j0`, for the B-spline of order `2l`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiCoefficients {
    ell: usize,
    values: Vec<f64>,
}

impl QuasiCoefficients {
    /// Unvalidated stencil; `values[i]` is `lambda(i - j0)`. Use [`validate_coefficients`]
    /// or [`QuasiCoefficients::validated`] before building operators.
    pub fn new(ell: usize, values: Vec<f64>) -> Result<Self> {
        if ell == 0 || 2 * ell > MAX_ORDER {
            return Err(Error::UnsupportedOrder(2 * ell));
        }
        if values.len() % 2 == 0 {
            return Err(Error::LengthMismatch {
                expected: values.len() + 1,
                got: values.len(),
            });
        }
        Ok(Self { ell, values })
    }

    /// Stencil that passes every check of [`validate_coefficients`].
    pub fn validated(ell: usize, values: Vec<f64>) -> Result<Self> {
        let c = Self::new(ell, values)?;
        validate_coefficients(&c).map_err(Error::InvalidCoefficients)?;
        Ok(c)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// B-spline order `2l`.
    pub fn order(&self) -> usize {
        2 * self.ell
    }

    pub fn j0(&self) -> usize {
        self.values.len() / 2
    }

    /// `lambda(j)`, zero for `|j| > j0`.
    pub fn lambda(&self, j: i64) -> f64 {
        let idx = j + self.j0() as i64;
        if idx < 0 {
            return 0.0;
        }
        self.values.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Refinement exponent `kappa = ceil(log2(2l) - 1)`, the least `kappa` with `2^kappa >= l`.
    pub fn kappa(&self) -> u32 {
        let mut k = 0;
        while (1usize << k) < self.ell {
            k += 1;
        }
        k
    }

    /// Hash of the stencil bits, used as a cache key.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.ell.hash(&mut h);
        for v in &self.values {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Built-in stencils: piecewise linear interpolation (`l = 1`) and the cubic
/// quasi-interpolant `(-f(s-1) + 8 f(s) - f(s+1)) / 6` (`l = 2`).
pub fn lambda_catalog(ell: usize) -> Result<QuasiCoefficients> {
    match ell {
        1 => QuasiCoefficients::new(1, vec![1.0]),
        2 => QuasiCoefficients::new(2, vec![-1.0 / 6.0, 4.0 / 3.0, -1.0 / 6.0]),
        other => Err(Error::NoCatalogEntry(other)),
    }
}

/// One failed check of [`validate_coefficients`].
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientViolation {
    NotEven { j: i64, left: f64, right: f64 },
    HalfWidthTooSmall { j0: usize, ell: usize },
    Reproduction { degree: usize, max_error: f64 },
}

impl fmt::Display for CoefficientViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotEven { j, left, right } => {
                write!(f, "stencil is not even: lambda(-{j}) = {left} but lambda({j}) = {right}")
            }
            Self::HalfWidthTooSmall { j0, ell } => {
                write!(f, "half-width j0 = {j0} is below ell - 1 = {}", ell - 1)
            }
            Self::Reproduction { degree, max_error } => {
                write!(f, "monomial x^{degree} is not reproduced (max error {max_error:e})")
            }
        }
    }
}

/// Tolerance of the monomial reproduction check.
pub const REPRODUCTION_TOLERANCE: f64 = 1e-9;
const REPRODUCTION_POINTS: usize = 50;

/// Checks evenness, `j0 >= l - 1` and reproduction of `x^k`, `k <= 2l - 1`, at 50
/// pseudo-random points of `[0, 1]`. Only the first failing monomial is reported.
pub fn validate_coefficients(c: &QuasiCoefficients) -> std::result::Result<(), Vec<CoefficientViolation>> {
    let mut violations = Vec::new();
    let j0 = c.j0() as i64;
    for j in 1..=j0 {
        let (left, right) = (c.lambda(-j), c.lambda(j));
        if left != right {
            violations.push(CoefficientViolation::NotEven { j, left, right });
        }
    }
    if c.j0() + 1 < c.ell() {
        violations.push(CoefficientViolation::HalfWidthTooSmall {
            j0: c.j0(),
            ell: c.ell(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let points: Vec<f64> = (0..REPRODUCTION_POINTS).map(|_| rng.random::<f64>()).collect();
    for degree in 0..c.order() {
        let max_error = points
            .iter()
            .map(|&x| {
                let approx = unit_operator(c, x, |k| (k as f64).powi(degree as i32));
                (approx - x.powi(degree as i32)).abs()
            })
            .fold(0.0, f64::max);
        if max_error.is_nan() || max_error > REPRODUCTION_TOLERANCE {
            violations.push(CoefficientViolation::Reproduction { degree, max_error });
            break;
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// `Q f(x) = sum_s sum_j lambda(j) f(s - j) M(x - s)` on the unit grid.
fn unit_operator(c: &QuasiCoefficients, x: f64, f: impl Fn(i64) -> f64) -> f64 {
    let j0 = c.j0() as i64;
    shifted_sum(c.order(), 0, x, |s| (-j0..=j0).map(|j| c.lambda(j) * f(s - j)).sum())
}

/// Kernel `L(x) = sum_j lambda(j) M(x - j)`, supported on `[-(l + j0), l + j0]`.
pub fn build_kernel(c: &QuasiCoefficients) -> PiecewisePolynomial {
    let base = PiecewisePolynomial::centered(c.order());
    let j0 = c.j0() as i64;
    let shifted: Vec<(f64, PiecewisePolynomial)> =
        (-j0..=j0).map(|j| (c.lambda(j), base.shifted(j as f64))).collect();
    let terms: Vec<(f64, &PiecewisePolynomial)> = shifted.iter().map(|(w, p)| (*w, p)).collect();
    PiecewisePolynomial::linear_combination(&terms)
}

/// `L(x)` evaluated directly from the B-spline recurrence.
#[cfg(test)]
pub(crate) fn kernel_value(c: &QuasiCoefficients, x: f64) -> f64 {
    let j0 = c.j0() as i64;
    (-j0..=j0).map(|j| c.lambda(j) * centered_value(c.order(), x - j as f64)).sum()
}

/// Source of function samples. Any `FnMut(f64) -> f64` is a sampler; wrap
/// fallible evaluators in [`Fallible`].
pub trait Sampler {
    fn sample(&mut self, x: f64) -> std::result::Result<f64, String>;
}

impl<F: FnMut(f64) -> f64> Sampler for F {
    fn sample(&mut self, x: f64) -> std::result::Result<f64, String> {
        Ok(self(x))
    }
}

/// Adapter for evaluators that can fail.
pub struct Fallible<G>(pub G);

impl<G: FnMut(f64) -> std::result::Result<f64, String>> Sampler for Fallible<G> {
    fn sample(&mut self, x: f64) -> std::result::Result<f64, String> {
        (self.0)(x)
    }
}

/// Weight, stencil and truncation parameter shared by all operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorConfig {
    pub weight: FreudWeight,
    pub coefficients: QuasiCoefficients,
    pub rho: f64,
}

impl OperatorConfig {
    /// Catalog stencil for `ell` with the constructive choice of rho.
    pub fn new(weight: FreudWeight, ell: usize) -> Result<Self> {
        let coefficients = lambda_catalog(ell)?;
        Self::with_coefficients(weight, coefficients)
    }

    /// Custom stencil, validated, with the constructive choice of rho.
    pub fn with_coefficients(weight: FreudWeight, coefficients: QuasiCoefficients) -> Result<Self> {
        validate_coefficients(&coefficients).map_err(Error::InvalidCoefficients)?;
        let rho = select_rho(&weight, coefficients.ell(), coefficients.j0(), coefficients.kappa())?.chosen;
        Ok(Self {
            weight,
            coefficients,
            rho,
        })
    }

    /// Replaces the truncation parameter.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidRho(rho));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn ell(&self) -> usize {
        self.coefficients.ell()
    }

    pub fn j0(&self) -> usize {
        self.coefficients.j0()
    }

    pub fn grid(&self, m: usize) -> Result<RecoveryGrid> {
        RecoveryGrid::new(m, self.rho, &self.weight)
    }

    /// Largest sample index `m + l + j0 - 1`.
    pub fn sample_radius(&self, m: usize) -> i64 {
        (m + self.ell() + self.j0()) as i64 - 1
    }

    /// Largest shift `m + l - 1` in the truncated sums.
    pub fn shift_radius(&self, m: usize) -> i64 {
        (m + self.ell()) as i64 - 1
    }

    /// Number of samples `2(m + l + j0) - 1` used by `Q_{rho,m}` and `P_{rho,m}`.
    pub fn sample_count(&self, m: usize) -> usize {
        2 * (m + self.ell() + self.j0()) - 1
    }
}

/// Samples `f(x_k)` for `k = -radius..=radius` in increasing `k`.
pub(crate) fn sample_nodes(f: &mut impl Sampler, grid: &RecoveryGrid, radius: i64) -> Result<Vec<f64>> {
    (-radius..=radius)
        .map(|k| sample_one(f, grid, k))
        .collect()
}

fn sample_one(f: &mut impl Sampler, grid: &RecoveryGrid, k: i64) -> Result<f64> {
    let x = grid.node(k);
    match f.sample(x) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::Evaluator {
            index: k,
            x,
            reason: format!("non-finite value {v}"),
        }),
        Err(reason) => Err(Error::Evaluator { index: k, x, reason }),
    }
}

/// Samples `f` at `|k| <= m` only and continues the sample vector to `|k| <= radius`
/// with the Lagrange polynomials through the `2l` outermost samples on each side.
pub(crate) fn sample_extended(
    f: &mut impl Sampler,
    grid: &RecoveryGrid,
    ell: usize,
    radius: i64,
) -> Result<Vec<f64>> {
    let m = grid.m();
    if m < 2 * ell {
        return Err(Error::ResolutionTooSmall { m, min: 2 * ell });
    }
    let m = m as i64;
    let inner = sample_nodes(f, grid, m)?;
    if radius <= m {
        return Ok(inner[(m - radius) as usize..=(m + radius) as usize].to_vec());
    }
    let width = 2 * ell;
    let left_nodes: Vec<f64> = (0..width).map(|i| grid.node(-m + i as i64)).collect();
    let right_nodes: Vec<f64> = (0..width).map(|i| grid.node(m - (width - 1 - i) as i64)).collect();
    let ext = ExtensionPolynomials::new(
        &left_nodes,
        &inner[..width],
        &right_nodes,
        &inner[inner.len() - width..],
    )?;
    let mut out = Vec::with_capacity((2 * radius + 1) as usize);
    for k in -radius..-m {
        out.push(ext.left.eval(grid.node(k)));
    }
    out.extend_from_slice(&inner);
    for k in m + 1..=radius {
        out.push(ext.right.eval(grid.node(k)));
    }
    Ok(out)
}

/// `c_s = sum_j lambda(j) f_{s-j}` for `|s| <= shift_radius`, from samples indexed
/// `-sample_radius..=sample_radius`.
pub(crate) fn quasi_map(c: &QuasiCoefficients, samples: &[f64], shift_radius: i64) -> Vec<f64> {
    let sample_radius = (samples.len() as i64 - 1) / 2;
    let j0 = c.j0() as i64;
    (-shift_radius..=shift_radius)
        .map(|s| {
            (-j0..=j0)
                .map(|j| {
                    let k = s - j;
                    debug_assert!(k.abs() <= sample_radius);
                    c.lambda(j) * samples[(k + sample_radius) as usize]
                })
                .sum()
        })
        .collect()
}

/// Builds `Q_{rho,m}` from a full sample vector.
pub(crate) fn q_from_samples(cfg: &OperatorConfig, grid: RecoveryGrid, samples: &[f64]) -> SplineFunction {
    let shift = cfg.shift_radius(grid.m());
    let coeffs = quasi_map(&cfg.coefficients, samples, shift);
    SplineFunction::from_parts(grid, cfg.coefficients.order(), 1, -shift, coeffs)
}

/// `Q_{rho,m} f`: samples `f` at `x_k`, `|k| <= m + l + j0 - 1`, in increasing `k`.
pub fn apply_q_truncated(mut f: impl Sampler, m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let grid = cfg.grid(m)?;
    let samples = sample_nodes(&mut f, &grid, cfg.sample_radius(m))?;
    Ok(q_from_samples(cfg, grid, &samples))
}

/// `Q_{rho,m}` applied to the Lagrange-extended `f`; uses the `2m + 1` samples at `|k| <= m`.
pub fn apply_q_bar(mut f: impl Sampler, m: usize, cfg: &OperatorConfig) -> Result<SplineFunction> {
    let grid = cfg.grid(m)?;
    let samples = sample_extended(&mut f, &grid, cfg.ell(), cfg.sample_radius(m))?;
    Ok(q_from_samples(cfg, grid, &samples))
}
