//! Centered cardinal B-splines, piecewise polynomials and Lagrange edge extensions.
//!
//! `M_n` is the cardinal B-spline of order `n` (degree `n - 1`) with integer knots,
//! shifted so its support is `[-n/2, n/2]`. Values are computed with the uniform
//! Cox-de Boor triangle; point values at knots are right-hand limits.

use crate::error::{Error, Result};

/// Largest B-spline order handled by the fixed-size evaluation buffers.
pub const MAX_ORDER: usize = 8;

fn check_even_order(two_ell: usize) -> Result<()> {
    if two_ell == 0 || two_ell % 2 != 0 || two_ell > MAX_ORDER {
        return Err(Error::UnsupportedOrder(two_ell));
    }
    Ok(())
}

/// Uniform Cox-de Boor triangle: returns `N_n(u + i)` for `i = 0..n`, where `N_n`
/// is the cardinal B-spline supported on `[0, n]` and `u` lies in `[0, 1)`.
#[inline]
pub(crate) fn cardinal_values(n: usize, u: f64) -> [f64; MAX_ORDER] {
    debug_assert!((1..=MAX_ORDER).contains(&n));
    let mut b = [0.0; MAX_ORDER];
    b[0] = 1.0;
    for k in 2..=n {
        let inv = 1.0 / (k - 1) as f64;
        for i in (0..k).rev() {
            let x = u + i as f64;
            let here = if i < k - 1 { b[i] } else { 0.0 };
            let below = if i > 0 { b[i - 1] } else { 0.0 };
            b[i] = (x * here + (k as f64 - x) * below) * inv;
        }
    }
    b
}

/// Splits `t + n/2` into integer part `j` and fraction `u`, so that
/// `M_n(t - s) = N_n(u + j - s)` for `s = j - n + 1 ..= j`.
#[inline]
pub(crate) fn locate(n: usize, t: f64) -> (i64, f64) {
    let big_t = t + 0.5 * n as f64;
    let j = big_t.floor();
    (j as i64, big_t - j)
}

/// `M_n(x)` for any order `1 <= n <= 8` (odd orders included).
#[inline]
pub(crate) fn centered_value(n: usize, x: f64) -> f64 {
    let half = 0.5 * n as f64;
    if x < -half || x >= half {
        return 0.0;
    }
    let (j, u) = locate(n, x);
    // s = 0 means i = j.
    if j < 0 || j as usize >= n {
        return 0.0;
    }
    cardinal_values(n, u)[j as usize]
}

/// `sum_s c(s) M_n^{(order)}(t - s)`, with derivative coefficients formed by
/// backward differences of `c`.
pub(crate) fn shifted_sum(n: usize, order: usize, t: f64, c: impl Fn(i64) -> f64) -> f64 {
    debug_assert!(order < n);
    let (j, u) = locate(n, t);
    let k = n - order;
    let vals = cardinal_values(k, u);
    let mut acc = 0.0;
    for (i, v) in vals.iter().take(k).enumerate() {
        if *v == 0.0 {
            continue;
        }
        let s = j - i as i64;
        let coeff = if order == 0 {
            c(s)
        } else {
            backward_difference(order, s, &c)
        };
        acc += coeff * v;
    }
    acc
}

fn backward_difference(order: usize, s: i64, c: &impl Fn(i64) -> f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for i in 0..=order {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * c(s - i as i64);
        binom = binom * (order - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `M_{2l}(x)`. Even, nonnegative and zero for `|x| >= l`.
pub fn bspline_eval(x: f64, two_ell: usize) -> Result<f64> {
    check_even_order(two_ell)?;
    Ok(centered_value(two_ell, x))
}

/// `M_{2l}^{(order)}(x)`, taking right-hand limits at knots.
pub fn bspline_derivative(x: f64, two_ell: usize, order: usize) -> Result<f64> {
    check_even_order(two_ell)?;
    if order >= two_ell {
        return Err(Error::DerivativeOrder {
            order,
            spline_order: two_ell,
        });
    }
    Ok(shifted_sum(two_ell, order, x, |s| if s == 0 { 1.0 } else { 0.0 }))
}

/// Integer binomial coefficient as a float.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Polynomial pieces of `N_n` on `[i, i+1]` written in the local variable `u = x - i`.
/// Row `i` holds ascending coefficients.
pub(crate) fn cardinal_pieces(n: usize) -> Vec<Vec<f64>> {
    let mut b: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 2..=n {
        let inv = 1.0 / (k - 1) as f64;
        let mut next = vec![vec![0.0; k]; k];
        for (i, row) in next.iter_mut().enumerate() {
            // (u + i) * N_{k-1}(x)
            if i < k - 1 {
                for (d, c) in b[i].iter().enumerate() {
                    row[d] += i as f64 * c * inv;
                    row[d + 1] += c * inv;
                }
            }
            // (k - i - u) * N_{k-1}(x - 1); piece i-1 of N_{k-1} in its own local variable is again u.
            if i > 0 {
                for (d, c) in b[i - 1].iter().enumerate() {
                    row[d] += (k - i) as f64 * c * inv;
                    row[d + 1] -= c * inv;
                }
            }
        }
        b = next;
    }
    b
}

/// Rewrites `p(y) = sum c_d y^d` as a polynomial in `z` with `y = z + delta`.
pub(crate) fn taylor_shift(coeffs: &[f64], delta: f64) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    let n = out.len();
    if delta == 0.0 {
        return out;
    }
    for i in 0..n {
        for k in (i..n - 1).rev() {
            out[k] += delta * out[k + 1];
        }
    }
    out
}

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

/// Piecewise polynomial with pieces stored in powers of `(x - left breakpoint)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breaks: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    /// `breaks` must be strictly increasing with one more entry than `pieces`.
    pub fn new(breaks: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.len() != pieces.len() + 1 {
            return Err(Error::LengthMismatch {
                expected: pieces.len() + 1,
                got: breaks.len(),
            });
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breaks, pieces })
    }

    /// The centered cardinal B-spline `M_n` as a piecewise polynomial.
    pub fn bspline(two_ell: usize) -> Result<Self> {
        check_even_order(two_ell)?;
        Ok(Self::centered(two_ell))
    }

    pub(crate) fn centered(n: usize) -> Self {
        let half = 0.5 * n as f64;
        let breaks = (0..=n).map(|i| i as f64 - half).collect();
        Self {
            breaks,
            pieces: cardinal_pieces(n),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    /// Closed support `[first breakpoint, last breakpoint]`.
    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// Highest stored degree.
    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return None;
        }
        let idx = self.breaks.partition_point(|b| *b <= x);
        Some(idx - 1)
    }

    /// Value at `x`; zero outside the support, right-continuous at breakpoints.
    pub fn eval(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(i) => horner(&self.pieces[i], x - self.breaks[i]),
            None => 0.0,
        }
    }

    /// Derivative of the given order, piece by piece.
    pub fn derivative(&self, order: usize) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for _ in 0..order {
                    if q.len() <= 1 {
                        q = vec![0.0];
                        break;
                    }
                    q = q.iter().enumerate().skip(1).map(|(d, c)| d as f64 * c).collect();
                }
                q
            })
            .collect();
        Self {
            breaks: self.breaks.clone(),
            pieces,
        }
    }

    /// Exact integral over the whole support.
    pub fn integral(&self) -> f64 {
        self.pieces
            .iter()
            .zip(self.breaks.windows(2))
            .map(|(p, w)| {
                let len = w[1] - w[0];
                p.iter()
                    .enumerate()
                    .map(|(d, c)| c * len.powi(d as i32 + 1) / (d + 1) as f64)
                    .sum::<f64>()
            })
            .sum()
    }

    /// `p(x - delta)`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            breaks: self.breaks.iter().map(|b| b + delta).collect(),
            pieces: self.pieces.clone(),
        }
    }

    /// `sum_k weight_k p_k`, re-expanded on the union of all breakpoints.
    pub fn linear_combination(terms: &[(f64, &PiecewisePolynomial)]) -> Self {
        let mut breaks: Vec<f64> = terms.iter().flat_map(|(_, p)| p.breaks.iter().copied()).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let degree = terms.iter().map(|(_, p)| p.degree()).max().unwrap_or(0);
        let mut pieces = Vec::with_capacity(breaks.len().saturating_sub(1));
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut acc = vec![0.0; degree + 1];
            for (weight, p) in terms {
                if let Some(i) = p.piece_index(mid) {
                    let local = taylor_shift(&p.pieces[i], w[0] - p.breaks[i]);
                    for (a, c) in acc.iter_mut().zip(local) {
                        *a += weight * c;
                    }
                }
            }
            pieces.push(acc);
        }
        if breaks.len() < 2 {
            return Self {
                breaks: vec![0.0, 0.0],
                pieces: vec![vec![0.0]],
            };
        }
        Self { breaks, pieces }
    }
}

/// Polynomial through a set of nodes, evaluated in barycentric form.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangePolynomial {
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangePolynomial {
    pub fn new(nodes: &[f64], values: &[f64]) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        let mut weights = vec![1.0; nodes.len()];
        for (i, xi) in nodes.iter().enumerate() {
            for (k, xk) in nodes.iter().enumerate() {
                if i != k {
                    let diff = xi - xk;
                    if diff == 0.0 {
                        return Err(Error::DuplicateNode(*xi));
                    }
                    weights[i] /= diff;
                }
            }
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            values: values.to_vec(),
            weights,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Degree bound `len(nodes) - 1`.
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xi, yi), wi) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let diff = x - xi;
            if diff == 0.0 {
                return *yi;
            }
            let t = wi / diff;
            num += t * yi;
            den += t;
        }
        num / den
    }
}

/// Interpolating polynomial through `(nodes, values)`.
pub fn lagrange_extension(nodes: &[f64], values: &[f64]) -> Result<LagrangePolynomial> {
    LagrangePolynomial::new(nodes, values)
}

/// Left and right polynomial continuations of edge samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionPolynomials {
    pub left: LagrangePolynomial,
    pub right: LagrangePolynomial,
}

impl ExtensionPolynomials {
    pub fn new(
        left_nodes: &[f64],
        left_values: &[f64],
        right_nodes: &[f64],
        right_values: &[f64],
    ) -> Result<Self> {
        Ok(Self {
            left: LagrangePolynomial::new(left_nodes, left_values)?,
            right: LagrangePolynomial::new(right_nodes, right_values)?,
        })
    }
}
