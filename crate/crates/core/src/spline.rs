//! Truncated spline functions on a scaled equidistant grid.

use std::ops::RangeInclusive;

use crate::bspline::{cardinal_pieces, locate, shifted_sum, taylor_shift, PiecewisePolynomial};
use crate::error::{Error, Result};
use crate::weight::RecoveryGrid;

/// `x -> sum_t c_t M_{2l}(R x / h - t)` on `[-rho a_m, rho a_m]` and zero outside.
///
/// `R` is the refinement factor (1 for quasi-interpolants, `2^kappa` for the
/// blended interpolants). Coefficients are stored for a contiguous index range
/// and evaluation touches only the `2l` basis functions active at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineFunction {
    grid: RecoveryGrid,
    order: usize,
    refinement: u32,
    first: i64,
    coeffs: Vec<f64>,
}

impl SplineFunction {
    pub(crate) fn from_parts(grid: RecoveryGrid, order: usize, refinement: u32, first: i64, coeffs: Vec<f64>) -> Self {
        Self {
            grid,
            order,
            refinement,
            first,
            coeffs,
        }
    }

    pub fn grid(&self) -> &RecoveryGrid {
        &self.grid
    }

    /// B-spline order `2l`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Refinement factor `R`; knots sit at multiples of `h / R`.
    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub fn coefficient_range(&self) -> RangeInclusive<i64> {
        self.first..=self.first + self.coeffs.len() as i64 - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `M(R x / h - t)`, zero outside the stored range.
    pub fn coefficient(&self, t: i64) -> f64 {
        let idx = t - self.first;
        if idx < 0 {
            return 0.0;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(0.0)
    }

    /// Truncation interval `[-rho a_m, rho a_m]`.
    pub fn support(&self) -> (f64, f64) {
        (-self.grid.half_width(), self.grid.half_width())
    }

    /// Distance between consecutive knots.
    pub fn knot_step(&self) -> f64 {
        self.grid.step() / self.refinement as f64
    }

    #[inline]
    fn basis_argument(&self, x: f64) -> f64 {
        x * self.refinement as f64 / self.grid.step()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !self.grid.contains(x) {
            return 0.0;
        }
        shifted_sum(self.order, 0, self.basis_argument(x), |t| self.coefficient(t))
    }

    /// Derivative of the given order inside the support (right-hand limits at knots).
    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        if order >= self.order {
            return Err(Error::DerivativeOrder {
                order,
                spline_order: self.order,
            });
        }
        if !self.grid.contains(x) {
            return Ok(0.0);
        }
        let scale = (self.refinement as f64 / self.grid.step()).powi(order as i32);
        Ok(scale * shifted_sum(self.order, order, self.basis_argument(x), |t| self.coefficient(t)))
    }

    /// Knot index bound `R m`; knots are `knot(t)` for `|t| <= R m`.
    pub fn knot_count_half(&self) -> i64 {
        self.refinement as i64 * self.grid.m() as i64
    }

    /// Knot `t h / R`, with the outermost knots pinned to the interval ends.
    pub fn knot(&self, t: i64) -> f64 {
        let n = self.knot_count_half();
        if t == n {
            self.grid.half_width()
        } else if t == -n {
            -self.grid.half_width()
        } else {
            t as f64 * self.knot_step()
        }
    }

    /// All knots inside the support, in increasing order, including both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let n = self.knot_count_half();
        (-n..=n).map(|t| self.knot(t)).collect()
    }

    /// Pointwise `alpha * self`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= alpha);
        out
    }

    /// Explicit piecewise polynomial form on the knot intervals of the support.
    pub fn to_piecewise(&self) -> PiecewisePolynomial {
        let n = self.order;
        let pieces = cardinal_pieces(n);
        let half = self.knot_count_half();
        let step = self.knot_step();
        let mut out_pieces = Vec::with_capacity(2 * half as usize);
        for t in -half..half {
            // On [t, t+1] in basis units the active shifts are s = j - i with u running over [0, 1).
            let (j, _) = locate(n, t as f64 + 0.5);
            let mut local = vec![0.0; n];
            for (i, piece) in pieces.iter().enumerate() {
                let c = self.coefficient(j - i as i64);
                if c == 0.0 {
                    continue;
                }
                for (d, p) in piece.iter().enumerate() {
                    local[d] += c * p;
                }
            }
            // The piece variable u starts at t; for even order the breakpoints are integer.
            let offset = (t as f64 + 0.5 * n as f64) - j as f64;
            let local = taylor_shift(&local, offset);
            let mut scale = 1.0;
            let in_x: Vec<f64> = local
                .iter()
                .map(|c| {
                    let v = c * scale;
                    scale /= step;
                    v
                })
                .collect();
            out_pieces.push(in_x);
        }
        let breaks = self.breakpoints();
        PiecewisePolynomial::new(breaks, out_pieces).expect("knots are strictly increasing")
    }
}
