//! Freud weights, Mhaskar-Rakhmanov-Saff numbers and equidistant recovery grids.
//!
//! A Freud weight is `w(x) = exp(-a|x|^lambda + b)` with `lambda > 1` and `a > 0`.
//! Its MRS number `a_m = nu_lambda * m^(1/lambda)` fixes the truncation interval
//! `[-rho a_m, rho a_m]` used by every sampling operator in this crate, and the
//! grid step is `h_m = rho a_m / m` so that `x_{+-m}` are the interval endpoints.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// `w(x) = exp(-a|x|^lambda + b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreudWeight {
    lambda: f64,
    a: f64,
    b: f64,
}

impl FreudWeight {
    /// Weight with `b = 0`. Rejects `lambda <= 1` and `a <= 0`.
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 1.0) {
            return Err(Error::InvalidWeight(format!("lambda must exceed 1, got {lambda}")));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidWeight(format!("a must be positive, got {a}")));
        }
        Ok(Self { lambda, a, b: 0.0 })
    }

    /// The unnormalised Gaussian weight `exp(-x^2/2)`.
    pub fn gaussian() -> Self {
        Self {
            lambda: 2.0,
            a: 0.5,
            b: 0.0,
        }
    }

    /// Sets the additive offset `b`. It only rescales norms by `e^b`.
    pub fn with_offset(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `|x|^lambda`, exact for the common `lambda = 2`.
    pub(crate) fn abs_pow(&self, x: f64) -> f64 {
        if self.lambda == 2.0 {
            x * x
        } else {
            x.abs().powf(self.lambda)
        }
    }

    /// `ln w(x) = -a|x|^lambda + b`.
    pub fn ln_eval(&self, x: f64) -> f64 {
        -self.a * self.abs_pow(x) + self.b
    }

    /// `w(x)`; underflows to zero for very large `|x|`.
    pub fn eval(&self, x: f64) -> f64 {
        self.ln_eval(x).exp()
    }

    /// `nu_lambda = (2^(lambda-1) Gamma(lambda)^(-1) Gamma(lambda/2)^2)^(1/lambda)`.
    pub fn nu(&self) -> f64 {
        let l = self.lambda;
        let g_half = gamma(l / 2.0);
        (2f64.powf(l - 1.0) / gamma(l) * g_half * g_half).powf(1.0 / l)
    }

    /// Mhaskar-Rakhmanov-Saff number `a_m = nu_lambda m^(1/lambda)`.
    pub fn mrs_number(&self, m: usize) -> Result<f64> {
        if m == 0 {
            return Err(Error::ZeroResolution);
        }
        Ok(self.nu() * (m as f64).powf(1.0 / self.lambda))
    }
}

/// Admissible truncation parameters derived from the local monotonicity
/// conditions of the quasi-interpolation and refined interpolation estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoBound {
    /// Largest rho with `a lambda (ell + j0) rho^lambda nu^lambda < 2 ell - 1`.
    pub rho_max_q: f64,
    /// Same condition for the refined operator, with `a` replaced by `a 2^(-kappa lambda)`
    /// and the stencil width `ell`.
    pub rho_max_r: f64,
    /// `min(0.9, rho_max_q / 2, rho_max_r / 2)`.
    pub chosen: f64,
}

/// Safety factor applied to both bounds so the strict inequalities hold with margin.
pub const RHO_SAFETY: f64 = 0.5;
/// Upper cap on the selected rho.
pub const RHO_CAP: f64 = 0.9;

/// Constructive choice of rho for quasi-interpolation half-width `j0` and refinement exponent `kappa`.
pub fn select_rho(w: &FreudWeight, ell: usize, j0: usize, kappa: u32) -> Result<RhoBound> {
    if ell == 0 {
        return Err(Error::Config("ell must be at least 1".into()));
    }
    if j0 + 1 < ell {
        return Err(Error::Config(format!("j0 = {j0} must be at least ell - 1 = {}", ell - 1)));
    }
    let lambda = w.lambda();
    let nu_pow = w.nu().powf(lambda);
    let budget = (2 * ell - 1) as f64;
    let rho_max_q = (budget / (w.a() * lambda * (ell + j0) as f64 * nu_pow)).powf(1.0 / lambda);
    let a_kappa = w.a() * 2f64.powf(-(kappa as f64) * lambda);
    let rho_max_r = (budget / (a_kappa * lambda * ell as f64 * nu_pow)).powf(1.0 / lambda);
    let chosen = RHO_CAP
        .min(RHO_SAFETY * rho_max_q)
        .min(RHO_SAFETY * rho_max_r);
    Ok(RhoBound {
        rho_max_q,
        rho_max_r,
        chosen,
    })
}

/// Equidistant nodes `x_k = k h_m` with `h_m = rho a_m / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryGrid {
    m: usize,
    rho: f64,
    a_m: f64,
    half_width: f64,
    h: f64,
}

impl RecoveryGrid {
    pub fn new(m: usize, rho: f64, w: &FreudWeight) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidRho(rho));
        }
        let a_m = w.mrs_number(m)?;
        let half_width = rho * a_m;
        Ok(Self {
            m,
            rho,
            a_m,
            half_width,
            h: half_width / m as f64,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn a_m(&self) -> f64 {
        self.a_m
    }

    /// Grid step `h_m`.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// `rho a_m`, the right end of the truncation interval.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `x_k = k h_m`; the endpoints `k = +-m` return `+-rho a_m` exactly.
    pub fn node(&self, k: i64) -> f64 {
        let m = self.m as i64;
        if k == m {
            self.half_width
        } else if k == -m {
            -self.half_width
        } else {
            k as f64 * self.h
        }
    }

    /// True when `x` lies in the closed truncation interval.
    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width
    }
}
