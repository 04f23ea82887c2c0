//! Predicted convergence exponents. Exponents are positive; errors decay like `n^{-exponent}`.
//! `p = inf` and `q = inf` are passed as `f64::INFINITY`.

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `r_lambda = r (1 - 1/lambda)`.
pub fn r_lambda(r: f64, lambda: f64) -> f64 {
    r * (1.0 - 1.0 / lambda)
}

/// `delta_{lambda,p,q}`: `(1 - 1/lambda)(1/p - 1/q)` for `p <= q`, else `(1/lambda)(1/q - 1/p)`.
pub fn delta(lambda: f64, p: f64, q: f64) -> f64 {
    if p <= q {
        (1.0 - 1.0 / lambda) * (inv(p) - inv(q))
    } else {
        (inv(q) - inv(p)) / lambda
    }
}

/// `r_{lambda,p,q} = r_lambda - delta_{lambda,p,q}`, the sampling recovery exponent.
pub fn recovery_exponent(r: f64, lambda: f64, p: f64, q: f64) -> f64 {
    r_lambda(r, lambda) - delta(lambda, p, q)
}

/// `r_lambda / d - delta_{lambda,p,q}` for tensor-product recovery with `n` total samples.
pub fn recovery_exponent_d(r: f64, lambda: f64, p: f64, q: f64, d: usize) -> f64 {
    r_lambda(r, lambda) / d as f64 - delta(lambda, p, q)
}

/// `r_lambda - (1/lambda)(1 - 1/p)`, the quadrature exponent.
pub fn quadrature_exponent(r: f64, lambda: f64, p: f64) -> f64 {
    quadrature_exponent_d(r, lambda, p, 1)
}

/// `r_lambda / d - (1/lambda)(1 - 1/p)`.
pub fn quadrature_exponent_d(r: f64, lambda: f64, p: f64, d: usize) -> f64 {
    r_lambda(r, lambda) / d as f64 - (1.0 - inv(p)) / lambda
}

/// Exponent at which a method of order `2l` saturates: `2l (1 - 1/lambda)`.
pub fn saturation_exponent(ell: usize, lambda: f64) -> f64 {
    r_lambda(2.0 * ell as f64, lambda)
}

/// Least-squares slope of `ln y` against `ln x`. `None` for fewer than two points or
/// a degenerate abscissa.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn gaussian_exponents() {
        assert_abs_diff_eq!(recovery_exponent(2.0, 2.0, 2.0, 2.0), 1.0);
        assert_abs_diff_eq!(recovery_exponent(3.0, 2.0, 1.0, INF), 1.0);
        assert_abs_diff_eq!(recovery_exponent(2.0, 2.0, INF, 1.0), 0.5);
        assert_abs_diff_eq!(quadrature_exponent(2.0, 2.0, 1.0), 1.0);
        assert_abs_diff_eq!(quadrature_exponent(3.0, 2.0, INF), 1.0);
        assert_abs_diff_eq!(quadrature_exponent(2.0, 2.0, 2.0), 0.75);
        assert_abs_diff_eq!(saturation_exponent(2, 2.0), 2.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0].iter().map(|x: &f64| (*x, 3.0 * x.powf(-1.25))).collect();
        assert_abs_diff_eq!(loglog_slope(&pts).unwrap(), -1.25, epsilon = 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn delta_regimes() {
        assert_eq!(delta(3.0, 2.0, 2.0), 0.0);
        assert_abs_diff_eq!(delta(3.0, 1.0, 2.0), (2.0 / 3.0) * 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(delta(3.0, 2.0, 1.0), 0.5 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(recovery_exponent_d(4.0, 2.0, 2.0, 2.0, 2), 1.0);
    }
}
