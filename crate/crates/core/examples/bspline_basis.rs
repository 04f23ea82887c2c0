// Centred cardinal B-splines, their derivatives and polynomial extension.

use freud_spline::{bspline_derivative, bspline_eval, lagrange_extension, PiecewisePolynomial};

fn run_example() {
    for two_ell in [2, 4, 6] {
        let peak = bspline_eval(0.0, two_ell).unwrap();
        let slope = bspline_derivative(0.5, two_ell, 1).unwrap();
        let pp = PiecewisePolynomial::bspline(two_ell).unwrap();
        println!("M_{two_ell}(0) = {peak:.6}, M'_{two_ell}(1/2) = {slope:.6}, integral = {:.12}", pp.integral());
        assert!((pp.integral() - 1.0).abs() < 1e-12);
        // Partition of unity.
        let sum: f64 = (-4..=4).map(|k| bspline_eval(0.3 - k as f64, two_ell).unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    // Cubic through four nodes, evaluated outside them.
    let nodes = [1.0, 2.0, 3.0, 4.0];
    let values: Vec<f64> = nodes.iter().map(|x| x * x * x - x).collect();
    let p = lagrange_extension(&nodes, &values).unwrap();
    println!("extension at 6: {} (exact 210)", p.eval(6.0));
    assert!((p.eval(6.0) - 210.0).abs() < 1e-9);
}

fn main() {
    run_example();
}
