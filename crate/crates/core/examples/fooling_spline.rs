// Splines that vanish at given points and show the lower bound for sampling recovery.

use freud_spline::analysis::spline_weighted_norm;
use freud_spline::rates::recovery_exponent;
use freud_spline::space::fooling_resolution;
use freud_spline::{fooling_spline, FreudWeight, IntegrationSpec, OperatorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run_example() {
    let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
    let spec = IntegrationSpec::default();
    let (r, p, q) = (2, f64::INFINITY, 1.0);
    let e = recovery_exponent(r as f64, 2.0, p, q);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [8, 16, 32] {
        let l = cfg.grid(fooling_resolution(n, 2)).unwrap().half_width();
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(-l..l)).collect();
        let phi = fooling_spline(&pts, r, p, q, &cfg, &spec).unwrap();
        let at_points = pts.iter().map(|x| phi.eval(*x).abs()).fold(0.0, f64::max);
        let norm = spline_weighted_norm(&phi, 0, q, &cfg.weight, &spec).unwrap();
        println!(
            "n = {n}: max |phi| at points {at_points:.1e}, ||phi||_(L_1,w) = {norm:.4e}, scaled by n^{e}: {:.4}",
            norm * (n as f64).powf(e)
        );
        assert_eq!(at_points, 0.0);
    }
}

fn main() {
    run_example();
}
