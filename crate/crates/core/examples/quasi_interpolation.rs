// Truncated quasi-interpolation `Q_{rho,m}` and its extended variant `Qbar`.

use freud_spline::{apply_q_bar, apply_q_truncated, lambda_catalog, FreudWeight, OperatorConfig};

fn run_example() {
    for ell in [1, 2] {
        let c = lambda_catalog(ell).unwrap();
        println!("l = {ell}: stencil {:?}", c.values());
    }

    let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
    let m = 32;
    let cubic = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
    let q = apply_q_truncated(cubic, m, &cfg).unwrap();
    let (lo, hi) = q.support();
    let worst = (0..=200)
        .map(|i| lo + (hi - lo) * i as f64 / 200.0)
        .map(|x| (q.eval(x) - cubic(x)).abs())
        .fold(0.0, f64::max);
    println!("cubic reproduced on [{lo:.3}, {hi:.3}] to {worst:.2e}; {} samples", cfg.sample_count(m));
    assert!(worst < 1e-9);
    assert_eq!(q.eval(hi + 0.1), 0.0);

    let mut calls = 0;
    let f = |x: f64| {
        calls += 1;
        (-x * x).exp()
    };
    let qbar = apply_q_bar(f, m, &cfg).unwrap();
    println!("Qbar used {calls} samples; Qbar f(0.4) = {:.6}", qbar.eval(0.4));
    assert_eq!(calls, 2 * m + 1);
}

fn main() {
    run_example();
}
