// Blended interpolation `P = R + Q - RQ`, truncated and extended.

use freud_spline::{
    apply_p_bar, apply_p_truncated, apply_q_truncated, apply_r_truncated, apply_rq_truncated, blended_stencil,
    lambda_catalog, FreudWeight, OperatorConfig,
};

fn run_example() {
    let stencil = blended_stencil(&lambda_catalog(2).unwrap());
    println!("l = 2 blended stencil on the refined grid:");
    for (s, v) in stencil.iter().filter(|(s, _)| *s >= 0) {
        println!("  lambda_{s} = {v:.6}");
    }

    let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
    let m = 16;
    let f = |x: f64| (3.0 * x).sin() * (-0.25 * x * x).exp();
    let p = apply_p_truncated(f, m, &cfg).unwrap();
    let grid = cfg.grid(m).unwrap();
    let gap = (-(m as i64)..=m as i64)
        .map(|k| (p.eval(grid.node(k)) - f(grid.node(k))).abs())
        .fold(0.0, f64::max);
    println!("max node gap of P: {gap:.2e}");
    assert!(gap < 1e-9);

    let r = apply_r_truncated(f, m, &cfg).unwrap();
    let q = apply_q_truncated(f, m, &cfg).unwrap();
    let rq = apply_rq_truncated(f, m, &cfg).unwrap();
    let x = 0.37;
    let blend = r.eval(x) + q.eval(x) - rq.eval(x);
    println!("P f({x}) = {:.12}, R + Q - RQ = {blend:.12}", p.eval(x));
    assert!((p.eval(x) - blend).abs() < 1e-12);

    let pbar = apply_p_bar(f, m, &cfg).unwrap();
    let gap_bar = (-(m as i64)..=m as i64)
        .map(|k| (pbar.eval(grid.node(k)) - f(grid.node(k))).abs())
        .fold(0.0, f64::max);
    println!("max node gap of Pbar: {gap_bar:.2e}");
    assert!(gap_bar < 1e-9);
}

fn main() {
    run_example();
}
