// Tensor-product recovery and quadrature on the plane.

use freud_spline::tensor::tensor_node_count;
use freud_spline::{
    apply_pd_truncated, apply_qd_truncated, integrate_d, recovery_error_d, CorpusFunction, FreudWeight, IntegrationSpec,
    MultiFunction, OperatorConfig, RuleKind, Separable,
};

fn run_example() {
    let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
    let spec = IntegrationSpec::default();
    let f = Separable::new(vec![CorpusFunction::gauss(), CorpusFunction::oscil()]).unwrap();

    let m = 8;
    let p = apply_pd_truncated(&f, 2, m, &cfg).unwrap();
    let grid = cfg.grid(m).unwrap();
    let mut gap: f64 = 0.0;
    for i in -(m as i64)..=m as i64 {
        for k in -(m as i64)..=m as i64 {
            let x = [grid.node(i), grid.node(k)];
            gap = gap.max((p.eval(&x) - f.eval(&x)).abs());
        }
    }
    println!("P_2 interpolation gap at {} tensor nodes: {gap:.2e}", (2 * m + 1).pow(2));
    assert!(gap < 1e-9);

    for m in [4, 8] {
        let q = apply_qd_truncated(&f, 2, m, &cfg).unwrap();
        let e = recovery_error_d(&f, &q, 2.0, &cfg.weight, &spec).unwrap();
        let i = integrate_d(RuleKind::Q, &f, 2, m, &cfg).unwrap();
        println!("m = {m}: {} nodes, L_2 error {e:.3e}, integral {i:.8}", tensor_node_count(m, 2, &cfg));
    }
}

fn main() {
    run_example();
}
