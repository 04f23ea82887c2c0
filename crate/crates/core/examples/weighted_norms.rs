// Weighted Lebesgue and Sobolev norms, and the recovery error of an operator.

use freud_spline::analysis::{spline_weighted_norm, weighted_lq_norm};
use freud_spline::{
    apply_q_truncated, recovery_error, reference_weighted_integral, weighted_sobolev_norm, CorpusFunction, Domain,
    FreudWeight, IntegrationSpec, OperatorConfig, RealFunction,
};

fn run_example() {
    let w = FreudWeight::gaussian();
    let spec = IntegrationSpec::default();

    let gauss = CorpusFunction::gauss();
    let integral = reference_weighted_integral(&gauss, &w, Domain::Real, &spec).unwrap();
    println!("int exp(-x^2/2) w = {integral:.12} (sqrt(pi) = {:.12})", std::f64::consts::PI.sqrt());
    assert!((integral - std::f64::consts::PI.sqrt()).abs() < 1e-10);

    let kink = CorpusFunction::kink(2).unwrap();
    for q in [1.0, 2.0, f64::INFINITY] {
        let n = weighted_lq_norm(&kink, q, &w, Domain::Real, &spec).unwrap();
        println!("|| {kink} ||_(L_{q},w) = {n:.10}");
    }
    let sob = weighted_sobolev_norm(&kink, 2, 2.0, &w, &spec).unwrap();
    println!("|| {kink} ||_(W^2_2,w) = {sob:.10}");

    let cfg = OperatorConfig::new(w, 2).unwrap();
    for m in [16, 32, 64] {
        let q = apply_q_truncated(|x: f64| kink.eval(x), m, &cfg).unwrap();
        let e = recovery_error(&kink, &q, 2.0, &w, &spec).unwrap();
        let s = spline_weighted_norm(&q, 0, 2.0, &w, &spec).unwrap();
        println!("m = {m}: error {e:.3e}, ||Q f|| = {s:.6}");
    }
}

fn main() {
    run_example();
}
