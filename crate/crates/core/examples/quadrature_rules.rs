// Weighted quadrature rules generated by `Q` and `P`, and their CSV export.

use freud_spline::{build_rule, integrate, FreudWeight, OperatorConfig, RuleKind};

fn run_example() {
    let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
    let exact = std::f64::consts::PI.sqrt();
    for kind in [RuleKind::Q, RuleKind::P] {
        for m in [8, 16, 32] {
            let rule = build_rule(kind, m, &cfg).unwrap();
            let v = integrate(&rule, |x: f64| (-0.5 * x * x).exp()).unwrap();
            println!(
                "{kind}-rule m = {m}: {} nodes, sum of weights {:.10}, error on exp(-x^2/2) {:.2e}",
                rule.len(),
                rule.weight_sum(),
                (v - exact).abs()
            );
        }
    }

    let rule = build_rule(RuleKind::Q, 4, &cfg).unwrap();
    let dir = std::env::temp_dir().join(format!("freud-rule-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q_rule_m4.csv");
    rule.export_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    assert_eq!(text.lines().count(), rule.len() + 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn main() {
    run_example();
}
