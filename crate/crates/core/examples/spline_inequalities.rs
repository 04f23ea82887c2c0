// Marcinkiewicz, Nikol'skii and Bernstein ratios over random spline ensembles.

use freud_spline::{ratio_ensemble, Boundedness, EnsembleSpec, FreudWeight, IntegrationSpec, OperatorConfig, RatioKind};

fn run_example() {
    let cfg = OperatorConfig::new(FreudWeight::gaussian(), 2).unwrap();
    let spec = IntegrationSpec::default();
    let inf = f64::INFINITY;
    let cases = [
        (RatioKind::MarcinkiewiczNode, 2.0, 2.0, 0),
        (RatioKind::MarcinkiewiczCoeff, 1.0, 1.0, 0),
        (RatioKind::Nikolskii, 2.0, inf, 0),
        (RatioKind::Bernstein, 2.0, 2.0, 1),
    ];
    for (kind, p, q, r) in cases {
        let mut ens = EnsembleSpec::new(kind, p, q, r, 11);
        ens.size = 16;
        let rows: Vec<_> = [16, 32, 64].iter().map(|m| ratio_ensemble(&ens, *m, &cfg, &spec).unwrap()).collect();
        let b = Boundedness::from_summaries(&rows);
        let medians: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.median)).collect();
        println!("{kind} p={p} q={q} r={r}: medians {medians:?}, spread {:.3}, drift {:.3}", b.spread, b.slope);
    }
}

fn main() {
    run_example();
}
