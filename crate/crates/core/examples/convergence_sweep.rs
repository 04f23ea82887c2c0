// A short convergence sweep with rate fit and report files.

use freud_spline::{emit_report, run_convergence, ExperimentConfig, OperatorKind};

fn run_example() {
    let cfg = ExperimentConfig::from_text("op = P\np = 2\nq = 2\nr = 2\nnmin = 33\nnmax = 513\n").unwrap();
    let report = run_convergence(&cfg).unwrap();
    for row in &report.rows {
        println!("n = {:5}  m = {:4}  error = {:.4e}", row.n, row.m, row.error.as_ref().unwrap());
    }
    println!(
        "{}: predicted -{:.3}, fitted {:.3}, pass = {}",
        report.function,
        report.predicted,
        report.slope().unwrap(),
        report.passes()
    );

    let quad = ExperimentConfig {
        op: OperatorKind::QuadQ,
        p: 1.0,
        q: 1.0,
        nmax: 513,
        ..cfg.clone()
    };
    let qr = run_convergence(&quad).unwrap();
    println!("quadrature: predicted -{:.3}, fitted {:.3}", qr.predicted, qr.slope().unwrap());

    let dir = std::env::temp_dir().join(format!("freud-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    emit_report(&report, &path).unwrap();
    print!("{}", std::fs::read_to_string(path.with_extension("summary")).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

fn main() {
    run_example();
}
