// Freud weights, Mhaskar-Rakhmanov-Saff numbers and the truncated recovery grid.

use freud_spline::{select_rho, FreudWeight, RecoveryGrid};

fn run_example() {
    for lambda in [1.5, 2.0, 4.0] {
        let w = FreudWeight::new(lambda, 1.0).unwrap();
        let a16 = w.mrs_number(16).unwrap();
        println!("lambda = {lambda}: nu = {:.6}, a_16 = {a16:.6}", w.nu());
        assert!(a16 > 0.0);
    }

    let w = FreudWeight::gaussian();
    let bound = select_rho(&w, 2, 1, 1).unwrap();
    println!(
        "l = 2: rho_max_Q = {:.4}, rho_max_R = {:.4}, chosen rho = {:.4}",
        bound.rho_max_q, bound.rho_max_r, bound.chosen
    );

    let grid = RecoveryGrid::new(32, bound.chosen, &w).unwrap();
    println!(
        "m = 32: a_m = {:.4}, h = {:.4}, interval [-{:.4}, {:.4}]",
        grid.a_m(),
        grid.step(),
        grid.half_width(),
        grid.half_width()
    );
    assert!((grid.node(32) - grid.half_width()).abs() < 1e-12);
    assert!(grid.contains(grid.half_width()) && !grid.contains(1.01 * grid.half_width()));
}

fn main() {
    run_example();
}
