use std::f64::consts::PI;

use freud_spline::analysis::spline_weighted_norm;
use freud_spline::tensor::{apply_to_block, AxisOperator};
use freud_spline::{
    apply_p_truncated, apply_q_truncated, bspline_eval, build_rule, fit_rate, n_to_m, weighted_lq_norm, CorpusFunction,
    Domain, ExperimentConfig, FreudWeight, IntegrationSpec, OperatorConfig, OperatorKind, RecoveryGrid, RuleKind,
    Separable, TensorSampleBlock,
};
use proptest::prelude::*;
use statrs::function::erf::erf;

fn config(ell: usize) -> OperatorConfig {
    OperatorConfig::new(FreudWeight::gaussian(), ell).unwrap()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_times_m_is_truncation_half_width(lambda in 1.2f64..4.0, a in 0.2f64..2.0, m in 1usize..2000, rho in 0.05f64..0.9) {
        let w = FreudWeight::new(lambda, a).unwrap();
        let g = RecoveryGrid::new(m, rho, &w).unwrap();
        let l = rho * g.a_m();
        prop_assert!((g.step() * m as f64 - l).abs() <= 4.0 * f64::EPSILON * l);
        let ratio = w.mrs_number(2 * m).unwrap() / w.mrs_number(m).unwrap();
        prop_assert!((ratio / 2f64.powf(1.0 / lambda) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bsplines_partition_unity(x in -5.0f64..5.0, ell in 1usize..=3) {
        let two_ell = 2 * ell;
        let k = x.floor() as i64;
        let sum: f64 = (k - ell as i64 - 1..=k + ell as i64 + 1)
            .map(|s| bspline_eval(x - s as f64, two_ell).unwrap())
            .sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, m in 8usize..40, t in -1.0f64..1.0, ell in 1usize..=2) {
        let cfg = config(ell);
        let f = |x: f64| (1.3 * x).sin();
        let g = |x: f64| (-0.3 * x * x).exp();
        let qf = apply_q_truncated(f, m, &cfg).unwrap();
        let qg = apply_q_truncated(g, m, &cfg).unwrap();
        let qh = apply_q_truncated(|x: f64| alpha * f(x) + beta * g(x), m, &cfg).unwrap();
        let x = t * qf.grid().half_width();
        let gap = qh.eval(x) - alpha * qf.eval(x) - beta * qg.eval(x);
        prop_assert!(gap.abs() < 1e-12 * (1.0 + alpha.abs() + beta.abs()));
    }

    #[test]
    fn truncated_operators_vanish_outside(m in 4usize..64, beyond in 1.0f64..3.0, ell in 1usize..=2) {
        let cfg = config(ell);
        let f = |x: f64| 1.0 + x * x;
        let q = apply_q_truncated(f, m, &cfg).unwrap();
        let p = apply_p_truncated(f, m, &cfg).unwrap();
        let x = q.grid().half_width() * (1.0 + 1e-12) + (beyond - 1.0);
        prop_assert_eq!(q.eval(x), 0.0);
        prop_assert_eq!(q.eval(-x), 0.0);
        prop_assert_eq!(p.eval(x), 0.0);
        prop_assert_eq!(p.eval(-x), 0.0);
    }

    #[test]
    fn polynomials_are_reproduced(
        coeffs in prop::collection::vec(-2.0f64..2.0, 4),
        m in 8usize..40,
        t in -0.99f64..0.99,
        ell in 1usize..=2,
    ) {
        let cfg = config(ell);
        let c = &coeffs[..2 * ell];
        let p = |x: f64| horner(c, x);
        let qs = apply_q_truncated(p, m, &cfg).unwrap();
        let ps = apply_p_truncated(p, m, &cfg).unwrap();
        let l = qs.grid().half_width();
        let scale = 1.0 + c.iter().enumerate().map(|(k, a)| a.abs() * l.powi(k as i32)).sum::<f64>();
        let x = t * l;
        prop_assert!((qs.eval(x) - p(x)).abs() < 1e-9 * scale);
        prop_assert!((ps.eval(x) - p(x)).abs() < 1e-9 * scale);
    }

    #[test]
    fn p_interpolates_at_nodes(m in 4usize..48, freq in 0.2f64..2.0, ell in 1usize..=2) {
        let cfg = config(ell);
        let f = |x: f64| (freq * x).cos() + 0.1 * x;
        let s = apply_p_truncated(f, m, &cfg).unwrap();
        for k in -(m as i64)..=m as i64 {
            let x = s.grid().node(k);
            prop_assert!((s.eval(x) - f(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn p_equals_q_for_linear_splines(m in 4usize..48, t in -1.0f64..1.0) {
        let cfg = config(1);
        let f = |x: f64| (0.7 * x).sin() + 0.2;
        let q = apply_q_truncated(f, m, &cfg).unwrap();
        let p = apply_p_truncated(f, m, &cfg).unwrap();
        let x = t * q.grid().half_width();
        prop_assert!((q.eval(x) - p.eval(x)).abs() < 1e-12);
    }

    #[test]
    fn rules_are_symmetric_with_exact_mass(m in 4usize..96, ell in 1usize..=2, use_p in any::<bool>()) {
        let cfg = config(ell);
        let kind = if use_p { RuleKind::P } else { RuleKind::Q };
        let rule = build_rule(kind, m, &cfg).unwrap();
        let n = rule.len();
        for i in 0..n {
            let j = n - 1 - i;
            prop_assert!((rule.nodes[i] + rule.nodes[j]).abs() < 1e-12 * (1.0 + rule.nodes[i].abs()));
            prop_assert!((rule.weights[i] - rule.weights[j]).abs() < 1e-12);
        }
        let l = cfg.grid(m).unwrap().half_width();
        let mass = (2.0 * PI).sqrt() * erf(l / 2f64.sqrt());
        prop_assert!((rule.weight_sum() - mass).abs() < 1e-9 * mass);
    }

    #[test]
    fn budget_map_is_monotone_and_within_budget(n in 9usize..200_000, extra in 0usize..5000, d in 1usize..=3) {
        let cfg = config(2);
        let (Ok(m1), Ok(m2)) = (n_to_m(n, 2, cfg.j0(), d), n_to_m(n + extra, 2, cfg.j0(), d)) else {
            return Ok(());
        };
        prop_assert!(m1 <= m2);
        prop_assert!(cfg.sample_count(m1).pow(d as u32) <= n);
        prop_assert!(cfg.sample_count(m1 + 1).pow(d as u32) > n);
    }

    #[test]
    fn rate_fit_recovers_power_laws(slope in -4.0f64..-0.1, c in 0.01f64..100.0, nmin in 9usize..64, k in 4usize..8) {
        let pairs: Vec<(usize, f64)> = (0..k)
            .map(|i| {
                let n = (nmin - 1) * (1 << i) + 1;
                (n, c * (n as f64).powf(slope))
            })
            .collect();
        let fit = fit_rate(&pairs).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!(fit.residual < 1e-9);
    }

    #[test]
    fn config_text_round_trips(
        lambda in 1.2f64..4.0,
        a in 0.1f64..2.0,
        ell in 1usize..=2,
        r in 1u32..=4,
        d in 1usize..=3,
        seed in any::<u64>(),
        op in prop::sample::select(vec![OperatorKind::Q, OperatorKind::P, OperatorKind::QuadQ, OperatorKind::QuadP]),
        p in prop::sample::select(vec![1.0, 2.0, 3.5, f64::INFINITY]),
    ) {
        let cfg = ExperimentConfig { lambda, a, ell, r, d, seed, op, p, ..ExperimentConfig::default() };
        let back = ExperimentConfig::from_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tensor_axis_order_is_irrelevant(m in 4usize..12, c0 in 0.2f64..1.5, c1 in 0.2f64..1.5, use_p in any::<bool>()) {
        let cfg = config(2);
        let f = freud_spline::ClosureFunction::new(2, move |x: &[f64]| (c0 * x[0]).sin() * (1.0 + c1 * x[1] * x[0]), 2.0).unwrap();
        let grid = cfg.grid(m).unwrap();
        let block = TensorSampleBlock::sample(&f, 2, &grid, cfg.sample_radius(m)).unwrap();
        let op = if use_p { AxisOperator::P } else { AxisOperator::Q };
        let a = apply_to_block(op, &block, m, &cfg, &[0, 1]).unwrap();
        let b = apply_to_block(op, &block, m, &cfg, &[1, 0]).unwrap();
        prop_assert_eq!(a.coefficients().len(), b.coefficients().len());
        for (u, v) in a.coefficients().iter().zip(b.coefficients()) {
            prop_assert!((u - v).abs() < 1e-12 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn spline_norms_are_homogeneous_and_subadditive(m in 8usize..24, alpha in -4.0f64..4.0, q in prop::sample::select(vec![1.0, 2.0, 3.0, f64::INFINITY])) {
        let cfg = config(2);
        let w = FreudWeight::gaussian();
        let spec = IntegrationSpec::default();
        let s = apply_q_truncated(|x: f64| (x).cos(), m, &cfg).unwrap();
        let t = apply_q_truncated(|x: f64| 0.5 * x, m, &cfg).unwrap();
        let sum = apply_q_truncated(|x: f64| x.cos() + 0.5 * x, m, &cfg).unwrap();
        let ns = spline_weighted_norm(&s, 0, q, &w, &spec).unwrap();
        let nt = spline_weighted_norm(&t, 0, q, &w, &spec).unwrap();
        let nsum = spline_weighted_norm(&sum, 0, q, &w, &spec).unwrap();
        let nscaled = spline_weighted_norm(&s.scaled(alpha), 0, q, &w, &spec).unwrap();
        prop_assert!((nscaled - alpha.abs() * ns).abs() <= 1e-9 * (1.0 + ns));
        prop_assert!(nsum <= ns + nt + 1e-9);
    }

    #[test]
    fn real_line_norm_splits_into_interval_and_tails(c in 0.5f64..6.0, q in prop::sample::select(vec![1.0, 2.0, 4.0])) {
        let w = FreudWeight::gaussian();
        let spec = IntegrationSpec::default();
        // beyond |x| = 30 the integrand is below exp(-600)
        let f = CorpusFunction::oscil();
        let whole = weighted_lq_norm(&f, q, &w, Domain::Real, &spec).unwrap().powf(q);
        let mid = weighted_lq_norm(&f, q, &w, Domain::Interval(-c, c), &spec).unwrap().powf(q);
        let left = weighted_lq_norm(&f, q, &w, Domain::Interval(-30.0, -c), &spec).unwrap().powf(q);
        let right = weighted_lq_norm(&f, q, &w, Domain::Interval(c, 30.0), &spec).unwrap().powf(q);
        prop_assert!((mid + left + right - whole).abs() < 1e-10 * whole);
    }

    #[test]
    fn separable_norms_factorize(q in prop::sample::select(vec![1.0, 2.0])) {
        let w = FreudWeight::gaussian();
        let spec = IntegrationSpec::default();
        let g = CorpusFunction::gauss();
        let h = CorpusFunction::kink(3).unwrap();
        let f = Separable::new(vec![g.clone(), h.clone()]).unwrap();
        let joint = freud_spline::weighted_lq_norm_d(&f, q, &w, &spec).unwrap();
        let one = weighted_lq_norm(&g, q, &w, Domain::Real, &spec).unwrap();
        let two = weighted_lq_norm(&h, q, &w, Domain::Real, &spec).unwrap();
        prop_assert!((joint - one * two).abs() < 1e-10 * joint);
    }
}
