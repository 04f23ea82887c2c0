mod blended_interpolation {
    #![allow(dead_code)]
    include!("../examples/blended_interpolation.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod bspline_basis {
    #![allow(dead_code)]
    include!("../examples/bspline_basis.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod convergence_sweep {
    #![allow(dead_code)]
    include!("../examples/convergence_sweep.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod fooling_spline {
    #![allow(dead_code)]
    include!("../examples/fooling_spline.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod quadrature_rules {
    #![allow(dead_code)]
    include!("../examples/quadrature_rules.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod quasi_interpolation {
    #![allow(dead_code)]
    include!("../examples/quasi_interpolation.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod spline_inequalities {
    #![allow(dead_code)]
    include!("../examples/spline_inequalities.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod tensor_recovery {
    #![allow(dead_code)]
    include!("../examples/tensor_recovery.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod weighted_norms {
    #![allow(dead_code)]
    include!("../examples/weighted_norms.rs");

    #[test]
    fn runs() {
        run_example();
    }
}

mod weights_and_grid {
    #![allow(dead_code)]
    include!("../examples/weights_and_grid.rs");

    #[test]
    fn runs() {
        run_example();
    }
}
