//! Truncated equidistant B-spline quasi-interpolation, interpolation and the
//! quadratures they generate, for Sobolev spaces with a Freud weight
//! `w(x) = exp(-a|x|^lambda + b)` on the real line.

pub mod analysis;
pub mod bench;
pub mod blend;
pub mod bspline;
pub mod error;
pub mod integrate;
pub mod jet;
pub mod quadrature;
pub mod quasi;
pub mod rates;
pub mod space;
pub mod spline;
pub mod tensor;
pub mod weight;

pub use analysis::{
    recovery_error, reference_weighted_integral, weighted_lq_norm, weighted_sobolev_norm, CorpusFunction, CorpusKind, Domain,
    FiniteDifference, RealFunction,
};
pub use blend::{apply_p_bar, apply_p_truncated, apply_r_truncated, apply_rq_truncated, blended_stencil, BlendConfig};
pub use bspline::{bspline_derivative, bspline_eval, lagrange_extension, ExtensionPolynomials, LagrangePolynomial, PiecewisePolynomial};
pub use error::{Error, Result};
pub use integrate::{IntegrationSpec, Tail};
pub use quadrature::{build_rule, build_rule_p, build_rule_q, integrate, RuleKind, WeightedQuadratureRule};
pub use quasi::{
    apply_q_bar, apply_q_truncated, build_kernel, lambda_catalog, validate_coefficients, CoefficientViolation, Fallible,
    OperatorConfig, QuasiCoefficients, Sampler,
};
pub use space::{
    bernstein_ratio, discrete_weighted_norm, fooling_spline, make_spline, marcinkiewicz_ratios, nikolskii_ratio,
    ratio_ensemble, Boundedness, DiscreteWeightedNorm, EnsembleKind, EnsembleSpec, MarcinkiewiczRatios, RatioKind,
    RatioSummary, SplineSpaceElement,
};
pub use spline::SplineFunction;
pub use weight::{select_rho, FreudWeight, RecoveryGrid, RhoBound};
pub use tensor::{
    apply_qd_truncated, apply_pd_truncated, integrate_d, recovery_error_d, tensor_node_count, weighted_lq_norm_d,
    ClosureFunction, MultiFunction, Separable, TensorSampleBlock, TensorSpline,
};
pub use bench::{emit_report, fit_rate, n_to_m, run_convergence, ExperimentConfig, OperatorKind, RateFit, RateReport, RateRow};
