//! Higher-order variational calculus on jets.

mod euler;
mod expr;
mod lagrangian;
mod multiplier;

pub use euler::{
    backend_self_test, euler_poisson, euler_poisson_time, from_time_chart, gradient, gradient_fd, to_time_chart,
    TimeJet,
};
pub use expr::{
    braced_covector, parametric_invariance_check, shape_report, EulerPoissonExpr, ShapeReport, DEFAULT_XI,
    THIRD_ORDER_LEAK_TOL,
};
pub use lagrangian::{
    hom_time_convert, hom_time_wrap, CatalogParams, CoordinateKind, LagrangianForm, LagrangianModel, CATALOG_IDS,
};
pub use multiplier::{
    a_integral, compatibility_residual, multiplier_residual, eliminated_residual, contracted_value, multiplier_values, project_fifth,
    prolong_closed, Compatibility,
};
