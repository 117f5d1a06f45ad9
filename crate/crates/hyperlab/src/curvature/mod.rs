//! Curvature of warped metrics g = d rho^2 + sinh^2(rho) Upsilon(rho, theta).

pub mod closed;
pub mod metric;
pub mod oracle;
pub mod submanifold;
pub mod tensors;

pub use closed::{
    christoffel_closed, coordinate_planes, curvature_report, ricci_scalar_closed, riemann_closed, sectional_scan,
    AngularData, CurvatureReport, Plane, RicciScalar,
};
pub use metric::{full_metric, sphere_metric, Perturbation, WarpedMetric, WarpedMetricSpec};
pub use oracle::{christoffel_fd, curvature_fd, riemann_fd, OracleCurvature, OracleSteps};
pub use submanifold::{
    bilaplacian_direct, bilaplacian_perturbed, bilaplacian_terms, bochner_residual, frak_f_sweep, mean_curvature_gap,
    perturbation_decay_slope, riccati_residual, riccati_trace_residual, trace_decomposition_check,
    BilaplacianTerms, ShapeOperatorState, TraceDecomposition,
};
pub use tensors::{rel_err, scalar_from_ricci, Christoffel, Riemann};
