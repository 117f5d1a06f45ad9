//! Numerical tolerances shared by the library, the CLI suites and the tests.
//!
//! Keep them here so a suite never invents its own threshold.

/// Hyperboloid constraint |<x,x> - 1| after any operation.
pub const HYPERBOLOID: f64 = 1e-12;

/// Slack on the Minkowski form before a distance is rejected as off-manifold.
pub const DISTANCE_DOMAIN: f64 = 1e-9;

/// Tangency check for exp_map inputs.
pub const TANGENCY: f64 = 1e-10;

/// Upper end of the log1p branch for arccosh(1 + z).
pub const ACOSH_LOG1P_BRANCH: f64 = 1e-4;

/// Below this radius the coth/csch^2 series replace the closed forms.
pub const SMALL_RHO_SERIES: f64 = 1e-3;

/// Minimum distance between x and the moving center.
pub const KINEMATICS_DEGENERATE: f64 = 1e-6;

/// Interval slack for the bilaplacian of rho^2.
pub const BILAPLACIAN_INTERVAL: f64 = 1e-9;

/// Relative agreement between closed-form curvature and the difference oracle.
pub const CURVATURE_ORACLE: f64 = 1e-4;

/// Exactness for the unperturbed curvature identities.
pub const CURVATURE_EXACT: f64 = 1e-9;

/// Riccati / Bochner residual ceiling (difference-limited).
pub const RICCATI_BOCHNER: f64 = 1e-4;

/// Self-adjointness defect of assembled operators.
pub const SYMMETRY_DEFECT: f64 = 1e-8;

/// Absolute floor on discrete second differences of log H.
pub const CONVEXITY: f64 = 1e-3;

/// Commutator gap at baseline resolution.
pub const COMMUTATOR_GAP: f64 = 1e-3;

/// Carleman ratio floor is 1 - this value.
pub const CARLEMAN: f64 = 5e-2;

/// Virial lower bound gap floor (per unit squared norm).
pub const VIRIAL: f64 = 1e-3;

/// Mollifier quadrature doubling test.
pub const MOLLIFIER_CONVERGENCE: f64 = 1e-6;

/// Relative mass at the top of the gamma grid that triggers a coverage warning.
pub const TRANSFER_COVERAGE: f64 = 1e-8;

/// Exponent identity residual for Q(ell, R).
pub const Q_IDENTITY: f64 = 1e-12;

/// Closed-form kinematics against differences in time.
pub const KINEMATICS_FD: f64 = 1e-5;

/// Eigenfunction phase error of the solver at baseline resolution.
pub const PHASE_ERROR: f64 = 1e-4;

/// Allowed deviation of an observed convergence order or fitted slope.
pub const ORDER_SLACK: f64 = 0.3;

/// Slack on the commutator lower bound.
pub const COMMUTATOR_BOUND: f64 = 1e-3;

/// Residual of the alpha(t) ODE.
pub const ALPHA_ODE: f64 = 1e-10;

/// Relative stability of the empirical frequency bound under refinement.
pub const N_HAT_STABILITY: f64 = 0.2;

/// Allowed deviation of the mollifier epsilon^2 slope.
pub const MOLLIFIER_SLOPE: f64 = 0.2;

/// |asymptotic ratio - 1| at the reference point.
pub const LAPLACE_RATIO: f64 = 0.05;

/// Change of log I when the lower limit is halved.
pub const LAPLACE_LOWER_LIMIT: f64 = 1e-8;

/// Relative norm drift of Schrödinger steps (unitary up to rounding).
pub const NORM_DRIFT: f64 = 1e-10;
