//! Numerical side: theta functions, period matrices, Abel–Jacobi maps and
//! the invariants built from them.

pub mod curve;
pub mod eta;
pub mod invariants;
pub mod period;
pub mod theta;

pub use curve::{AnalyticCurve, EllipticTorus, HyperellipticCurve};
pub use eta::{log_petersson_delta_norm, petersson_delta_norm, petersson_delta_norm_series};
pub use invariants::{
    bost_integral, log_norm_constant, t_from_delta, t_invariant, BostEstimate, TSample,
};
pub use period::{reduce_to_fundamental_domain, PeriodMatrix};
pub use theta::{j_norm, normalized_theta, theta, theta_gradient, theta_norm};
