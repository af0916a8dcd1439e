//! Index functions and numeric checks of the analytic bounds.

mod checks;
mod index;
mod rates;

pub use checks::{
    lambda_grid, root_of_h, run_check, verify_prop2, verify_psi_supremum, verify_qualification,
    verify_residual_bound, CheckKind, CheckReport,
};
pub use index::{m_constant, theta_eps, theta_general, IndexFunctions};
pub use rates::{empirical_rate, rate_checks, RatePoint, RateReport, RateRule};
