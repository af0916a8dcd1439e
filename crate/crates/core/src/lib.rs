//! Spectral filter regularization for linear ill-posed problems.
//!
//! The crate provides the exponent-penalty filter (`nrm`) next to Tikhonov,
//! spectral cut-off, Showalter and CGLS; shaw/baart/heat test problems plus a
//! diagonal fixture with a prescribed source condition; a-priori, a-posteriori
//! and heuristic parameter rules; a Monte-Carlo harness; and numeric checks of
//! the analytic bounds behind the method.
//!
//! All problems are scaled so that `‖AᵀA‖ = e⁻¹` before anything else runs.

pub mod cli;
pub mod error;
pub mod filters;
pub mod noise_mc;
pub mod numeric;
pub mod par;
pub mod path;
pub mod problems;
pub mod report;
pub mod selection;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
pub use filters::{cgls_iterates, filter_solve, g_value, r_value, showalter_ode_solve, FilterPoint, Method, Param};
pub use noise_mc::{add_noise, run_monte_carlo, McConfig, McReport, NoiseModel, Rule};
pub use par::Execution;
pub use path::{AlphaGrid, Data, Operator, Path, Target};
pub use problems::{build_scaled, gen_baart, gen_diag_synthetic, gen_heat, gen_shaw, Decay, ProblemKind, SourceKind, SyntheticSource};
pub use selection::{HeuristicRule, RuleFlags, RuleOutcome};
pub use spectral::{compute_svd, reconstructed_condition, scale_problem, Problem, SpectralConstraint, Svd};
