//! Parameter-choice rules.

mod apriori;
mod heuristic;
mod morozov;

pub use apriori::{apriori_delta, apriori_theta_eps, apriori_theta_p, theta_p, DEFAULT_EPS};
pub use heuristic::{heuristic_select, rule_path, select_on_path, DqoSequence, HeuristicRule, Selection};
pub use morozov::{morozov_like, MOROZOV_MAX, MOROZOV_MIN};

use crate::filters::Param;

/// Diagnostics attached to a rule's choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleFlags {
    /// The choice sits on an end of the searched range.
    pub boundary_hit: bool,
    pub not_applicable: bool,
    pub non_monotone_warning: bool,
}

/// Chosen parameter plus the scanned `(param, objective)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutcome {
    /// `None` only when the rule does not apply to the method.
    pub param: Option<Param>,
    pub objective_trace: Vec<(f64, f64)>,
    pub flags: RuleFlags,
}

impl RuleOutcome {
    pub fn not_applicable() -> Self {
        Self {
            param: None,
            objective_trace: Vec::new(),
            flags: RuleFlags {
                not_applicable: true,
                ..RuleFlags::default()
            },
        }
    }
}
