use std::fmt;
use std::str::FromStr;

use super::{RuleFlags, RuleOutcome};
use crate::error::{Error, Result};
use crate::filters::Method;
use crate::path::{AlphaGrid, Data, Operator, Path, Target};

/// Error-free (data-driven) rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeuristicRule {
    /// `‖res‖ / tr r_α(AᵀA)`.
    Gcv,
    /// Quasi-optimality: `‖x_{n+1} − x_n‖` along a geometric sequence.
    Dqo,
    /// `α^{−1/2} ‖res‖`.
    H1,
    /// `α^{−1} ‖Aᵀ res‖`.
    H2,
    /// `‖x_α‖ · ‖res‖`.
    Lcv,
}

impl HeuristicRule {
    pub const ALL: [HeuristicRule; 5] = [
        HeuristicRule::Gcv,
        HeuristicRule::Dqo,
        HeuristicRule::H1,
        HeuristicRule::H2,
        HeuristicRule::Lcv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeuristicRule::Gcv => "gcv",
            HeuristicRule::Dqo => "dqo",
            HeuristicRule::H1 => "h1",
            HeuristicRule::H2 => "h2",
            HeuristicRule::Lcv => "lcv",
        }
    }

    pub fn applies_to(self, method: Method) -> bool {
        !(self == HeuristicRule::Gcv && method == Method::Cg)
    }
}

impl fmt::Display for HeuristicRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HeuristicRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown heuristic rule {s:?}")))
    }
}

/// Geometric sequence `α_n = α₀ qⁿ`, stopped before it drops below `floor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqoSequence {
    pub alpha0: f64,
    pub q: f64,
    pub floor: f64,
}

impl DqoSequence {
    pub const DEFAULT_Q: f64 = 0.9;
    pub const DEFAULT_FLOOR: f64 = 1e-14;

    /// Validates `α₀ ∈ (0, s₁²]` and `q ∈ (0, 1)`.
    pub fn new(alpha0: f64, q: f64, floor: f64, top_lambda: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0 <= top_lambda) {
            return Err(Error::Domain(format!(
                "alpha0 must lie in (0, {top_lambda}], got {alpha0}"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
        }
        if !(floor > 0.0 && floor < alpha0) {
            return Err(Error::Domain(format!("floor must lie in (0, alpha0), got {floor}")));
        }
        Ok(Self { alpha0, q, floor })
    }

    /// `α₀ = s₁²`, `q = 0.9`, floor `1e−14`.
    pub fn default_for(op: &Operator) -> Self {
        Self {
            alpha0: op.lambdas()[0],
            q: Self::DEFAULT_Q,
            floor: Self::DEFAULT_FLOOR,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut a = self.alpha0;
        while a >= self.floor {
            out.push(a);
            a *= self.q;
        }
        out
    }
}

/// Index into a path chosen by a rule, with its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub outcome: RuleOutcome,
}

fn objective(rule: HeuristicRule, path: &Path) -> Option<Vec<f64>> {
    let n = path.len();
    let v: Vec<f64> = match rule {
        HeuristicRule::Gcv => {
            let trace = path.trace.as_ref()?;
            (0..n).map(|i| path.residual_norm[i] / trace[i]).collect()
        }
        HeuristicRule::Dqo => path.step_norm.clone(),
        HeuristicRule::H1 => (0..n)
            .map(|i| path.residual_norm[i] / path.alpha_equiv[i].sqrt())
            .collect(),
        HeuristicRule::H2 => (0..n)
            .map(|i| path.normal_residual_norm[i] / path.alpha_equiv[i])
            .collect(),
        HeuristicRule::Lcv => (0..n).map(|i| path.x_norm[i] * path.residual_norm[i]).collect(),
    };
    Some(v)
}

/// Applies a rule to an already evaluated path.
///
/// The path must be ordered from most to least regularized; the first
/// minimizer wins, which breaks ties toward stronger regularization.
/// Non-finite objective values (e.g. a zero GCV denominator) never win.
/// For DQO, entry `i` compares candidates `i` and `i + 1` and selects `i`.
pub fn select_on_path(rule: HeuristicRule, path: &Path) -> Option<Selection> {
    if !rule.applies_to(path.method) {
        return None;
    }
    let obj = objective(rule, path)?;
    let mut best: Option<usize> = None;
    for (i, &v) in obj.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| v < obj[b]) {
            best = Some(i);
        }
    }
    let index = best?;
    let trace: Vec<(f64, f64)> = obj
        .iter()
        .enumerate()
        .map(|(i, &v)| (path.params[i].value(), v))
        .collect();
    Some(Selection {
        index,
        outcome: RuleOutcome {
            param: Some(path.params[index]),
            objective_trace: trace,
            flags: RuleFlags {
                boundary_hit: index == 0 || index + 1 == obj.len(),
                ..RuleFlags::default()
            },
        },
    })
}

/// Path a heuristic rule is evaluated on: the DQO sequence for continuous
/// methods under DQO, otherwise the method's natural candidate set.
pub fn rule_path(
    rule: HeuristicRule,
    op: &Operator,
    data: &Data,
    method: Method,
    grid: &AlphaGrid,
    target: Option<&Target>,
) -> Result<Path> {
    if rule == HeuristicRule::Dqo && method.has_continuous_param() && method != Method::Tsvd {
        let seq = DqoSequence::default_for(op);
        return Ok(Path::filter(op, data, method, &seq.values(), target));
    }
    Path::for_method(op, data, method, grid, target)
}

/// Runs a heuristic rule end to end.
pub fn heuristic_select(
    rule: HeuristicRule,
    op: &Operator,
    data: &Data,
    method: Method,
    grid: &AlphaGrid,
) -> Result<RuleOutcome> {
    if !rule.applies_to(method) {
        return Ok(RuleOutcome::not_applicable());
    }
    let path = rule_path(rule, op, data, method, grid, None)?;
    select_on_path(rule, &path)
        .map(|s| s.outcome)
        .ok_or_else(|| Error::Invalid(format!("{rule} found no finite objective value for {method}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::Param;
    use nalgebra::{DMatrix, DVector};

    fn toy() -> (Operator, Data) {
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&[0.5, 0.1]));
        let op = Operator::new(a, 0.0).unwrap();
        let data = op.data(&DVector::from_column_slice(&[0.5, 0.1])).unwrap();
        (op, data)
    }

    #[test]
    fn lcv_noiseless_picks_grid_minimum() {
        let (op, data) = toy();
        let out = heuristic_select(HeuristicRule::Lcv, &op, &data, Method::Tik, &AlphaGrid::default()).unwrap();
        assert_eq!(out.param, Some(Param::Alpha(1e-12)));
    }

    #[test]
    fn gcv_tsvd_denominator() {
        let (op, data) = toy();
        let path = Path::truncated(&op, &data, None);
        assert_eq!(path.trace.as_ref().unwrap(), &vec![1.0, 0.0]);
        let sel = select_on_path(HeuristicRule::Gcv, &path).unwrap();
        assert_eq!(sel.index, 0);
    }

    #[test]
    fn gcv_not_applicable_to_cg() {
        let (op, data) = toy();
        let out = heuristic_select(HeuristicRule::Gcv, &op, &data, Method::Cg, &AlphaGrid::default()).unwrap();
        assert!(out.flags.not_applicable);
        assert!(out.param.is_none());
    }

    #[test]
    fn dqo_noiseless_picks_last_tested() {
        let (op, data) = toy();
        let seq = DqoSequence::new(0.25, 0.5, 1e-14, 0.25).unwrap();
        let alphas = seq.values();
        let path = Path::filter(&op, &data, Method::Tik, &alphas, None);
        let sel = select_on_path(HeuristicRule::Dqo, &path).unwrap();
        assert_eq!(sel.index, alphas.len() - 2);
        assert_eq!(sel.outcome.param, Some(Param::Alpha(*sel.outcome.objective_trace.last().map(|(a, _)| a).unwrap())));
    }

    #[test]
    fn dqo_sequence_domain() {
        assert!(DqoSequence::new(0.3, 0.5, 1e-14, 0.25).is_err());
        assert!(DqoSequence::new(0.2, 1.0, 1e-14, 0.25).is_err());
        assert!(DqoSequence::new(0.2, 0.0, 1e-14, 0.25).is_err());
        let v = DqoSequence::new(0.25, 0.5, 1e-3, 0.25).unwrap().values();
        assert_eq!(v.len(), 8);
    }

    #[test]
    fn argmin_invariant_under_objective_scaling() {
        let (op, _) = toy();
        let data = op.data(&DVector::from_column_slice(&[0.51, 0.093])).unwrap();
        let path = Path::filter(&op, &data, Method::Nrm, &AlphaGrid::default().values(), None);
        for rule in HeuristicRule::ALL {
            let sel = select_on_path(rule, &path).unwrap();
            let mut scaled = path.clone();
            for v in scaled
                .residual_norm
                .iter_mut()
                .chain(scaled.normal_residual_norm.iter_mut())
                .chain(scaled.step_norm.iter_mut())
            {
                *v *= 3.7;
            }
            assert_eq!(select_on_path(rule, &scaled).unwrap().index, sel.index, "{rule}");
        }
    }

    #[test]
    fn discrete_rules_use_inverse_iteration_count() {
        let (op, _) = toy();
        let data = op.data(&DVector::from_column_slice(&[0.51, 0.093])).unwrap();
        let path = Path::cgls(&op, &data, 2, None).unwrap();
        assert_eq!(path.alpha_equiv, vec![1.0, 0.5]);
        let sel = select_on_path(HeuristicRule::H1, &path).unwrap();
        assert!(matches!(sel.outcome.param, Some(Param::Iterations(_))));
    }
}
