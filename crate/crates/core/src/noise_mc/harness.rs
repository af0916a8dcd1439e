use std::fmt;
use std::str::FromStr;

use super::noise::{add_noise, NoiseModel};
use crate::error::{Error, Result};
use crate::filters::{Method, Param};
use crate::numeric::mean_std;
use crate::par::{map_indexed, Execution};
use crate::path::{AlphaGrid, Data, Operator, Path, Target};
use crate::selection::{morozov_like, rule_path, select_on_path, HeuristicRule};
use crate::spectral::Problem;

/// Parameter rule evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Best error over the candidate set (needs the true solution).
    Oracle,
    Heuristic(HeuristicRule),
    /// Residual rule, threshold `δ + √δ`.
    Morozov,
    /// `α = δ`.
    Apriori,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Oracle,
        Rule::Heuristic(HeuristicRule::Gcv),
        Rule::Heuristic(HeuristicRule::Dqo),
        Rule::Heuristic(HeuristicRule::H1),
        Rule::Heuristic(HeuristicRule::H2),
        Rule::Heuristic(HeuristicRule::Lcv),
        Rule::Morozov,
        Rule::Apriori,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Oracle => "oracle",
            Rule::Heuristic(h) => h.name(),
            Rule::Morozov => "morozov",
            Rule::Apriori => "apriori",
        }
    }

    pub fn applies_to(self, method: Method) -> bool {
        match self {
            Rule::Oracle => true,
            Rule::Heuristic(h) => h.applies_to(method),
            Rule::Morozov => matches!(method, Method::Nrm | Method::Tik | Method::Sw),
            Rule::Apriori => method.is_filter(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown rule {s:?}")))
    }
}

/// Monte-Carlo experiment description. Problems are expected to be scaled.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub problems: Vec<Problem>,
    pub methods: Vec<Method>,
    pub rules: Vec<Rule>,
    pub noise_levels: Vec<f64>,
    pub reps: usize,
    pub base_seed: u64,
    pub grid: AlphaGrid,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Invalid("reps must be >= 1".into()));
        }
        if self.problems.is_empty() || self.methods.is_empty() || self.rules.is_empty() || self.noise_levels.is_empty() {
            return Err(Error::Invalid("problems, methods, rules and noise levels must be nonempty".into()));
        }
        if let Some(l) = self.noise_levels.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return Err(Error::Invalid(format!("noise level must be >= 0, got {l}")));
        }
        AlphaGrid::new(self.grid.min, self.grid.max, self.grid.count)?;
        Ok(())
    }
}

/// Aggregates of one (problem, method, rule, noise level) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCell {
    pub e_min: f64,
    pub e_max: f64,
    pub e_mean: f64,
    /// Population standard deviation.
    pub e_std: f64,
    pub param_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub problem: String,
    pub method: Method,
    pub rule: Rule,
    pub noise_level: f64,
    /// 0 for not-applicable cells.
    pub rep_count: usize,
    pub cell: Option<McCell>,
}

/// Outcome of one rule in one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub problem: String,
    pub method: Method,
    pub rule: Rule,
    pub noise_level: f64,
    pub rep: usize,
    pub seed: u64,
    /// α, or the iteration count for cg.
    pub param: f64,
    pub rel_error: f64,
    pub delta_realized: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct McReport {
    pub rows: Vec<McRow>,
    /// Per-replication outcomes, in (problem, level, rep, method, rule) order.
    pub records: Vec<RepRecord>,
}

impl McReport {
    pub fn row(&self, problem: &str, method: Method, rule: Rule, noise_level: f64) -> Option<&McRow> {
        self.rows
            .iter()
            .find(|r| r.problem == problem && r.method == method && r.rule == rule && r.noise_level == noise_level)
    }

    /// Mean error of a cell, if it exists and is applicable.
    pub fn mean(&self, problem: &str, method: Method, rule: Rule, noise_level: f64) -> Option<f64> {
        self.row(problem, method, rule, noise_level)?.cell.map(|c| c.e_mean)
    }
}

/// Best relative error over the method's candidate set (α grid, `{s_k²}` for
/// tsvd, `1..=min(n, 200)` for cg); ties go to the stronger regularization.
pub fn best_error_oracle(
    op: &Operator,
    target: &Target,
    data: &Data,
    method: Method,
    grid: &AlphaGrid,
) -> Result<(Param, f64)> {
    let path = Path::for_method(op, data, method, grid, Some(target))?;
    path_minimum(&path).ok_or_else(|| Error::Invalid(format!("empty candidate set for {method}")))
}

fn path_minimum(path: &Path) -> Option<(Param, f64)> {
    let errs = path.rel_error.as_ref()?;
    let mut best: Option<usize> = None;
    for (i, &e) in errs.iter().enumerate() {
        if best.is_none_or(|b| e < errs[b]) {
            best = Some(i);
        }
    }
    best.map(|i| (path.params[i], errs[i]))
}

type Outcome = Option<(Param, f64)>;

/// All rules for one method in one replication, indexed like `rules`.
fn evaluate_method(
    op: &Operator,
    target: &Target,
    data: &Data,
    delta: f64,
    method: Method,
    rules: &[Rule],
    grid: &AlphaGrid,
) -> Result<Vec<Outcome>> {
    let path = Path::for_method(op, data, method, grid, Some(target))?;
    let errs = path.rel_error.as_ref().expect("path built with target");
    let mut out: Vec<Outcome> = Vec::with_capacity(rules.len());
    for &rule in rules {
        if !rule.applies_to(method) {
            out.push(None);
            continue;
        }
        let outcome = match rule {
            Rule::Oracle => None,
            Rule::Heuristic(h) => {
                if h == HeuristicRule::Dqo && method.is_filter() && method != Method::Tsvd {
                    let seq_path = rule_path(h, op, data, method, grid, Some(target))?;
                    select_on_path(h, &seq_path).map(|s| (path_param(&seq_path, s.index), seq_err(&seq_path, s.index)))
                } else {
                    select_on_path(h, &path).map(|s| (path.params[s.index], errs[s.index]))
                }
            }
            Rule::Morozov => {
                let o = morozov_like(op, data, delta, method)?;
                let alpha = o.param.expect("residual rule always chooses").value();
                Some((Param::Alpha(alpha), op.filter_error(data, target, method, alpha)))
            }
            Rule::Apriori => {
                // Noise-free data has δ = 0; fall back to the smallest grid α.
                let alpha = if delta > 0.0 { delta } else { grid.min };
                Some((Param::Alpha(alpha), op.filter_error(data, target, method, alpha)))
            }
        };
        out.push(outcome);
    }

    // The oracle sees the shared candidate set plus every parameter another
    // rule picked in this replication, so no rule can beat it.
    if let Some(pos) = rules.iter().position(|&r| r == Rule::Oracle) {
        let mut best = path_minimum(&path);
        for (param, err) in out.iter().flatten() {
            if best.is_none_or(|(_, b)| *err < b) {
                best = Some((*param, *err));
            }
        }
        out[pos] = best;
    }
    Ok(out)
}

fn path_param(path: &Path, i: usize) -> Param {
    path.params[i]
}

fn seq_err(path: &Path, i: usize) -> f64 {
    path.rel_error.as_ref().expect("path built with target")[i]
}

struct RepResult {
    delta: f64,
    /// `[method][rule]`.
    outcomes: Vec<Vec<Outcome>>,
}

/// Runs the experiment with the default (parallel) execution.
pub fn run_monte_carlo(cfg: &McConfig) -> Result<McReport> {
    run_monte_carlo_with(cfg, Execution::default())
}

/// Runs the experiment. Replication `i` always uses seed `base_seed + i`, and
/// results are merged in replication order, so serial and parallel
/// execution produce identical reports.
pub fn run_monte_carlo_with(cfg: &McConfig, exec: Execution) -> Result<McReport> {
    cfg.validate()?;
    let mut report = McReport::default();
    for problem in &cfg.problems {
        let op = Operator::from_problem(problem)?;
        let target = op.target(&problem.x_true)?;
        for &level in &cfg.noise_levels {
            let results: Vec<Result<RepResult>> = map_indexed(exec, cfg.reps, |rep| {
                let seed = cfg.base_seed.wrapping_add(rep as u64);
                let (y, delta) = add_noise(&problem.y_exact, NoiseModel { level, seed })?;
                let data = op.data(&y)?;
                let outcomes = cfg
                    .methods
                    .iter()
                    .map(|&m| evaluate_method(&op, &target, &data, delta, m, &cfg.rules, &cfg.grid))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RepResult { delta, outcomes })
            });
            let results: Vec<RepResult> = results.into_iter().collect::<Result<_>>()?;
            aggregate(&mut report, cfg, problem, level, &results);
        }
    }
    Ok(report)
}

fn aggregate(report: &mut McReport, cfg: &McConfig, problem: &Problem, level: f64, results: &[RepResult]) {
    for (rep, res) in results.iter().enumerate() {
        for (mi, &method) in cfg.methods.iter().enumerate() {
            for (ri, &rule) in cfg.rules.iter().enumerate() {
                if let Some((param, err)) = res.outcomes[mi][ri] {
                    report.records.push(RepRecord {
                        problem: problem.name.clone(),
                        method,
                        rule,
                        noise_level: level,
                        rep,
                        seed: cfg.base_seed.wrapping_add(rep as u64),
                        param: param.value(),
                        rel_error: err,
                        delta_realized: res.delta,
                    });
                }
            }
        }
    }
    for (mi, &method) in cfg.methods.iter().enumerate() {
        for (ri, &rule) in cfg.rules.iter().enumerate() {
            let picks: Vec<(Param, f64)> = results.iter().filter_map(|r| r.outcomes[mi][ri]).collect();
            let cell = (!picks.is_empty()).then(|| {
                let errs: Vec<f64> = picks.iter().map(|p| p.1).collect();
                let params: Vec<f64> = picks.iter().map(|p| p.0.value()).collect();
                let (mean, std) = mean_std(&errs);
                let e_min = errs.iter().copied().fold(f64::INFINITY, f64::min);
                let e_max = errs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                McCell {
                    e_min,
                    e_max,
                    // Rounding can push the mean of equal values past the extremes.
                    e_mean: mean.clamp(e_min, e_max),
                    e_std: std,
                    param_mean: mean_std(&params).0,
                }
            });
            report.rows.push(McRow {
                problem: problem.name.clone(),
                method,
                rule,
                noise_level: level,
                rep_count: picks.len(),
                cell,
            });
        }
    }
}
