//! CSV emitters. Every file starts with a `# illreg <kind> v<N>` line so the
//! schema can be recognized without guessing from the columns.

use std::io::Write;

use crate::error::Result;
use crate::filters::Method;
use crate::noise_mc::{CurvePoint, McReport};
use crate::selection::RuleOutcome;
use crate::theory::CheckReport;

pub const MC_REPORT_HEADER: &str = "# illreg mc-report v1";
pub const REP_LOG_HEADER: &str = "# illreg mc-reps v1";
pub const RULE_TRACE_HEADER: &str = "# illreg rule-trace v1";
pub const CURVE_HEADER: &str = "# illreg curve v1";
pub const VERIFY_HEADER: &str = "# illreg verify v1";
pub const SOLUTION_HEADER: &str = "# illreg solution v1";

fn table<W: Write>(mut out: W, stamp: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    writeln!(out, "{stamp}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_mc_report<W: Write>(out: W, report: &McReport) -> Result<()> {
    let rows = report.rows.iter().map(|r| {
        let mut v = vec![
            r.problem.clone(),
            r.method.to_string(),
            r.rule.to_string(),
            num(r.noise_level),
            r.rep_count.to_string(),
        ];
        match r.cell {
            Some(c) => v.extend([c.e_min, c.e_max, c.e_mean, c.e_std, c.param_mean].map(num)),
            None => v.extend(std::iter::repeat_n("NA".to_string(), 5)),
        }
        v
    });
    table(
        out,
        MC_REPORT_HEADER,
        &[
            "problem", "method", "rule", "noise_level", "rep_count", "e_min", "e_max", "e_mean", "e_std", "param_mean",
        ],
        rows,
    )
}

pub fn write_rep_log<W: Write>(out: W, report: &McReport) -> Result<()> {
    let rows = report.records.iter().map(|r| {
        vec![
            r.problem.clone(),
            r.method.to_string(),
            r.rule.to_string(),
            num(r.noise_level),
            r.rep.to_string(),
            r.seed.to_string(),
            num(r.param),
            num(r.rel_error),
            num(r.delta_realized),
        ]
    });
    table(
        out,
        REP_LOG_HEADER,
        &[
            "problem", "method", "rule", "noise_level", "rep", "seed", "param", "rel_error", "delta_realized",
        ],
        rows,
    )
}

pub fn write_rule_trace<W: Write>(out: W, outcome: &RuleOutcome) -> Result<()> {
    let rows = outcome.objective_trace.iter().map(|&(p, o)| vec![num(p), num(o)]);
    table(out, RULE_TRACE_HEADER, &["param", "objective"], rows)
}

pub fn write_curves<W: Write>(out: W, curves: &[(Method, Vec<CurvePoint>)]) -> Result<()> {
    let rows = curves.iter().flat_map(|(m, pts)| {
        pts.iter()
            .map(move |p| vec![m.to_string(), num(p.alpha), num(p.cond), num(p.rel_error)])
    });
    table(out, CURVE_HEADER, &["method", "alpha", "cond", "rel_error"], rows)
}

pub fn write_checks<W: Write>(out: W, checks: &[CheckReport]) -> Result<()> {
    let rows = checks
        .iter()
        .map(|c| vec![c.check.clone(), c.parameter.clone(), num(c.value), c.pass.to_string()]);
    table(out, VERIFY_HEADER, &["check", "parameter", "worst_slack_or_band", "pass"], rows)
}

pub fn write_solution<W: Write>(out: W, x: &[f64]) -> Result<()> {
    let rows = x.iter().enumerate().map(|(i, v)| vec![i.to_string(), num(*v)]);
    table(out, SOLUTION_HEADER, &["index", "x"], rows)
}
