use super::{RuleFlags, RuleOutcome};
use crate::error::{Error, Result};
use crate::filters::{Method, Param};
use crate::numeric::geometric_desc;
use crate::path::{Data, Operator};

pub const MOROZOV_MIN: f64 = 1e-14;
pub const MOROZOV_MAX: f64 = 1.0;
/// Bracketing scan density (points per decade).
const SCAN_PER_DECADE: usize = 4;
const REL_WIDTH: f64 = 1e-3;

/// `α = sup{α : ‖A x_α − y‖ ≤ δ + √δ}` over `[1e−14, 1]`.
///
/// A coarse log scan brackets the crossing and checks that the residual is
/// non-decreasing in α; bisection in `ln α` then narrows the bracket to a
/// relative width of 1e−3 and returns its lower (feasible) end. If the scan
/// sees a decreasing residual, the largest feasible scan point is returned
/// with `non_monotone_warning` set.
pub fn morozov_like(op: &Operator, data: &Data, delta: f64, kind: Method) -> Result<RuleOutcome> {
    if !matches!(kind, Method::Nrm | Method::Tik | Method::Sw) {
        return Err(Error::Domain(format!(
            "the residual rule needs a monotone continuous filter, got {kind}"
        )));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be >= 0, got {delta}")));
    }
    let tau = delta + delta.sqrt();
    let res = |alpha: f64| op.filter_residual(data, kind, alpha);

    let decades = (MOROZOV_MAX / MOROZOV_MIN).log10().round() as usize;
    // Ascending in α for the bracket search.
    let mut scan = geometric_desc(MOROZOV_MIN, MOROZOV_MAX, decades * SCAN_PER_DECADE + 1);
    scan.reverse();
    let values: Vec<f64> = scan.iter().map(|&a| res(a)).collect();
    let mut trace: Vec<(f64, f64)> = scan.iter().copied().zip(values.iter().copied()).collect();
    let mut flags = RuleFlags::default();

    let monotone = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    if !monotone {
        flags.non_monotone_warning = true;
        let pick = scan.iter().zip(&values).rev().find(|(_, &r)| r <= tau).map(|(&a, _)| a);
        flags.boundary_hit = pick.is_none_or(|a| a == MOROZOV_MAX || a == MOROZOV_MIN);
        return Ok(RuleOutcome {
            param: Some(Param::Alpha(pick.unwrap_or(MOROZOV_MIN))),
            objective_trace: trace,
            flags,
        });
    }

    if values[values.len() - 1] <= tau {
        flags.boundary_hit = true;
        return Ok(RuleOutcome {
            param: Some(Param::Alpha(MOROZOV_MAX)),
            objective_trace: trace,
            flags,
        });
    }
    if values[0] > tau {
        flags.boundary_hit = true;
        return Ok(RuleOutcome {
            param: Some(Param::Alpha(MOROZOV_MIN)),
            objective_trace: trace,
            flags,
        });
    }

    let i = values.iter().rposition(|&r| r <= tau).expect("feasible point exists");
    let (mut lo, mut hi) = (scan[i].ln(), scan[i + 1].ln());
    while hi - lo > REL_WIDTH.ln_1p() {
        let mid = 0.5 * (lo + hi);
        let alpha = mid.exp();
        let r = res(alpha);
        trace.push((alpha, r));
        if r <= tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RuleOutcome {
        param: Some(Param::Alpha(lo.exp())),
        objective_trace: trace,
        flags,
    })
}
