use crate::error::{Error, Result};
use crate::filters::Method;
use crate::numeric::median;
use crate::path::{Data, Operator, Target};
use crate::spectral::reconstructed_condition;

/// Conditioning of the reconstructed operator and the error it buys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    pub cond: f64,
    pub rel_error: f64,
}

/// One point per α (sorted descending). For tsvd, thresholds above the
/// largest eigenvalue have no reconstruction and are left out.
pub fn conditioning_error_curve(
    op: &Operator,
    data: &Data,
    target: &Target,
    method: Method,
    alphas: &[f64],
) -> Result<Vec<CurvePoint>> {
    if !method.is_filter() {
        return Err(Error::Domain("conditioning curves need a spectral filter method".into()));
    }
    if alphas.is_empty() {
        return Err(Error::Invalid("empty alpha grid".into()));
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out = Vec::with_capacity(sorted.len());
    for alpha in sorted {
        let cond = match reconstructed_condition(&op.svd, method, alpha) {
            Ok(c) => c,
            Err(Error::EmptyReconstruction { .. }) => continue,
            Err(e) => return Err(e),
        };
        out.push(CurvePoint {
            alpha,
            cond,
            rel_error: op.filter_error(data, target, method, alpha),
        });
    }
    Ok(out)
}

/// Pointwise median error over curves sharing one α grid.
pub fn median_curve(curves: &[Vec<CurvePoint>]) -> Result<Vec<CurvePoint>> {
    let first = curves.first().ok_or_else(|| Error::Invalid("no curves".into()))?;
    if curves.iter().any(|c| c.len() != first.len()) {
        return Err(Error::Invalid("curves have different grids".into()));
    }
    Ok(first
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let errs: Vec<f64> = curves.iter().map(|c| c[i].rel_error).collect();
            CurvePoint {
                rel_error: median(&errs),
                ..*p
            }
        })
        .collect())
}

/// Result of comparing two curves at common conditioning levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub compared: usize,
    /// Levels where the lower curve's error exceeds the upper one's.
    pub violations: usize,
    /// Largest relative excess among violations (0 if none).
    pub max_excess: f64,
}

impl Dominance {
    /// At most `max_fraction` of levels violated, each by at most `max_excess`.
    pub fn holds(&self, max_fraction: f64, max_excess: f64) -> bool {
        self.compared > 0
            && self.violations as f64 <= max_fraction * self.compared as f64
            && self.max_excess <= max_excess
    }
}

/// `(ln cond, error)` sorted by conditioning; equal levels keep the smaller error.
fn as_function(curve: &[CurvePoint]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = curve.iter().map(|p| (p.cond.ln(), p.rel_error)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|later, kept| later.0 == kept.0);
    pts
}

fn interpolate(f: &[(f64, f64)], x: f64) -> f64 {
    let i = f.partition_point(|p| p.0 < x);
    if i == 0 {
        return f[0].1;
    }
    if i == f.len() {
        return f[f.len() - 1].1;
    }
    let (x0, y0) = f[i - 1];
    let (x1, y1) = f[i];
    if x1 == x0 {
        return y0.min(y1);
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Checks whether `lower` has error ≤ `upper` at every conditioning level
/// both curves reach. Levels are the union of both curves' nodes inside the
/// common range; errors are interpolated linearly in `ln cond`.
pub fn curve_dominance(lower: &[CurvePoint], upper: &[CurvePoint]) -> Dominance {
    let (fl, fu) = (as_function(lower), as_function(upper));
    let mut out = Dominance {
        compared: 0,
        violations: 0,
        max_excess: 0.0,
    };
    if fl.is_empty() || fu.is_empty() {
        return out;
    }
    let lo = fl[0].0.max(fu[0].0);
    let hi = fl[fl.len() - 1].0.min(fu[fu.len() - 1].0);
    let mut levels: Vec<f64> = fl.iter().chain(&fu).map(|p| p.0).filter(|&x| x >= lo && x <= hi).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    for x in levels {
        let (el, eu) = (interpolate(&fl, x), interpolate(&fu, x));
        out.compared += 1;
        if el > eu {
            out.violations += 1;
            out.max_excess = out.max_excess.max(el / eu - 1.0);
        }
    }
    out
}
