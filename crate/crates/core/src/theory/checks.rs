use std::fmt;
use std::str::FromStr;

use super::index::{m_constant, IndexFunctions};
use crate::error::{Error, Result};
use crate::filters::{filter_pair, Method};
use crate::numeric::{band, bisect_root, geometric_desc};

/// One row of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub parameter: String,
    /// Worst slack (pointwise bounds) or max/min band (rate-type claims).
    pub value: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: &str, parameter: String, value: f64, pass: bool) -> Self {
        Self {
            check: check.to_string(),
            parameter,
            value,
            pass,
        }
    }
}

/// 400 log-spaced points on `[1e−14, a]`, ascending.
pub fn lambda_grid(a: f64) -> Vec<f64> {
    let mut g = geometric_desc(1e-14, a, 400);
    g.reverse();
    g
}

fn decades(hi_exp: i32, lo_exp: i32) -> Vec<f64> {
    (hi_exp..=lo_exp).map(|e| 10f64.powi(-e)).collect()
}

fn nrm_g(alpha: f64, lambda: f64) -> f64 {
    filter_pair(Method::Nrm, alpha, lambda).0
}

fn nrm_r(alpha: f64, lambda: f64) -> f64 {
    filter_pair(Method::Nrm, alpha, lambda).1
}

/// `S(α) = max_λ √λ·g_α(λ)` over the grid.
pub fn prop2_sup(alpha: f64, lambdas: &[f64]) -> f64 {
    lambdas
        .iter()
        .map(|&l| l.sqrt() * nrm_g(alpha, l))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Checks `S(α) ≤ 1/(2√(Mα))` for each α and reports the band of `S(α)·√α`
/// (required ≤ `band_limit`).
pub fn verify_prop2(a: f64, alphas: &[f64], lambdas: &[f64], band_limit: f64) -> Vec<CheckReport> {
    let m = m_constant(a);
    let mut worst = f64::NEG_INFINITY;
    let mut scaled = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let s = prop2_sup(alpha, lambdas);
        worst = worst.max(s - 1.0 / (2.0 * (m * alpha).sqrt()));
        scaled.push(s * alpha.sqrt());
    }
    let b = band(&scaled);
    let range = alpha_range(alphas);
    vec![
        CheckReport::new("prop2-bound", format!("M={m};{range}"), worst, worst <= 1e-12),
        CheckReport::new("prop2-band", range, b, b <= band_limit),
    ]
}

fn alpha_range(alphas: &[f64]) -> String {
    let lo = alphas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!("alpha=[{lo:e},{hi:e}]")
}

/// `r_α(λ) ≤ (9/4)·α|ln λ|²/(λ + α|ln λ|²)` on every grid pair with `α ≤ λ`.
/// The reported value is the largest `lhs − rhs`.
pub fn verify_residual_bound(alphas: &[f64], lambdas: &[f64]) -> CheckReport {
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0usize;
    let mut violations = 0usize;
    for &alpha in alphas {
        for &lambda in lambdas.iter().filter(|&&l| alpha <= l && l < 1.0) {
            let l2 = lambda.ln().powi(2);
            let rhs = 2.25 * alpha * l2 / (lambda + alpha * l2);
            let slack = nrm_r(alpha, lambda) - rhs;
            worst = worst.max(slack);
            count += 1;
            if slack > 1e-12 {
                violations += 1;
            }
        }
    }
    CheckReport::new(
        "lemma1",
        format!("points={count};violations={violations}"),
        worst,
        count > 0 && violations == 0,
    )
}

/// Band of `Q(α)/f_p(α)` with `Q(α) = max_λ r_α(λ)·f_p(λ)`.
pub fn verify_qualification(p: f64, a: f64, alphas: &[f64], lambdas: &[f64]) -> Result<CheckReport> {
    let f = IndexFunctions::new(p, a)?;
    let ratios: Vec<f64> = alphas
        .iter()
        .map(|&alpha| {
            let q = lambdas
                .iter()
                .map(|&l| nrm_r(alpha, l) * f.f(l))
                .fold(f64::NEG_INFINITY, f64::max);
            q / f.f(alpha)
        })
        .collect();
    let b = band(&ratios);
    Ok(CheckReport::new(
        "qualification",
        format!("p={p};{}", alpha_range(alphas)),
        b,
        b <= 10.0,
    ))
}

/// A root of `h(λ) = αp|ln λ|² − λ(2 − p + |ln λ|)` near `α|ln α|`.
pub fn root_of_h(p: f64, alpha: f64, a: f64) -> Result<f64> {
    let f = IndexFunctions::new(p, a)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let scale = alpha * alpha.ln().abs();
    let lo = scale / 100.0;
    let mut hi = a.min(100.0 * scale);
    if p > 2.0 {
        hi = hi.min((2.0 - p).exp());
    }
    let (h_lo, h_hi) = (f.h(alpha, lo), f.h(alpha, hi));
    if !(lo < hi) || h_lo.signum() == h_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, h_lo, h_hi });
    }
    Ok(bisect_root(|l| f.h(alpha, l), lo, hi, 1e-12))
}

/// Band of `max_λ Ψ_{p,α}(λ)·α|ln α|^p` across `alphas`.
pub fn verify_psi_supremum(p: f64, a: f64, alphas: &[f64], lambdas: &[f64]) -> Result<CheckReport> {
    let f = IndexFunctions::new(p, a)?;
    let scaled: Vec<f64> = alphas
        .iter()
        .map(|&alpha| {
            let sup = lambdas
                .iter()
                .map(|&l| f.psi(alpha, l))
                .fold(f64::NEG_INFINITY, f64::max);
            sup * alpha * alpha.ln().abs().powf(p)
        })
        .collect();
    let b = band(&scaled);
    Ok(CheckReport::new(
        "lemma2-psi",
        format!("p={p};{}", alpha_range(alphas)),
        b,
        b <= 10.0,
    ))
}

/// Root location check: `root/(α|ln α|) ∈ [0.1, 10]` for every α. The
/// reported value is the ratio farthest from 1 on a log scale.
pub fn verify_root_scaling(p: f64, a: f64, alphas: &[f64]) -> Result<CheckReport> {
    let mut worst: f64 = 1.0;
    for &alpha in alphas {
        let ratio = root_of_h(p, alpha, a)? / (alpha * alpha.ln().abs());
        if ratio.ln().abs() > worst.ln().abs() {
            worst = ratio;
        }
    }
    Ok(CheckReport::new(
        "lemma2-root",
        format!("p={p};{}", alpha_range(alphas)),
        worst,
        (0.1..=10.0).contains(&worst),
    ))
}

/// The verification suites exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Prop2,
    Lemma1,
    Qualification,
    Lemma2,
    Rates,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Prop2 => "prop2",
            CheckKind::Lemma1 => "lemma1",
            CheckKind::Qualification => "qualification",
            CheckKind::Lemma2 => "lemma2",
            CheckKind::Rates => "rates",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            CheckKind::Prop2,
            CheckKind::Lemma1,
            CheckKind::Qualification,
            CheckKind::Lemma2,
            CheckKind::Rates,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Invalid(format!("unknown check {s:?}")))
    }
}

/// Runs a suite with its standard grids at `a = e⁻¹`.
pub fn run_check(kind: CheckKind) -> Result<Vec<CheckReport>> {
    let a = (-1.0_f64).exp();
    let lambdas = lambda_grid(a);
    Ok(match kind {
        CheckKind::Prop2 => verify_prop2(a, &decades(2, 10), &lambdas, 2.0),
        CheckKind::Lemma1 => vec![verify_residual_bound(&lambdas, &lambdas)],
        CheckKind::Qualification => [0.5, 1.0, 2.0]
            .iter()
            .map(|&p| verify_qualification(p, a, &decades(3, 9), &lambdas))
            .collect::<Result<_>>()?,
        CheckKind::Lemma2 => {
            let alphas = [1e-4, 1e-6, 1e-8];
            let mut out = Vec::new();
            for p in [0.5, 1.0, 2.0] {
                out.push(verify_root_scaling(p, a, &alphas)?);
                out.push(verify_psi_supremum(p, a, &alphas, &lambdas)?);
            }
            out
        }
        CheckKind::Rates => super::rates::rate_checks()?,
    })
}
