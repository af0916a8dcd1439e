use super::checks::CheckReport;
use crate::error::{Error, Result};
use crate::filters::Method;
use crate::noise_mc::add_noise_exact;
use crate::numeric::{band, ls_slope};
use crate::path::Operator;
use crate::problems::{gen_diag_synthetic, Decay, SourceKind, SyntheticSource};
use crate::selection::{apriori_delta, apriori_theta_eps, apriori_theta_p, morozov_like, DEFAULT_EPS};
use crate::spectral::{scale_problem, Problem, SpectralConstraint};

/// Parameter rule driving a rate experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateRule {
    /// `Θ_p⁻¹(δ)`; needs a logarithmic source.
    ThetaP,
    /// `Θ_ε⁻¹(δ)` with `φ = t^{min(μ,1)}` (Hölder) or `f_p` (logarithmic).
    ThetaEps { eps: f64 },
    /// `α = δ`.
    Delta,
    /// The residual rule with threshold `δ + √δ`.
    Morozov,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub delta: f64,
    /// Parameter from the first noise draw.
    pub alpha: f64,
    /// Relative error averaged over the draws.
    pub rel_error: f64,
    /// Set when δ lies outside the rule's domain; no error is recorded then.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub points: Vec<RatePoint>,
    /// Band of `e(δ)/f_p(δ)` (logarithmic sources).
    pub ratio_band: Option<f64>,
    /// Slope of `ln e` against `ln δ` (Hölder sources).
    pub slope: Option<f64>,
}

/// Runs `rule` on `problem` for each noise norm in `deltas`.
///
/// Noise is a seeded Gaussian direction rescaled to norm exactly δ; errors
/// are averaged over `draws` independent directions (seeds `seed..seed+draws`).
pub fn empirical_rate(
    problem: &Problem,
    source: SourceKind,
    rule: RateRule,
    deltas: &[f64],
    kind: Method,
    draws: usize,
    seed: u64,
) -> Result<RateReport> {
    if !kind.is_filter() {
        return Err(Error::Domain("rate experiments need a spectral filter method".into()));
    }
    if draws == 0 {
        return Err(Error::Domain("draws must be >= 1".into()));
    }
    let op = Operator::from_problem(problem)?;
    let target = op.target(&problem.x_true)?;
    let a = op.lambdas()[0].min(SpectralConstraint::default().bound());

    let mut points = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mut total = 0.0;
        let mut first_alpha = f64::NAN;
        let mut skipped = false;
        for d in 0..draws {
            let y = add_noise_exact(&problem.y_exact, delta, seed + d as u64)?;
            let data = op.data(&y)?;
            let chosen = match (rule, source) {
                (RateRule::ThetaP, SourceKind::Logarithmic(p)) => apriori_theta_p(delta, p, a),
                (RateRule::ThetaP, SourceKind::Holder(_)) => {
                    return Err(Error::Domain("Θ_p rule needs a logarithmic source".into()))
                }
                (RateRule::ThetaEps { eps }, SourceKind::Holder(mu)) => {
                    let e = mu.min(1.0);
                    apriori_theta_eps(delta, eps, |t| t.powf(e), a)
                }
                (RateRule::ThetaEps { eps }, SourceKind::Logarithmic(p)) => {
                    apriori_theta_eps(delta, eps, |t| (-t.ln()).powf(-p), a)
                }
                (RateRule::Delta, _) => apriori_delta(delta),
                (RateRule::Morozov, _) => morozov_like(&op, &data, delta, kind)
                    .map(|o| o.param.expect("residual rule always chooses").value()),
            };
            let alpha = match chosen {
                Ok(alpha) => alpha,
                Err(Error::OutOfRange { .. }) => {
                    skipped = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            if d == 0 {
                first_alpha = alpha;
            }
            total += op.filter_error(&data, &target, kind, alpha);
        }
        points.push(RatePoint {
            delta,
            alpha: first_alpha,
            rel_error: if skipped { f64::NAN } else { total / draws as f64 },
            skipped,
        });
    }

    let used: Vec<&RatePoint> = points.iter().filter(|p| !p.skipped).collect();
    let (ratio_band, slope) = match source {
        SourceKind::Logarithmic(p) => {
            let ratios: Vec<f64> = used.iter().map(|q| q.rel_error * (-q.delta.ln()).powf(p)).collect();
            ((!ratios.is_empty()).then(|| band(&ratios)), None)
        }
        SourceKind::Holder(_) => {
            let xs: Vec<f64> = used.iter().map(|q| q.delta.ln()).collect();
            let ys: Vec<f64> = used.iter().map(|q| q.rel_error.ln()).collect();
            (None, (xs.len() >= 2).then(|| ls_slope(&xs, &ys)))
        }
    };
    Ok(RateReport {
        points,
        ratio_band,
        slope,
    })
}

/// Noise draws averaged per δ in the standard rate checks.
pub const RATE_DRAWS: usize = 8;
const RATE_SEED: u64 = 2024;

fn fixture(n: usize, decay: Decay, kind: SourceKind) -> Result<Problem> {
    let raw = gen_diag_synthetic(
        n,
        decay,
        SyntheticSource {
            kind,
            rho: 1.0,
            seed: 17,
        },
    )?;
    scale_problem(&raw, SpectralConstraint::default())
}

fn log_grid(hi_exp: i32, lo_exp: i32) -> Vec<f64> {
    (hi_exp..=lo_exp).map(|e| 10f64.powi(-e)).collect()
}

/// The four standard rate experiments on diagonal fixtures with the nrm filter.
pub fn rate_checks() -> Result<Vec<CheckReport>> {
    let log1 = SourceKind::Logarithmic(1.0);
    let exp_log = fixture(60, Decay::Exponential(1.0), log1)?;
    let mut out = Vec::new();

    let r = empirical_rate(&exp_log, log1, RateRule::ThetaP, &log_grid(2, 5), Method::Nrm, RATE_DRAWS, RATE_SEED)?;
    let b = r.ratio_band.unwrap_or(f64::INFINITY);
    out.push(report("rates-log-theta-p", "p=1;delta=[1e-5,1e-2]", b, b <= 5.0));

    for (mu, limit) in [(0.5, 0.40), (2.0, 0.55)] {
        let src = SourceKind::Holder(mu);
        let prob = fixture(HOLDER_N, HOLDER_DECAY, src)?;
        let r = empirical_rate(
            &prob,
            src,
            RateRule::ThetaEps { eps: DEFAULT_EPS },
            &log_grid(HOLDER_DELTAS.0, HOLDER_DELTAS.1),
            Method::Nrm,
            RATE_DRAWS,
            RATE_SEED,
        )?;
        let s = r.slope.unwrap_or(f64::NEG_INFINITY);
        out.push(report(
            "rates-holder-theta-eps",
            &format!("mu={mu};eps={DEFAULT_EPS};delta=[1e-{},1e-{}]", HOLDER_DELTAS.1, HOLDER_DELTAS.0),
            s,
            s >= limit,
        ));
    }

    let r = empirical_rate(&exp_log, log1, RateRule::Morozov, &log_grid(2, 6), Method::Nrm, RATE_DRAWS, RATE_SEED)?;
    let b = r.ratio_band.unwrap_or(f64::INFINITY);
    out.push(report("rates-log-morozov", "p=1;delta=[1e-6,1e-2]", b, b <= 10.0));
    Ok(out)
}

/// Hölder fixture: size, spectrum and δ exponents (10^{-hi} … 10^{-lo}).
const HOLDER_N: usize = 200;
const HOLDER_DECAY: Decay = Decay::Polynomial(2.0);
const HOLDER_DELTAS: (i32, i32) = (3, 7);

fn report(check: &str, parameter: &str, value: f64, pass: bool) -> CheckReport {
    CheckReport {
        check: check.to_string(),
        parameter: parameter.to_string(),
        value,
        pass,
    }
}
