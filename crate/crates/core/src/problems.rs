//! Test-problem generators: shaw, baart, heat and a diagonal fixture with a
//! prescribed source condition.
//!
//! The three integral-equation problems follow the usual regularization
//! test-suite discretizations. Agreement with any particular reference
//! implementation is not bit-exact; what matters is the spectrum class.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::{scale_problem, Problem, SpectralConstraint};

/// Shaw image-reconstruction kernel, midpoint collocation on `[−π/2, π/2]`.
pub fn gen_shaw(n: usize) -> Result<Problem> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Invalid(format!("shaw needs an even n >= 4, got {n}")));
    }
    let h = PI / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| -PI / 2.0 + (i as f64 + 0.5) * h).collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let (s, t) = (nodes[i], nodes[j]);
        let u = PI * (s.sin() + t.sin());
        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
        let c = s.cos() + t.cos();
        h * c * c * sinc * sinc
    });
    let x = DVector::from_iterator(
        n,
        nodes
            .iter()
            .map(|&t| 2.0 * (-6.0 * (t - 0.8).powi(2)).exp() + (-2.0 * (t + 0.5).powi(2)).exp()),
    );
    Problem::from_solution("shaw", a, x)
}

/// Galerkin discretization of `∫₀^π exp(s cos t) f(t) dt = 2 sinh(s)/s`,
/// `s ∈ [0, π/2]`, with orthonormal box functions and the midpoint rule on
/// each cell. The stored solution samples `sin t` at the cell midpoints.
pub fn gen_baart(n: usize) -> Result<Problem> {
    if n < 4 {
        return Err(Error::Invalid(format!("baart needs n >= 4, got {n}")));
    }
    let (hs, ht) = baart_steps(n);
    let weight = (hs * ht).sqrt();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let s = (i as f64 + 0.5) * hs;
        let t = (j as f64 + 0.5) * ht;
        weight * (s * t.cos()).exp()
    });
    let x = DVector::from_fn(n, |j, _| ((j as f64 + 0.5) * ht).sin());
    Problem::from_solution("baart", a, x)
}

fn baart_steps(n: usize) -> (f64, f64) {
    (PI / (2.0 * n as f64), PI / n as f64)
}

/// Analytic right-hand side of baart expressed in the discrete scaling of
/// [`gen_baart`], for cross-checking the quadrature.
pub fn baart_analytic_rhs(n: usize) -> DVector<f64> {
    let (hs, ht) = baart_steps(n);
    let factor = (hs / ht).sqrt();
    DVector::from_fn(n, |i, _| {
        let s = (i as f64 + 0.5) * hs;
        factor * 2.0 * s.sinh() / s
    })
}

/// Heat kernel `k(τ) = τ^{-3/2}/(2√π) exp(−1/(4τ))` (unit conductivity).
fn heat_kernel(tau: f64) -> f64 {
    tau.powf(-1.5) / (2.0 * PI.sqrt()) * (-1.0 / (4.0 * tau)).exp()
}

/// Solution profile of the heat problem: quadratic ramp, bump, exponential
/// decay over the first half of `[0, 1]`, zero on the second half.
///
/// With `t_i = 20 i / n` for `i = 1..n/2`:
/// `0.75 t²/4` for `t < 2`, `0.75 + (t−2)(3−t)` for `2 ≤ t < 3`,
/// `0.75 exp(−2(t−3))` for `t ≥ 3`.
pub fn heat_profile(n: usize) -> DVector<f64> {
    let mut x = DVector::zeros(n);
    for i in 1..=n / 2 {
        let t = i as f64 * 20.0 / n as f64;
        x[i - 1] = if t < 2.0 {
            0.75 * t * t / 4.0
        } else if t < 3.0 {
            0.75 + (t - 2.0) * (3.0 - t)
        } else {
            0.75 * (-(t - 3.0) * 2.0).exp()
        };
    }
    x
}

/// First-kind Volterra equation `∫₀^s k(s−t) f(t) dt = g(s)` on `[0, 1]`,
/// midpoint rule; the matrix is lower triangular Toeplitz.
pub fn gen_heat(n: usize) -> Result<Problem> {
    if n < 4 {
        return Err(Error::Invalid(format!("heat needs n >= 4, got {n}")));
    }
    let h = 1.0 / n as f64;
    let column: Vec<f64> = (0..n).map(|d| h * heat_kernel((d as f64 + 0.5) * h)).collect();
    let a = DMatrix::from_fn(n, n, |i, j| if j <= i { column[i - j] } else { 0.0 });
    Problem::from_solution("heat", a, heat_profile(n))
}

/// Singular-value decay of the diagonal fixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `σ_k = exp(−γ k / 2)`.
    Exponential(f64),
    /// `σ_k = k^{−β/2}`.
    Polynomial(f64),
}

/// Smoothness class of the fixture's solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// `x = (AᵀA)^μ w`.
    Holder(f64),
    /// `x = (−ln AᵀA)^{−p} w`.
    Logarithmic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSource {
    pub kind: SourceKind,
    /// `‖w‖`.
    pub rho: f64,
    pub seed: u64,
}

impl SyntheticSource {
    pub fn index_value(&self, lambda: f64) -> f64 {
        match self.kind {
            SourceKind::Holder(mu) => lambda.powf(mu),
            SourceKind::Logarithmic(p) => (-lambda.ln()).powf(-p),
        }
    }
}

/// Diagonal problem with `σ_1² = exp(−1)` and `x_true = φ(AᵀA) w`, `‖w‖ = ρ`.
pub fn gen_diag_synthetic(n: usize, decay: Decay, source: SyntheticSource) -> Result<Problem> {
    if n == 0 {
        return Err(Error::Invalid("n must be >= 1".into()));
    }
    match decay {
        Decay::Exponential(g) | Decay::Polynomial(g) if !(g > 0.0 && g.is_finite()) => {
            return Err(Error::Domain(format!("decay rate must be positive, got {g}")));
        }
        _ => {}
    }
    match source.kind {
        SourceKind::Holder(v) | SourceKind::Logarithmic(v) if !(v >= 0.0 && v.is_finite()) => {
            return Err(Error::Domain(format!("source exponent must be >= 0, got {v}")));
        }
        _ => {}
    }
    if !(source.rho > 0.0 && source.rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive, got {}", source.rho)));
    }

    let raw: Vec<f64> = (1..=n)
        .map(|k| match decay {
            Decay::Exponential(g) => (-g * k as f64 / 2.0).exp(),
            Decay::Polynomial(b) => (k as f64).powf(-b / 2.0),
        })
        .collect();
    let t = (-0.5_f64).exp() / raw[0];
    let sigma: Vec<f64> = raw.iter().map(|s| s * t).collect();
    if sigma.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Domain("spectrum underflows to zero; reduce n or the decay rate".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(source.seed);
    let mut w: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let norm = w.norm();
    w *= source.rho / norm;

    let x = DVector::from_fn(n, |k, _| source.index_value(sigma[k] * sigma[k]) * w[k]);
    let a = DMatrix::from_diagonal(&DVector::from_vec(sigma));
    let name = match (decay, source.kind) {
        (Decay::Exponential(_), SourceKind::Logarithmic(_)) => "diag-exp-log",
        (Decay::Exponential(_), SourceKind::Holder(_)) => "diag-exp-holder",
        (Decay::Polynomial(_), SourceKind::Logarithmic(_)) => "diag-poly-log",
        (Decay::Polynomial(_), SourceKind::Holder(_)) => "diag-poly-holder",
    };
    Problem::from_solution(name, a, x)
}

/// Named built-in problem families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Shaw,
    Baart,
    Heat,
    Diag,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Shaw => "shaw",
            ProblemKind::Baart => "baart",
            ProblemKind::Heat => "heat",
            ProblemKind::Diag => "diag",
        }
    }

    /// Discretization sizes used for the reference experiments.
    pub fn default_size(self) -> usize {
        match self {
            ProblemKind::Shaw => 160,
            ProblemKind::Baart | ProblemKind::Heat => 150,
            ProblemKind::Diag => 60,
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shaw" => Ok(ProblemKind::Shaw),
            "baart" => Ok(ProblemKind::Baart),
            "heat" => Ok(ProblemKind::Heat),
            "diag" => Ok(ProblemKind::Diag),
            other => Err(Error::Invalid(format!("unknown problem {other:?}"))),
        }
    }
}

/// Generates a named problem and scales it to `‖AᵀA‖ = exp(−1)`.
///
/// The diagonal family uses exponential decay `γ = 1` and a logarithmic
/// source `p = 1`, `ρ = 1`, seeded by `seed`.
pub fn build_scaled(kind: ProblemKind, n: usize, seed: u64) -> Result<Problem> {
    let raw = match kind {
        ProblemKind::Shaw => gen_shaw(n)?,
        ProblemKind::Baart => gen_baart(n)?,
        ProblemKind::Heat => gen_heat(n)?,
        ProblemKind::Diag => gen_diag_synthetic(
            n,
            Decay::Exponential(1.0),
            SyntheticSource {
                kind: SourceKind::Logarithmic(1.0),
                rho: 1.0,
                seed,
            },
        )?,
    };
    scale_problem(&raw, SpectralConstraint::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::compute_svd;
    use approx::assert_relative_eq;

    #[test]
    fn shaw_is_symmetric_and_bounded() {
        let p = gen_shaw(160).unwrap();
        let h = PI / 160.0;
        assert!((&p.a - p.a.transpose()).amax() < 1e-12);
        assert!(p.a.iter().all(|v| v.is_finite()));
        assert!(p.a.amax() <= 4.0 * h + 1e-15);
        assert!(p.a.amax() > 3.9 * h);
        assert!(gen_shaw(15).is_err());
    }

    #[test]
    fn shaw_is_severely_ill_conditioned() {
        // Trailing singular values sit at (or are returned as exactly) zero.
        let p = gen_shaw(160).unwrap();
        let mut sv: Vec<f64> = p.a.clone().svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!(sv[0] / sv[159] > 1e15);
    }

    #[test]
    fn baart_structure() {
        let p = gen_baart(150).unwrap();
        assert!(p.x_true.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(p.a.row(0).iter().all(|&v| v > 0.0));
        let svd = compute_svd(&p.a, 0.0).unwrap();
        assert!(svd.s[0] / svd.s[19] > 1e10);
    }

    #[test]
    fn baart_matches_analytic_rhs() {
        let n = 200;
        let p = gen_baart(n).unwrap();
        let g = baart_analytic_rhs(n);
        assert!((&p.y_exact - &g).norm() / g.norm() < 1e-3);
    }

    #[test]
    fn heat_is_causal_and_finite() {
        let p = gen_heat(150).unwrap();
        for i in 0..150 {
            for j in (i + 1)..150 {
                assert_eq!(p.a[(i, j)], 0.0);
            }
            assert!(p.a[(i, i)].is_finite());
        }
        let svd = compute_svd(&p.a, 0.0).unwrap();
        assert!(svd.s[0] / svd.s[svd.rank() - 1] > 1e10);
        assert!(heat_kernel(1e-6) == 0.0 || heat_kernel(1e-6) < 1e-100);
    }

    #[test]
    fn heat_profile_shape() {
        let x = heat_profile(100);
        assert!(x.iter().skip(50).all(|&v| v == 0.0));
        assert!(x.iter().all(|&v| v >= 0.0));
        let peak = x.iter().cloned().fold(0.0, f64::max);
        assert!(peak > 0.75 && peak <= 1.0);
    }

    #[test]
    fn diag_exponential_spectrum_after_scaling() {
        let src = SyntheticSource {
            kind: SourceKind::Holder(0.0),
            rho: 2.0,
            seed: 7,
        };
        let p = gen_diag_synthetic(50, Decay::Exponential(1.0), src).unwrap();
        for k in 0..50 {
            let l = p.a[(k, k)] * p.a[(k, k)];
            assert_relative_eq!(l.ln(), -1.0 - k as f64, epsilon = 1e-12);
        }
        // μ = 0 leaves the solution equal to w.
        assert_relative_eq!(p.x_true.norm(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn diag_log_source_norm_bound() {
        let src = SyntheticSource {
            kind: SourceKind::Logarithmic(1.0),
            rho: 1.0,
            seed: 3,
        };
        let p = gen_diag_synthetic(60, Decay::Exponential(1.0), src).unwrap();
        assert!(p.x_true.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn generators_are_deterministic() {
        let src = SyntheticSource {
            kind: SourceKind::Holder(0.5),
            rho: 1.0,
            seed: 11,
        };
        let a = gen_diag_synthetic(30, Decay::Polynomial(2.0), src).unwrap();
        let b = gen_diag_synthetic(30, Decay::Polynomial(2.0), src).unwrap();
        assert_eq!(a, b);
        assert_eq!(gen_heat(40).unwrap(), gen_heat(40).unwrap());
    }

    #[test]
    fn scaled_shaw_top_eigenvalue() {
        let p = build_scaled(ProblemKind::Shaw, 160, 0).unwrap();
        let svd = compute_svd(&p.a, 0.0).unwrap();
        assert_relative_eq!(svd.s[0] * svd.s[0], (-1.0_f64).exp(), max_relative = 1e-12);
        assert_eq!(p.x_true, gen_shaw(160).unwrap().x_true);
    }

    fn log_linear_r2(s: &[f64]) -> f64 {
        let n = s.len() as f64;
        let xs: Vec<f64> = (0..s.len()).map(|k| k as f64).collect();
        let ys: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        sxy * sxy / (sxx * syy)
    }

    #[test]
    fn decay_classes() {
        let heat = compute_svd(&gen_heat(100).unwrap().a, 0.0).unwrap();
        assert!(log_linear_r2(&heat.s[..30]) > 0.95);
        let src = SyntheticSource {
            kind: SourceKind::Holder(0.5),
            rho: 1.0,
            seed: 1,
        };
        let d = gen_diag_synthetic(40, Decay::Exponential(0.7), src).unwrap();
        let ds = compute_svd(&d.a, 0.0).unwrap();
        assert!(log_linear_r2(&ds.s[..30]) > 0.95);
        // Faster than polynomial: the log-log slope keeps steepening over the
        // top 20 values (segment slopes; shaw's values come in near-pairs).
        // Values at the rounding floor carry no decay information.
        for p in [gen_shaw(100).unwrap(), gen_baart(100).unwrap()] {
            let s = compute_svd(&p.a, 1e-13).unwrap().s;
            let k = s.len().min(20) - 1;
            let slope = |i: usize, j: usize| (s[j] / s[i]).ln() / ((j + 1) as f64 / (i + 1) as f64).ln();
            let (a, b, c) = (slope(0, k / 4), slope(k / 4, k / 2), slope(k / 2, k));
            assert!(c < b && b < a, "{} {a} {b} {c}", p.name);
        }
    }
}
