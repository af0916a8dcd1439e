//! Generator and residual functions of the spectral filter methods, the
//! SVD-based regularized solve, CGLS and the forward-Euler Showalter route.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::Svd;

/// Regularization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Exponent-penalty method, `g_α(λ) = 1/(λ + (1 − λ^√α)²)`.
    Nrm,
    /// Tikhonov.
    Tik,
    /// Spectral cut-off on `λ = σ²` at threshold `α`.
    Tsvd,
    /// Showalter (asymptotic regularization).
    Sw,
    /// Conjugate gradient on the normal equations.
    Cg,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Nrm, Method::Tik, Method::Tsvd, Method::Sw, Method::Cg];

    pub fn name(self) -> &'static str {
        match self {
            Method::Nrm => "nrm",
            Method::Tik => "tik",
            Method::Tsvd => "tsvd",
            Method::Sw => "sw",
            Method::Cg => "cg",
        }
    }

    /// Whether the method is a linear spectral filter `x = g_α(AᵀA)Aᵀy`.
    pub fn is_filter(self) -> bool {
        !matches!(self, Method::Cg)
    }

    /// Continuous positive α (everything except cg, whose parameter is an
    /// iteration count).
    pub fn has_continuous_param(self) -> bool {
        self.is_filter()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method {s:?}")))
    }
}

/// A regularization parameter: continuous α, or an iteration count for cg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Alpha(f64),
    Iterations(usize),
}

impl Param {
    /// Numeric value as reported (α, or k).
    pub fn value(self) -> f64 {
        match self {
            Param::Alpha(a) => a,
            Param::Iterations(k) => k as f64,
        }
    }

    /// α itself, or `1/k` for iteration counts.
    pub fn as_alpha(self) -> f64 {
        match self {
            Param::Alpha(a) => a,
            Param::Iterations(k) => 1.0 / k as f64,
        }
    }
}

/// `1 − λ^√α`, evaluated through `expm1` so tiny exponents keep full precision.
#[inline]
pub(crate) fn one_minus_pow_sqrt(alpha: f64, lambda: f64) -> f64 {
    -(alpha.sqrt() * lambda.ln()).exp_m1()
}

/// Generator and residual values without domain checks.
#[inline]
pub(crate) fn filter_pair(kind: Method, alpha: f64, lambda: f64) -> (f64, f64) {
    match kind {
        Method::Nrm => {
            let e = one_minus_pow_sqrt(alpha, lambda);
            let pen = e * e;
            let den = lambda + pen;
            (1.0 / den, pen / den)
        }
        Method::Tik => (1.0 / (lambda + alpha), alpha / (lambda + alpha)),
        Method::Tsvd => {
            if lambda >= alpha {
                (1.0 / lambda, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
        Method::Sw => {
            let t = lambda / alpha;
            (-(-t).exp_m1() / lambda, (-t).exp())
        }
        Method::Cg => (f64::NAN, f64::NAN),
    }
}

fn check_args(kind: Method, alpha: f64, lambda: f64) -> Result<()> {
    if !kind.is_filter() {
        return Err(Error::Domain("cg has no generator function".into()));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// Generator function `g_α(λ)`.
pub fn g_value(kind: Method, alpha: f64, lambda: f64) -> Result<f64> {
    check_args(kind, alpha, lambda)?;
    Ok(filter_pair(kind, alpha, lambda).0)
}

/// Residual function `r_α(λ) = 1 − λ g_α(λ)`, in closed form per method.
pub fn r_value(kind: Method, alpha: f64, lambda: f64) -> Result<f64> {
    check_args(kind, alpha, lambda)?;
    Ok(filter_pair(kind, alpha, lambda).1)
}

/// One evaluated point of a filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterPoint {
    pub lambda: f64,
    pub alpha: f64,
    pub g: f64,
    pub r: f64,
}

impl FilterPoint {
    pub fn new(kind: Method, alpha: f64, lambda: f64) -> Result<Self> {
        check_args(kind, alpha, lambda)?;
        let (g, r) = filter_pair(kind, alpha, lambda);
        Ok(Self { lambda, alpha, g, r })
    }
}

/// `x = Σ_k g_α(s_k²) s_k ⟨u_k, y⟩ v_k`.
pub fn filter_solve(svd: &Svd, y_obs: &DVector<f64>, kind: Method, alpha: f64) -> Result<DVector<f64>> {
    if y_obs.len() != svd.rows() {
        return Err(Error::DimensionMismatch {
            what: "y_obs",
            expected: svd.rows(),
            got: y_obs.len(),
        });
    }
    if svd.rank() == 0 {
        return Err(Error::EmptySpectrum);
    }
    check_args(kind, alpha, svd.top() * svd.top())?;
    let beta = svd.u.tr_mul(y_obs);
    let coeffs = DVector::from_iterator(
        svd.rank(),
        svd.s.iter().zip(beta.iter()).map(|(&s, &b)| filter_pair(kind, alpha, s * s).0 * s * b),
    );
    Ok(&svd.v * coeffs)
}

/// Output of [`cgls_iterates`].
#[derive(Debug, Clone)]
pub struct CglsRun {
    /// `x_1, …, x_k`; shorter than requested on breakdown.
    pub iterates: Vec<DVector<f64>>,
    pub breakdown: bool,
}

/// CGLS iterates started at zero: `x_k` minimizes `‖A x − y‖` over the k-th
/// Krylov space of `AᵀA` generated by `Aᵀy`.
pub fn cgls_iterates(a: &DMatrix<f64>, y_obs: &DVector<f64>, k_max: usize) -> Result<CglsRun> {
    if k_max == 0 {
        return Err(Error::Domain("k_max must be >= 1".into()));
    }
    if y_obs.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            what: "y_obs",
            expected: a.nrows(),
            got: y_obs.len(),
        });
    }
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut r = y_obs.clone();
    let mut s = a.tr_mul(&r);
    let mut p = s.clone();
    let mut gamma = s.norm_squared();
    let mut iterates = Vec::with_capacity(k_max);

    if gamma == 0.0 {
        // Aᵀy = 0: the zero vector already solves the normal equations.
        iterates.resize(k_max, x);
        return Ok(CglsRun {
            iterates,
            breakdown: false,
        });
    }

    for _ in 0..k_max {
        let q = a * &p;
        let qq = q.norm_squared();
        if !(qq > 0.0 && qq.is_finite() && gamma > 0.0) {
            return Ok(CglsRun {
                iterates,
                breakdown: true,
            });
        }
        let step = gamma / qq;
        x.axpy(step, &p, 1.0);
        r.axpy(-step, &q, 1.0);
        s = a.tr_mul(&r);
        let gamma_next = s.norm_squared();
        if !x.iter().all(|v| v.is_finite()) {
            return Ok(CglsRun {
                iterates,
                breakdown: true,
            });
        }
        iterates.push(x.clone());
        let beta = gamma_next / gamma;
        p = &s + &p * beta;
        gamma = gamma_next;
    }
    Ok(CglsRun {
        iterates,
        breakdown: false,
    })
}

/// Forward-Euler integration of `u' = Aᵀy − AᵀA u`, `u(0) = 0`, up to
/// `t = 1/α`; the last step is shortened to land on `1/α` exactly.
pub fn showalter_ode_solve(a: &DMatrix<f64>, y_obs: &DVector<f64>, alpha: f64, h: f64) -> Result<DVector<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if y_obs.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            what: "y_obs",
            expected: a.nrows(),
            got: y_obs.len(),
        });
    }
    let top = a.singular_values().iter().copied().fold(0.0_f64, f64::max);
    let limit = if top > 0.0 { 2.0 / (top * top) } else { f64::INFINITY };
    if h >= limit {
        return Err(Error::UnstableStep { h, limit });
    }

    let rhs = a.tr_mul(y_obs);
    let ata = a.tr_mul(a);
    let horizon = 1.0 / alpha;
    let mut u = DVector::zeros(a.ncols());
    let mut t = 0.0;
    while horizon - t > h * 1e-9 {
        let dt = h.min(horizon - t);
        let drift = &rhs - &ata * &u;
        u.axpy(dt, &drift, 1.0);
        t += dt;
    }
    Ok(u)
}
