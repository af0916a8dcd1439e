//! Dense singular value decomposition, problem scaling and condition numbers
//! of reconstructed operators.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{self, Method};

/// Default relative cut below which singular values are dropped from the rank.
pub const DEFAULT_DROP_TOL: f64 = 1e-14;

/// A discretized linear problem `A x = y` with its known solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub a: DMatrix<f64>,
    pub x_true: DVector<f64>,
    pub y_exact: DVector<f64>,
    /// Factor already applied to both `a` and `y_exact`.
    pub scale: f64,
}

impl Problem {
    /// Validates shapes, finiteness and `‖A x − y‖ ≤ 1e-10 ‖y‖`.
    pub fn new(
        name: impl Into<String>,
        a: DMatrix<f64>,
        x_true: DVector<f64>,
        y_exact: DVector<f64>,
        scale: f64,
    ) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::Invalid("matrix must be at least 1x1".into()));
        }
        if x_true.len() != n {
            return Err(Error::DimensionMismatch {
                what: "x_true",
                expected: n,
                got: x_true.len(),
            });
        }
        if y_exact.len() != m {
            return Err(Error::DimensionMismatch {
                what: "y_exact",
                expected: m,
                got: y_exact.len(),
            });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {scale}")));
        }
        if a.iter().chain(x_true.iter()).chain(y_exact.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("problem data"));
        }
        let mismatch = (&a * &x_true - &y_exact).norm();
        if mismatch > 1e-10 * y_exact.norm() {
            return Err(Error::Invalid(format!(
                "inconsistent problem: |A x - y| = {mismatch:e} exceeds 1e-10 |y|"
            )));
        }
        Ok(Self {
            name: name.into(),
            a,
            x_true,
            y_exact,
            scale,
        })
    }

    /// Builds a problem whose data is `A x_true`, so consistency holds exactly.
    pub fn from_solution(name: impl Into<String>, a: DMatrix<f64>, x_true: DVector<f64>) -> Result<Self> {
        if x_true.len() != a.ncols() {
            return Err(Error::DimensionMismatch {
                what: "x_true",
                expected: a.ncols(),
                got: x_true.len(),
            });
        }
        let y = &a * &x_true;
        Self::new(name, a, x_true, y, 1.0)
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ProblemFile::from(self);
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
        file.serialize(&mut ser)?;
        Ok(String::from_utf8(out).expect("json is utf-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk layout of a [`Problem`].
#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    name: String,
    m: usize,
    n: usize,
    a_rowmajor: Vec<f64>,
    x_true: Vec<f64>,
    y_exact: Vec<f64>,
    scale: f64,
}

impl From<&Problem> for ProblemFile {
    fn from(p: &Problem) -> Self {
        let (m, n) = p.a.shape();
        let mut a_rowmajor = Vec::with_capacity(m * n);
        for i in 0..m {
            a_rowmajor.extend(p.a.row(i).iter().copied());
        }
        Self {
            name: p.name.clone(),
            m,
            n,
            a_rowmajor,
            x_true: p.x_true.iter().copied().collect(),
            y_exact: p.y_exact.iter().copied().collect(),
            scale: p.scale,
        }
    }
}

impl TryFrom<ProblemFile> for Problem {
    type Error = Error;

    fn try_from(f: ProblemFile) -> Result<Self> {
        if f.a_rowmajor.len() != f.m * f.n {
            return Err(Error::DimensionMismatch {
                what: "a_rowmajor",
                expected: f.m * f.n,
                got: f.a_rowmajor.len(),
            });
        }
        let a = DMatrix::from_row_slice(f.m, f.n, &f.a_rowmajor);
        Problem::new(
            f.name,
            a,
            DVector::from_vec(f.x_true),
            DVector::from_vec(f.y_exact),
            f.scale,
        )
    }
}

/// JSON formatter writing every double with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if !value.is_finite() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "non-finite double in problem file",
            ));
        }
        write!(writer, "{value:.16e}")
    }
}

/// Thin singular system `A ≈ U diag(s) Vᵀ` restricted to the effective rank.
#[derive(Debug, Clone)]
pub struct Svd {
    /// m × r, orthonormal columns.
    pub u: DMatrix<f64>,
    /// n × r, orthonormal columns.
    pub v: DMatrix<f64>,
    /// Descending, strictly positive.
    pub s: Vec<f64>,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    pub fn top(&self) -> f64 {
        self.s[0]
    }

    /// Eigenvalues of `AᵀA` on the retained spectrum, descending.
    pub fn lambdas(&self) -> Vec<f64> {
        self.s.iter().map(|s| s * s).collect()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (k, s) in self.s.iter().enumerate() {
            us.column_mut(k).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

/// Dense SVD; singular values below `drop_tol · s_1` are excluded from the rank.
///
/// Columns are sign-normalised so that the largest-magnitude entry of each
/// right singular vector is positive, which makes the output deterministic.
pub fn compute_svd(a: &DMatrix<f64>, drop_tol: f64) -> Result<Svd> {
    if !(drop_tol >= 0.0 && drop_tol.is_finite()) {
        return Err(Error::Domain(format!("drop_tol must be >= 0, got {drop_tol}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    if a.nrows() == 0 || a.ncols() == 0 || a.iter().all(|v| *v == 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let svd = a.clone().svd(true, true);
    let u_full = svd.u.expect("requested U");
    let vt_full = svd.v_t.expect("requested V^T");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));
    let top = sv[order[0]];
    if !(top > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| sv[i] > 0.0 && sv[i] >= drop_tol * top)
        .collect();

    let r = keep.len();
    let mut u = DMatrix::zeros(a.nrows(), r);
    let mut v = DMatrix::zeros(a.ncols(), r);
    let mut s = Vec::with_capacity(r);
    for (col, &i) in keep.iter().enumerate() {
        let mut vc = vt_full.row(i).transpose();
        let mut uc = u_full.column(i).into_owned();
        let pivot = vc.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            vc.neg_mut();
            uc.neg_mut();
        }
        u.set_column(col, &uc);
        v.set_column(col, &vc);
        s.push(sv[i]);
    }
    Ok(Svd { u, v, s })
}

/// Bound `a` with `‖AᵀA‖ ≤ a`; the default is `exp(-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstraint {
    a: f64,
}

impl SpectralConstraint {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a <= (-1.0_f64).exp() {
            Ok(Self { a })
        } else {
            Err(Error::Domain(format!("spectral bound must lie in (0, exp(-1)], got {a}")))
        }
    }

    pub fn bound(&self) -> f64 {
        self.a
    }
}

impl Default for SpectralConstraint {
    fn default() -> Self {
        Self { a: (-1.0_f64).exp() }
    }
}

/// Rescales `A` and `y` by `t = sqrt(a)/s_1` so that `s_1² = a` exactly.
/// The solution is left untouched.
pub fn scale_problem(p: &Problem, c: SpectralConstraint) -> Result<Problem> {
    let svd = compute_svd(&p.a, 0.0)?;
    let t = c.bound().sqrt() / svd.top();
    Ok(Problem {
        name: p.name.clone(),
        a: &p.a * t,
        x_true: p.x_true.clone(),
        y_exact: &p.y_exact * t,
        scale: p.scale * t,
    })
}

/// Condition number of the operator a filter method effectively inverts,
/// computed on the discrete spectrum `{s_k²}`.
///
/// For the methods with a strictly positive generator this is
/// `max w(λ_k) / min w(λ_k)` with `w = 1/g_α`; for tsvd it is `s_1²/s_q²`
/// where `q` counts the retained eigenvalues `λ ≥ α`.
pub fn reconstructed_condition(svd: &Svd, method: Method, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if svd.rank() == 0 {
        return Err(Error::EmptySpectrum);
    }
    let lambdas = svd.lambdas();
    match method {
        Method::Tsvd => {
            let q = lambdas.iter().filter(|&&l| l >= alpha).count();
            if q == 0 {
                return Err(Error::EmptyReconstruction {
                    alpha,
                    top: lambdas[0],
                });
            }
            Ok(lambdas[0] / lambdas[q - 1])
        }
        Method::Cg => Err(Error::Domain(
            "conjugate gradient has no generator function".into(),
        )),
        _ => {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0_f64;
            for &l in &lambdas {
                let w = 1.0 / filters::g_value(method, alpha, l)?;
                lo = lo.min(w);
                hi = hi.max(w);
            }
            Ok(hi / lo)
        }
    }
}
