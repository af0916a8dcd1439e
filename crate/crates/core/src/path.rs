//! Evaluation of a regularized solution family along a parameter sequence.
//!
//! A [`Path`] records, for each candidate parameter ordered from the most to
//! the least regularized, the quantities every parameter rule needs: the
//! solution norm, residual norms, the distance to the next candidate, the
//! trace of the residual filter and (when the true solution is known) the
//! relative error. Spectral methods are evaluated in singular coordinates,
//! cg from explicit CGLS iterates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::filters::{cgls_iterates, filter_pair, Method, Param};
use crate::numeric::geometric_desc;
use crate::spectral::{compute_svd, Problem, Svd, DEFAULT_DROP_TOL};

/// Upper bound on cg iterations regardless of problem size.
pub const CG_MAX_ITER: usize = 200;

/// A matrix together with its singular system; shared read-only.
#[derive(Debug, Clone)]
pub struct Operator {
    pub a: DMatrix<f64>,
    pub svd: Svd,
    lambdas: Vec<f64>,
}

impl Operator {
    pub fn new(a: DMatrix<f64>, drop_tol: f64) -> Result<Self> {
        let svd = compute_svd(&a, drop_tol)?;
        let lambdas = svd.lambdas();
        if lambdas[0] >= 1.0 {
            return Err(Error::Domain(format!(
                "largest eigenvalue {} of AᵀA must be < 1; scale the problem first",
                lambdas[0]
            )));
        }
        Ok(Self { a, svd, lambdas })
    }

    pub fn from_problem(p: &Problem) -> Result<Self> {
        Self::new(p.a.clone(), DEFAULT_DROP_TOL)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn rank(&self) -> usize {
        self.svd.rank()
    }

    /// Projects observed data onto the left singular vectors.
    pub fn data(&self, y: &DVector<f64>) -> Result<Data> {
        if y.len() != self.a.nrows() {
            return Err(Error::DimensionMismatch {
                what: "data",
                expected: self.a.nrows(),
                got: y.len(),
            });
        }
        let beta = self.svd.u.tr_mul(y);
        let perp = (y - &self.svd.u * &beta).norm();
        Ok(Data {
            y: y.clone(),
            beta: beta.iter().copied().collect(),
            perp_sq: perp * perp,
        })
    }

    /// Projects a reference solution onto the right singular vectors.
    pub fn target(&self, x: &DVector<f64>) -> Result<Target> {
        if x.len() != self.a.ncols() {
            return Err(Error::DimensionMismatch {
                what: "target",
                expected: self.a.ncols(),
                got: x.len(),
            });
        }
        let coeffs = self.svd.v.tr_mul(x);
        let perp = (x - &self.svd.v * &coeffs).norm();
        let norm = x.norm();
        if norm == 0.0 {
            return Err(Error::Invalid("reference solution is zero".into()));
        }
        Ok(Target {
            x: x.clone(),
            coeffs: coeffs.iter().copied().collect(),
            perp_sq: perp * perp,
            norm,
        })
    }

    /// Solution coefficients in the right singular basis for a filter method.
    pub fn filter_coeffs(&self, data: &Data, method: Method, alpha: f64) -> Vec<f64> {
        self.lambdas
            .iter()
            .zip(&self.svd.s)
            .zip(&data.beta)
            .map(|((&l, &s), &b)| filter_pair(method, alpha, l).0 * s * b)
            .collect()
    }

    pub fn solution_from_coeffs(&self, coeffs: &[f64]) -> DVector<f64> {
        &self.svd.v * DVector::from_column_slice(coeffs)
    }

    /// Residual norm `‖A x_α − y‖` of a filter method.
    pub fn filter_residual(&self, data: &Data, method: Method, alpha: f64) -> f64 {
        let inner: f64 = self
            .lambdas
            .iter()
            .zip(&data.beta)
            .map(|(&l, &b)| {
                let r = filter_pair(method, alpha, l).1;
                (r * b) * (r * b)
            })
            .sum();
        (inner + data.perp_sq).sqrt()
    }

    /// Relative error `‖x_true − x_α‖/‖x_true‖` of a filter method.
    pub fn filter_error(&self, data: &Data, target: &Target, method: Method, alpha: f64) -> f64 {
        let z = self.filter_coeffs(data, method, alpha);
        coeff_error(&z, target)
    }
}

fn coeff_error(z: &[f64], target: &Target) -> f64 {
    let sq: f64 = z.iter().zip(&target.coeffs).map(|(a, b)| (a - b) * (a - b)).sum();
    (sq + target.perp_sq).sqrt() / target.norm
}

/// Observed data in singular coordinates.
#[derive(Debug, Clone)]
pub struct Data {
    pub y: DVector<f64>,
    /// `Uᵀ y`.
    pub beta: Vec<f64>,
    /// `‖y − U Uᵀ y‖²`.
    pub perp_sq: f64,
}

/// Reference solution in singular coordinates.
#[derive(Debug, Clone)]
pub struct Target {
    pub x: DVector<f64>,
    /// `Vᵀ x`.
    pub coeffs: Vec<f64>,
    pub perp_sq: f64,
    pub norm: f64,
}

/// Geometric α grid, evaluated from `max` down to `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self {
            min: 1e-12,
            max: 1.0,
            count: 200,
        }
    }
}

impl AlphaGrid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && min < max && max.is_finite()) || count == 0 {
            return Err(Error::Invalid(format!(
                "bad grid: need 0 < min < max and count >= 1, got ({min}, {max}, {count})"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        geometric_desc(self.min, self.max, self.count)
    }
}

/// Quantities along a parameter sequence, most regularized first.
#[derive(Debug, Clone)]
pub struct Path {
    pub method: Method,
    pub params: Vec<Param>,
    /// α, or `1/k` for discrete parameters.
    pub alpha_equiv: Vec<f64>,
    pub x_norm: Vec<f64>,
    pub residual_norm: Vec<f64>,
    /// `‖Aᵀ(A x − y)‖`.
    pub normal_residual_norm: Vec<f64>,
    /// `‖x_{i+1} − x_i‖`, one shorter than the path.
    pub step_norm: Vec<f64>,
    /// `tr r_α(AᵀA)`; absent for cg.
    pub trace: Option<Vec<f64>>,
    pub rel_error: Option<Vec<f64>>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    fn with_capacity(method: Method, n: usize, with_trace: bool, with_error: bool) -> Self {
        Self {
            method,
            params: Vec::with_capacity(n),
            alpha_equiv: Vec::with_capacity(n),
            x_norm: Vec::with_capacity(n),
            residual_norm: Vec::with_capacity(n),
            normal_residual_norm: Vec::with_capacity(n),
            step_norm: Vec::with_capacity(n.saturating_sub(1)),
            trace: with_trace.then(|| Vec::with_capacity(n)),
            rel_error: with_error.then(|| Vec::with_capacity(n)),
        }
    }

    /// Spectral filter method over the given α values (kept in the given order).
    pub fn filter(op: &Operator, data: &Data, method: Method, alphas: &[f64], target: Option<&Target>) -> Self {
        debug_assert!(method.is_filter());
        let n = op.a.ncols();
        let r = op.rank();
        let mut path = Self::with_capacity(method, alphas.len(), true, target.is_some());
        let mut prev: Vec<f64> = Vec::new();
        let mut z = vec![0.0; r];
        for &alpha in alphas {
            let mut res_sq = data.perp_sq;
            let mut nres_sq = 0.0;
            let mut trace = (n - r) as f64;
            for k in 0..r {
                let (g, rv) = filter_pair(method, alpha, op.lambdas[k]);
                let s = op.svd.s[k];
                let b = data.beta[k];
                z[k] = g * s * b;
                res_sq += (rv * b) * (rv * b);
                nres_sq += (s * rv * b) * (s * rv * b);
                trace += rv;
            }
            path.push_common(Param::Alpha(alpha), alpha, &z, res_sq.sqrt(), nres_sq.sqrt(), &mut prev, target);
            if let Some(t) = path.trace.as_mut() {
                t.push(trace);
            }
        }
        path
    }

    /// Truncated SVD over every retained component, `k = 1..=r`.
    pub fn truncated(op: &Operator, data: &Data, target: Option<&Target>) -> Self {
        let n = op.a.ncols();
        let r = op.rank();
        let mut path = Self::with_capacity(Method::Tsvd, r, true, target.is_some());
        let mut z = vec![0.0; r];
        let mut prev: Vec<f64> = Vec::new();
        let mut tail_sq: f64 = data.beta.iter().map(|b| b * b).sum();
        let mut ntail_sq: f64 = data.beta.iter().zip(&op.svd.s).map(|(b, s)| (b * s).powi(2)).sum();
        for k in 0..r {
            let s = op.svd.s[k];
            let b = data.beta[k];
            z[k] = b / s;
            tail_sq = (tail_sq - b * b).max(0.0);
            ntail_sq = (ntail_sq - (b * s).powi(2)).max(0.0);
            path.push_common(
                Param::Alpha(op.lambdas[k]),
                1.0 / (k + 1) as f64,
                &z,
                (tail_sq + data.perp_sq).sqrt(),
                ntail_sq.sqrt(),
                &mut prev,
                target,
            );
            if let Some(t) = path.trace.as_mut() {
                t.push((n - (k + 1)) as f64);
            }
        }
        path
    }

    /// CGLS iterates `k = 1..=k_max` (shorter on breakdown).
    pub fn cgls(op: &Operator, data: &Data, k_max: usize, target: Option<&Target>) -> Result<Self> {
        let run = cgls_iterates(&op.a, &data.y, k_max)?;
        let mut path = Self::with_capacity(Method::Cg, run.iterates.len(), false, target.is_some());
        for (i, x) in run.iterates.iter().enumerate() {
            let res = &op.a * x - &data.y;
            path.params.push(Param::Iterations(i + 1));
            path.alpha_equiv.push(1.0 / (i + 1) as f64);
            path.x_norm.push(x.norm());
            path.residual_norm.push(res.norm());
            path.normal_residual_norm.push(op.a.tr_mul(&res).norm());
            if i > 0 {
                path.step_norm.push((x - &run.iterates[i - 1]).norm());
            }
            if let (Some(errs), Some(t)) = (path.rel_error.as_mut(), target) {
                errs.push((x - &t.x).norm() / t.norm);
            }
        }
        Ok(path)
    }

    /// Path for `method` on its natural candidate set: the α grid for
    /// continuous filters, the spectrum for tsvd, `1..=min(n, 200)` for cg.
    pub fn for_method(op: &Operator, data: &Data, method: Method, grid: &AlphaGrid, target: Option<&Target>) -> Result<Self> {
        Ok(match method {
            Method::Tsvd => Self::truncated(op, data, target),
            Method::Cg => Self::cgls(op, data, op.a.ncols().min(CG_MAX_ITER), target)?,
            _ => Self::filter(op, data, method, &grid.values(), target),
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn push_common(
        &mut self,
        param: Param,
        alpha_equiv: f64,
        z: &[f64],
        res: f64,
        nres: f64,
        prev: &mut Vec<f64>,
        target: Option<&Target>,
    ) {
        self.params.push(param);
        self.alpha_equiv.push(alpha_equiv);
        self.x_norm.push(z.iter().map(|v| v * v).sum::<f64>().sqrt());
        self.residual_norm.push(res);
        self.normal_residual_norm.push(nres);
        if !prev.is_empty() {
            let d: f64 = z.iter().zip(prev.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            self.step_norm.push(d.sqrt());
        }
        prev.clear();
        prev.extend_from_slice(z);
        if let (Some(errs), Some(t)) = (self.rel_error.as_mut(), target) {
            errs.push(coeff_error(z, t));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::filter_solve;
    use crate::problems::{build_scaled, ProblemKind};
    use crate::noise_mc::{add_noise, NoiseModel};

    fn setup() -> (Problem, Operator, Data, Target) {
        let p = build_scaled(ProblemKind::Heat, 60, 0).unwrap();
        let op = Operator::from_problem(&p).unwrap();
        let (y, _) = add_noise(&p.y_exact, NoiseModel { level: 0.02, seed: 5 }).unwrap();
        let data = op.data(&y).unwrap();
        let target = op.target(&p.x_true).unwrap();
        (p, op, data, target)
    }

    #[test]
    fn spectral_quantities_match_dense_evaluation() {
        let (p, op, data, target) = setup();
        let alphas = [1e-2, 1e-5, 1e-9];
        for method in [Method::Nrm, Method::Tik, Method::Sw] {
            let path = Path::filter(&op, &data, method, &alphas, Some(&target));
            for (i, &alpha) in alphas.iter().enumerate() {
                let x = filter_solve(&op.svd, &data.y, method, alpha).unwrap();
                let res = &p.a * &x - &data.y;
                let err = (&x - &p.x_true).norm() / p.x_true.norm();
                assert!((path.x_norm[i] - x.norm()).abs() <= 1e-10 * x.norm());
                assert!((path.residual_norm[i] - res.norm()).abs() <= 1e-8 * res.norm());
                assert!((path.rel_error.as_ref().unwrap()[i] - err).abs() <= 1e-10 * err);
                let nres = p.a.tr_mul(&res).norm();
                assert!((path.normal_residual_norm[i] - nres).abs() <= 1e-6 * nres + 1e-15);
            }
            let x0 = filter_solve(&op.svd, &data.y, method, alphas[0]).unwrap();
            let x1 = filter_solve(&op.svd, &data.y, method, alphas[1]).unwrap();
            assert!((path.step_norm[0] - (x1 - x0).norm()).abs() <= 1e-9 * path.step_norm[0]);
        }
    }

    #[test]
    fn truncated_trace_counts_cut_components() {
        let (_, op, data, target) = setup();
        let path = Path::truncated(&op, &data, Some(&target));
        let n = op.a.ncols();
        for (k, t) in path.trace.as_ref().unwrap().iter().enumerate() {
            assert_eq!(*t, (n - k - 1) as f64);
        }
        assert_eq!(path.len(), op.rank());
    }

    #[test]
    fn truncated_matches_threshold_filter() {
        let (_, op, data, target) = setup();
        let path = Path::truncated(&op, &data, Some(&target));
        let k = 7;
        let alpha = op.lambdas()[k];
        let err = op.filter_error(&data, &target, Method::Tsvd, alpha);
        assert!((path.rel_error.as_ref().unwrap()[k] - err).abs() < 1e-12);
        let res = op.filter_residual(&data, Method::Tsvd, alpha);
        assert!((path.residual_norm[k] - res).abs() < 1e-10 * res);
    }

    #[test]
    fn cg_path_residuals_decrease() {
        let (_, op, data, target) = setup();
        let path = Path::cgls(&op, &data, 10, Some(&target)).unwrap();
        assert_eq!(path.len(), 10);
        assert!(path.trace.is_none());
        for w in path.residual_norm.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-10));
        }
    }
}
