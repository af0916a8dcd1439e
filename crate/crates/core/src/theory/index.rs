use crate::error::{Error, Result};
use crate::numeric::invert_increasing;

/// `M = (|ln a| / (1 + |ln a|))²`.
pub fn m_constant(a: f64) -> f64 {
    let l = a.ln().abs();
    (l / (1.0 + l)).powi(2)
}

/// The logarithmic index functions of order `p` on `(0, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexFunctions {
    pub p: f64,
    pub a: f64,
}

impl IndexFunctions {
    pub fn new(p: f64, a: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p must be positive, got {p}")));
        }
        if !(a > 0.0 && a <= (-1.0_f64).exp() * (1.0 + 1e-15)) {
            return Err(Error::Domain(format!("a must lie in (0, e^-1], got {a}")));
        }
        Ok(Self { p, a })
    }

    /// `f_p(λ) = (−ln λ)^{−p}`.
    pub fn f(&self, lambda: f64) -> f64 {
        (-lambda.ln()).powf(-self.p)
    }

    /// `φ_p(λ) = λ·exp(−λ^{−1/(2p)})`.
    pub fn phi(&self, lambda: f64) -> f64 {
        lambda * (-lambda.powf(-0.5 / self.p)).exp()
    }

    /// `φ_p⁻¹(s)` by bisection; `s` must be positive and at most `φ_p(a)`.
    pub fn phi_inverse(&self, s: f64) -> Result<f64> {
        let top = self.phi(self.a);
        if !(s > 0.0 && s <= top) {
            return Err(Error::OutOfRange { value: s, max: top });
        }
        // φ_p(λ) underflows long before λ does for small p; search from there.
        let mut lo = self.a;
        while self.phi(lo) > s {
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                return Err(Error::OutOfRange { value: s, max: top });
            }
        }
        Ok(invert_increasing(|l| self.phi(l), s, lo, self.a, 1e-14))
    }

    /// `Θ_p(λ) = √λ·(ln 1/λ)^{−p}`.
    pub fn theta(&self, lambda: f64) -> f64 {
        lambda.sqrt() * self.f(lambda)
    }

    /// `Ψ_{p,α}(λ) = |ln λ|^{2−p} / (λ + α|ln λ|²)`.
    pub fn psi(&self, alpha: f64, lambda: f64) -> f64 {
        let l = lambda.ln().abs();
        l.powf(2.0 - self.p) / (lambda + alpha * l * l)
    }

    /// `h(λ) = αp|ln λ|² − λ(2 − p + |ln λ|)`.
    pub fn h(&self, alpha: f64, lambda: f64) -> f64 {
        let l = lambda.ln().abs();
        alpha * self.p * l * l - lambda * (2.0 - self.p + l)
    }
}

/// `Θ(λ) = √λ·φ(λ)` for an arbitrary index function.
pub fn theta_general(phi: impl Fn(f64) -> f64, lambda: f64) -> f64 {
    lambda.sqrt() * phi(lambda)
}

/// `Θ_ε(λ) = λ^{−ε}·Θ(λ)`.
pub fn theta_eps(phi: impl Fn(f64) -> f64, eps: f64, lambda: f64) -> f64 {
    lambda.powf(-eps) * theta_general(phi, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::lambda_grid;

    const A: f64 = 0.36787944117144233;

    #[test]
    fn m_at_default_bound() {
        assert!((m_constant(A) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn monotone_and_finite_on_grid() {
        for p in [0.5, 1.0, 2.0, 4.0] {
            let f = IndexFunctions::new(p, A).unwrap();
            let grid = lambda_grid(A);
            for w in grid.windows(2) {
                assert!(f.f(w[0]) < f.f(w[1]));
                assert!(f.theta(w[0]) < f.theta(w[1]));
                assert!(f.f(w[0]).is_finite() && f.theta(w[0]).is_finite());
            }
            assert!(f.f(A) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn phi_midpoint_convex() {
        for p in [0.5, 1.0, 2.0] {
            let f = IndexFunctions::new(p, A).unwrap();
            let grid: Vec<f64> = lambda_grid(A).into_iter().step_by(8).collect();
            for &l1 in &grid {
                for &l2 in &grid {
                    let mid = f.phi(0.5 * (l1 + l2));
                    let avg = 0.5 * (f.phi(l1) + f.phi(l2));
                    assert!(mid <= avg * (1.0 + 1e-12) + 1e-300, "p={p} {l1} {l2}");
                }
            }
        }
    }

    fn inverse_ratio(p: f64, s: f64) -> f64 {
        let f = IndexFunctions::new(p, A).unwrap();
        f.phi_inverse(s).unwrap().sqrt() / f.f(s)
    }

    #[test]
    fn inverse_ratio_close_to_one_for_small_p() {
        let r8 = inverse_ratio(0.5, 1e-8);
        assert!((0.8..=1.25).contains(&r8), "{r8}");
        let r12 = inverse_ratio(0.5, 1e-12);
        assert!((r12 - 1.0).abs() < (r8 - 1.0).abs());
    }

    #[test]
    fn inverse_ratio_tightens_toward_one() {
        // The relative correction is (1 + 2p·ln L / L)^p with L = ln(1/s), so
        // larger p converges more slowly; what must hold is the trend.
        for p in [0.5, 1.0, 2.0] {
            let r = [1e-8, 1e-12, 1e-30, 1e-100].map(|s| inverse_ratio(p, s));
            for w in r.windows(2) {
                assert!((w[1] - 1.0).abs() < (w[0] - 1.0).abs(), "p={p} {r:?}");
            }
        }
    }

    #[test]
    fn h_and_psi_values() {
        let f = IndexFunctions::new(2.0, A).unwrap();
        let l: f64 = 1e-3;
        let ll = l.ln().abs();
        assert!((f.psi(1e-4, l) - 1.0 / (l + 1e-4 * ll * ll)).abs() < 1e-9);
        assert!((f.h(1e-4, l) - (2e-4 * ll * ll - l * ll)).abs() < 1e-15);
    }

    #[test]
    fn theta_eps_with_sqrt_is_power() {
        let v = theta_eps(f64::sqrt, 0.125, 1e-4);
        assert!((v - 1e-4_f64.powf(0.875)).abs() < 1e-15);
    }
}
