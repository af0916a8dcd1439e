use crate::error::{Error, Result};
use crate::numeric::invert_increasing;

/// ε used by the Θ_ε rule unless told otherwise.
pub const DEFAULT_EPS: f64 = 0.125;

/// Smallest λ the inversions search down to.
const LAMBDA_FLOOR: f64 = 1e-300;
const INVERT_TOL: f64 = 1e-13;

/// `Θ_p(λ) = √λ·(ln 1/λ)^{−p}`.
pub fn theta_p(lambda: f64, p: f64) -> f64 {
    lambda.sqrt() * (-lambda.ln()).powf(-p)
}

fn check_bound(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= (-1.0_f64).exp() * (1.0 + 1e-15)) {
        return Err(Error::Domain(format!("spectral bound must lie in (0, e^-1], got {a}")));
    }
    Ok(())
}

fn invert(f: impl Fn(f64) -> f64, delta: f64, a: f64) -> Result<f64> {
    let top = f(a);
    if !(delta > 0.0) || delta > top || delta < f(LAMBDA_FLOOR) {
        return Err(Error::OutOfRange { value: delta, max: top });
    }
    if delta == top {
        return Ok(a);
    }
    Ok(invert_increasing(f, delta, LAMBDA_FLOOR, a, INVERT_TOL))
}

/// `α = Θ_p⁻¹(δ)` on `(0, a]`.
pub fn apriori_theta_p(delta: f64, p: f64, a: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    check_bound(a)?;
    invert(|l| theta_p(l, p), delta, a)
}

/// `α = δ`, independent of smoothness.
pub fn apriori_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    Ok(delta)
}

/// `α = Θ_ε⁻¹(δ)` with `Θ_ε(λ) = λ^{1/2−ε} φ(λ)` for an increasing index function `φ`.
pub fn apriori_theta_eps(delta: f64, eps: f64, phi: impl Fn(f64) -> f64, a: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    check_bound(a)?;
    invert(|l| l.powf(0.5 - eps) * phi(l), delta, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const A: f64 = 0.36787944117144233;

    #[test]
    fn closed_form_points() {
        assert_relative_eq!(apriori_theta_p((-0.5_f64).exp(), 1.0, A).unwrap(), A, max_relative = 1e-12);
        let d = (-1.0_f64).exp() / 4.0;
        assert_relative_eq!(apriori_theta_p(d, 2.0, A).unwrap(), (-2.0_f64).exp(), max_relative = 1e-11);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(apriori_theta_p(0.7, 1.0, A), Err(Error::OutOfRange { .. })));
        assert!(apriori_theta_p(0.0, 1.0, A).is_err());
        assert!(apriori_delta(0.0).is_err());
        assert_eq!(apriori_delta(0.04).unwrap(), 0.04);
        assert_eq!(apriori_delta(1e-6).unwrap(), 1e-6);
    }

    #[test]
    fn theta_eps_round_trip() {
        let f1 = |l: f64| 1.0 / (-l.ln());
        let target = (-2.0_f64).exp();
        let d = target.powf(0.375) * f1(target);
        assert_relative_eq!(apriori_theta_eps(d, DEFAULT_EPS, f1, A).unwrap(), target, max_relative = 1e-11);
    }

    #[test]
    fn theta_eps_small_eps_approaches_identity() {
        // φ = √·: Θ_ε(λ) = λ^{1−ε} → λ.
        let a = apriori_theta_eps(1e-4, 1e-9, f64::sqrt, A).unwrap();
        assert_relative_eq!(a, 1e-4, max_relative = 1e-7);
    }

    proptest! {
        #[test]
        fn theta_p_round_trip(e in -12.0f64..-0.3, p in 0.25f64..3.0) {
            let delta = theta_p(A, p) * 10f64.powf(e);
            let alpha = apriori_theta_p(delta, p, A).unwrap();
            prop_assert!((theta_p(alpha, p) - delta).abs() <= 1e-10 * delta);
        }

        #[test]
        fn theta_p_inverse_monotone(e1 in -10.0f64..-0.5, gap in 0.01f64..3.0) {
            let d1 = 10f64.powf(e1 - gap);
            let d2 = 10f64.powf(e1);
            prop_assert!(apriori_theta_p(d1, 1.0, A).unwrap() < apriori_theta_p(d2, 1.0, A).unwrap());
        }
    }
}
