use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Relative white-noise model: `E‖ξ‖² = level² ‖y‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub level: f64,
    pub seed: u64,
}

fn gaussian(m: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(m, |_, _| -> f64 { StandardNormal.sample(&mut rng) })
}

/// Adds i.i.d. Gaussian noise with per-component deviation `level·‖y‖/√m`.
/// Returns the noisy data and the realized noise norm `δ = ‖ξ‖`.
pub fn add_noise(y: &DVector<f64>, model: NoiseModel) -> Result<(DVector<f64>, f64)> {
    if !(model.level >= 0.0 && model.level.is_finite()) {
        return Err(Error::Domain(format!("noise level must be >= 0, got {}", model.level)));
    }
    if model.level == 0.0 {
        return Ok((y.clone(), 0.0));
    }
    let norm = y.norm();
    if norm == 0.0 {
        return Err(Error::Invalid("cannot add relative noise to zero data".into()));
    }
    let sd = model.level * norm / (y.len() as f64).sqrt();
    let xi = gaussian(y.len(), model.seed) * sd;
    let delta = xi.norm();
    Ok((y + xi, delta))
}

/// Adds a Gaussian direction rescaled to norm exactly `delta`.
pub fn add_noise_exact(y: &DVector<f64>, delta: f64, seed: u64) -> Result<DVector<f64>> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("noise norm must be >= 0, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(y.clone());
    }
    let xi = gaussian(y.len(), seed);
    Ok(y + xi.normalize() * delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_level_is_identity() {
        let y = DVector::from_element(5, 2.0);
        let (yn, d) = add_noise(&y, NoiseModel { level: 0.0, seed: 1 }).unwrap();
        assert_eq!(yn, y);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn realized_level_concentrates() {
        let y = DVector::from_fn(10_000, |i, _| (i as f64 * 0.01).sin() + 1.5);
        for seed in 0..20 {
            let (_, d) = add_noise(&y, NoiseModel { level: 0.04, seed }).unwrap();
            let rel = d / y.norm();
            assert!((0.038..=0.042).contains(&rel), "{rel}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let y = DVector::from_element(50, 1.0);
        let m = NoiseModel { level: 0.02, seed: 9 };
        assert_eq!(add_noise(&y, m).unwrap(), add_noise(&y, m).unwrap());
        assert_ne!(add_noise(&y, m).unwrap().0, add_noise(&y, NoiseModel { seed: 10, ..m }).unwrap().0);
    }

    #[test]
    fn zero_data_rejected() {
        assert!(add_noise(&DVector::zeros(3), NoiseModel { level: 0.1, seed: 0 }).is_err());
    }

    #[test]
    fn exact_norm() {
        let y = DVector::from_element(30, 1.0);
        let yn = add_noise_exact(&y, 1e-3, 4).unwrap();
        assert!(((yn - &y).norm() - 1e-3).abs() < 1e-15);
    }
}
