//! Noise injection, the Monte-Carlo harness and conditioning/error curves.

mod curve;
mod harness;
mod noise;

pub use curve::{conditioning_error_curve, curve_dominance, median_curve, CurvePoint, Dominance};
pub use harness::{
    best_error_oracle, run_monte_carlo, run_monte_carlo_with, McCell, McConfig, McReport, McRow, RepRecord, Rule,
};
pub use noise::{add_noise, add_noise_exact, NoiseModel};
