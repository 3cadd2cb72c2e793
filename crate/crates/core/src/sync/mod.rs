//! Synchronization experiments on sampled noise: contraction and pullback
//! behaviour of a single system, the coupled pair as `κ` grows, and the two
//! special noise configurations.

mod cases;
mod coupled;
mod single;

use serde::Serialize;

pub use cases::{case_mixed_noise, case_pure_multiplicative, run_sync_suite, SyncSuite};
pub use coupled::{
    averaged_limit_sweep, contraction_matrix_integral, coupled_contraction_eigs, fundamental_solution, sync_gap_sweep, ContractionMatrixSample,
};
pub use single::{
    absorbing_radius, contraction_test, default_cloud, pullback_attractor_estimate, AbsorbingRadius, PullbackReport,
};

/// Diagnostics of one experiment run; fields not produced by an experiment
/// stay empty.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SyncReport {
    pub experiment: String,
    pub kappa: Option<f64>,
    /// `(t, ‖U - V‖²)` or `(t, ‖U₁ - U₂‖²)`.
    pub gap_trajectory: Vec<(f64, f64)>,
    /// Fitted slope of `log` of the gap.
    pub fitted_rate: Option<f64>,
    /// Rate the theory allows for this realization.
    pub rate_bound: Option<f64>,
    /// `(t, λ_max(∫₀ᵗ A_κ))`.
    pub eigen_trajectory: Vec<(f64, f64)>,
    /// `λ_max(∫₀ᵀ A_κ)` at the final time.
    pub eigenvalue_bound: Option<f64>,
    /// First time from which `λ_max ≤ -L t` holds to the end of the window.
    pub onset: Option<f64>,
    /// Largest relative excess of the realized gap vector over the
    /// matrix-exponential comparison bound (`<= 0` means below the bound).
    pub comparison_excess: Option<f64>,
    /// Same against the fundamental solution of the linear comparison
    /// system, integrated numerically.
    pub fundamental_excess: Option<f64>,
    /// Time average of the gap over the second half of the window.
    pub steady_gap: Option<f64>,
    /// `sup ‖W̄_κ - W̄‖` over the comparison window.
    pub reference_distance: Option<f64>,
}

/// Machine-readable outcome of an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub experiment: String,
    pub params: serde_json::Value,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Trapezoid mean of `ys` on a uniform grid.
pub(crate) fn trapezoid_mean(ys: &[f64]) -> f64 {
    match ys.len() {
        0 => f64::NAN,
        1 => ys[0],
        n => {
            let inner: f64 = ys[1..n - 1].iter().sum();
            (inner + 0.5 * (ys[0] + ys[n - 1])) / (n - 1) as f64
        }
    }
}

/// Strictly decreasing sequence.
pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Nonincreasing sequence.
pub fn nonincreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}
