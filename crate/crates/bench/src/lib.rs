//! Shared fixtures for the criterion benches.

use fracsync_core::*;

pub const H1: f64 = 0.75;
pub const H2: f64 = 0.6;

pub fn hurst(h: f64) -> HurstParameter {
    HurstParameter::new(h).expect("fixture Hurst index is in range")
}

/// The coupled affine pair used by the synchronization experiments.
pub fn affine_pair(kappa: f64) -> CoupledConfig {
    CoupledConfig::new(
        LinearNoiseCoeffs::new(1.0, vec![0.5]).unwrap(),
        LinearNoiseCoeffs::new(0.5, vec![-0.5]).unwrap(),
        DriftSpec::affine(1.0, vec![1.0]).unwrap(),
        DriftSpec::affine(1.0, vec![-1.0]).unwrap(),
        hurst(H1),
        hurst(H2),
        kappa,
    )
    .unwrap()
}

/// Window `[0, t1]` with step `2^-8` and one realization of both fOU paths.
pub fn coupled_noise(t1: f64, seed: u64) -> (TimeGrid, TrialNoise) {
    let window = TimeGrid::new(0.0, t1, (t1 * 256.0) as usize).unwrap();
    let f = NoiseFactory::new(window, hurst(H1), hurst(H2), FouConfig::default(), seed).unwrap();
    (window, f.trial(0).unwrap())
}

pub fn initial_pair() -> (CoupledState, CoupledState) {
    (CoupledState::new(vec![1.0], vec![-1.0]), CoupledState::new(vec![2.0], vec![-2.0]))
}
