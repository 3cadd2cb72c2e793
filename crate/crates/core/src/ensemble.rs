//! Per-trial noise generation and ordered parallel ensembles.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fou::{fou_stationary_on, tail_steps, FouConfig};
use crate::noise::{FbmSampler, HurstParameter, RngSeed, SamplePath, TimeGrid};

/// Runs `trial(k)` for `k in 0..n` in parallel; results come back in trial
/// order regardless of scheduling, and the first error (by index) wins.
pub fn run_trials<T, F>(n: usize, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(trial).collect()
}

/// The two driving noises of one trial and their stationary fOU paths.
#[derive(Debug, Clone)]
pub struct TrialNoise {
    pub noise1: SamplePath,
    pub noise2: SamplePath,
    pub fou1: SamplePath,
    pub fou2: SamplePath,
}

/// Builds fBm/fOU pairs on a fixed window. The fBm lives on the window
/// extended backwards by the fOU tail; trial `k` uses streams `2k` and
/// `2k + 1` of the base seed.
#[derive(Debug)]
pub struct NoiseFactory {
    window: TimeGrid,
    noise_grid: TimeGrid,
    sampler1: FbmSampler,
    sampler2: Option<FbmSampler>,
    fou: FouConfig,
    seed: u64,
}

impl NoiseFactory {
    pub fn new(window: TimeGrid, h1: HurstParameter, h2: HurstParameter, fou: FouConfig, seed: u64) -> Result<Self> {
        fou.validate()?;
        let h = window.step();
        let tail = tail_steps(h, fou.tail_length);
        let noise_grid = TimeGrid::new(window.t0() - tail as f64 * h, window.t1(), window.n() + tail)?;
        if noise_grid.t0() < 0.0 && noise_grid.t1() > 0.0 && noise_grid.origin_index().is_none() {
            return Err(Error::InvalidGrid(format!(
                "noise grid [{}, {}] must contain 0 as a grid point",
                noise_grid.t0(),
                noise_grid.t1()
            )));
        }
        let sampler1 = FbmSampler::new(noise_grid, h1)?;
        let sampler2 = if h2 == h1 { None } else { Some(FbmSampler::new(noise_grid, h2)?) };
        Ok(Self {
            window,
            noise_grid,
            sampler1,
            sampler2,
            fou,
            seed,
        })
    }

    pub fn window(&self) -> &TimeGrid {
        &self.window
    }

    pub fn noise_grid(&self) -> &TimeGrid {
        &self.noise_grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise(&self, trial: u64, channel: u64) -> SamplePath {
        let sampler = match (channel, &self.sampler2) {
            (1, Some(s)) => s,
            _ => &self.sampler1,
        };
        sampler.sample(RngSeed::new(self.seed, 2 * trial + channel))
    }

    pub fn trial(&self, trial: u64) -> Result<TrialNoise> {
        let noise1 = self.noise(trial, 0);
        let noise2 = self.noise(trial, 1);
        let fou1 = fou_stationary_on(&noise1, &self.window, &self.fou)?.path;
        let fou2 = fou_stationary_on(&noise2, &self.window, &self.fou)?.path;
        Ok(TrialNoise {
            noise1,
            noise2,
            fou1,
            fou2,
        })
    }
}
