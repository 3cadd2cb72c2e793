//! Numerical laboratory for synchronization of SDEs driven by linear
//! multiplicative fractional Brownian motion with Hurst index in `(1/2, 1)`.
//!
//! The pipeline: sample fBm ([`noise`]), build the stationary fractional
//! Ornstein–Uhlenbeck coordinate ([`fou`]), move the SDE to a random ODE
//! ([`transform`]), integrate single, coupled and averaged systems ([`rde`]),
//! and run the synchronization experiments ([`sync`]).

pub mod drift;
pub mod ensemble;
pub mod error;
pub mod fou;
pub mod io;
pub mod linalg;
pub mod noise;
pub mod rde;
pub mod stats;
pub mod sync;
pub mod transform;
pub mod young;

pub use drift::{DriftCatalog, DriftSpec};
pub use ensemble::{run_trials, NoiseFactory, TrialNoise};
pub use error::{Error, Result};
pub use fou::{ergodic_average, fou_ivp, fou_stationary, fou_stationary_on, FouConfig, FouPath};
pub use noise::{
    fbm_covariance, sample_fbm, wiener_shift, FbmMethod, FbmSampler, HurstParameter, RngSeed,
    SamplePath, TimeGrid,
};
pub use rde::{
    integrate_averaged, integrate_coupled, integrate_rde, CoupledConfig, CoupledState,
    CoupledTrajectory, RdeScheme,
};
pub use transform::{
    equivalence_harness, forward_transform, inverse_transform, rde_vector_field, HarnessOptions,
    LinearNoiseCoeffs, NoiseChannel,
};
pub use young::{young_euler_sde, young_integral, Partition, YoungResult};
pub use sync::{SyncReport, Verdict};
