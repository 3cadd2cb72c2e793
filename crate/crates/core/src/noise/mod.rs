//! Noise paths: grids, sampled fBm, the Wiener shift and regularity checks.

pub mod fbm;
pub mod grid;
pub mod path;
pub mod regularity;
pub mod shift;

pub use fbm::{fbm_covariance, sample_fbm, FbmMethod, FbmSampler, HurstParameter, RngSeed};
pub use grid::TimeGrid;
pub use path::SamplePath;
pub use regularity::{
    estimate_holder_exponent, holder_norm, holder_seminorm, polynomial_growth_check, GrowthBound,
    HolderEstimate,
};
pub use shift::wiener_shift;
