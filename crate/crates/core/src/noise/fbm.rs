//! Exact sampling of fractional Brownian motion on uniform grids.
//!
//! Grids anchored at the origin (`t0 = 0` or `t1 = 0`) are sampled through a
//! circulant embedding of the stationary increment sequence (Davies–Harte),
//! which is exact in law and costs `O(n log n)` per path. Grids that straddle
//! the origin are sampled from a dense Cholesky factor of the pinned
//! covariance while they are small; above [`CHOLESKY_MAX_POINTS`] the
//! circulant path is re-pinned at the origin instead, which is the same law
//! because fBm increments are stationary.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::PackedCholesky;
use crate::noise::grid::TimeGrid;
use crate::noise::path::SamplePath;

/// Largest two-sided grid (in points) factored densely by default.
pub const CHOLESKY_MAX_POINTS: usize = 1025;

/// Hurst index of a fractional Brownian motion, restricted to `(1/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstParameter(f64);

impl HurstParameter {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.5 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "Hurst parameter must lie in (1/2, 1), got {value}"
            )))
        }
    }

    /// `H = 1/2`, standard Brownian motion. Only used as a reference law for
    /// calibrating the samplers and the fOU construction.
    pub fn brownian() -> Self {
        Self(0.5)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Default Hölder exponent `(1/2 + H) / 2`, strictly inside `(1/2, H)`.
    pub fn default_holder(self) -> f64 {
        0.5 * (0.5 + self.0)
    }
}

impl TryFrom<f64> for HurstParameter {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HurstParameter> for f64 {
    fn from(h: HurstParameter) -> f64 {
        h.0
    }
}

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// Counter-based generator keyed by `(seed, stream_id)`.
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// `E[B_t B_s] = (|t|^{2H} + |s|^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(t: f64, s: f64, hurst: HurstParameter) -> f64 {
    let two_h = 2.0 * hurst.value();
    if two_h == 1.0 {
        // Brownian case without cancellation
        return if t * s > 0.0 { t.abs().min(s.abs()) } else { 0.0 };
    }
    0.5 * (t.abs().powf(two_h) + s.abs().powf(two_h) - (t - s).abs().powf(two_h))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(k: usize, two_h: f64) -> f64 {
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FbmMethod {
    Circulant,
    Cholesky,
}

#[derive(Clone)]
enum Engine {
    Circulant {
        /// `sqrt(lambda_k / M)` for the length-`M` embedding.
        scale: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
        step_scale: f64,
        pin: usize,
    },
    Cholesky {
        factor: PackedCholesky,
        /// Grid indices of the non-pinned points, in factor order.
        nodes: Vec<usize>,
    },
}

/// Precomputed sampler for one `(grid, H)` pair. Cheap to clone and safe to
/// share across threads.
#[derive(Clone)]
pub struct FbmSampler {
    grid: TimeGrid,
    hurst: HurstParameter,
    method: FbmMethod,
    engine: Engine,
}

impl std::fmt::Debug for FbmSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmSampler")
            .field("grid", &self.grid)
            .field("hurst", &self.hurst)
            .field("method", &self.method)
            .finish()
    }
}

impl FbmSampler {
    /// Picks circulant embedding for origin-anchored and large grids, dense
    /// Cholesky otherwise.
    pub fn new(grid: TimeGrid, hurst: HurstParameter) -> Result<Self> {
        let method = match grid.origin_index() {
            Some(i) if i == 0 || i == grid.n() => FbmMethod::Circulant,
            Some(_) if grid.len() > CHOLESKY_MAX_POINTS => FbmMethod::Circulant,
            Some(_) => FbmMethod::Cholesky,
            None if grid.t0() < 0.0 && grid.t1() > 0.0 => {
                return Err(Error::InvalidGrid(format!(
                    "grid [{}, {}] straddles 0 but 0 is not a grid point",
                    grid.t0(),
                    grid.t1()
                )))
            }
            None => FbmMethod::Cholesky,
        };
        match Self::with_method(grid, hurst, method) {
            Err(Error::NonPositiveDefinite { .. }) if method == FbmMethod::Circulant => {
                Self::with_method(grid, hurst, FbmMethod::Cholesky)
            }
            other => other,
        }
    }

    pub fn with_method(grid: TimeGrid, hurst: HurstParameter, method: FbmMethod) -> Result<Self> {
        let origin = grid.origin_index();
        if origin.is_none() && grid.t0() < 0.0 && grid.t1() > 0.0 {
            return Err(Error::InvalidGrid(format!(
                "grid [{}, {}] straddles 0 but 0 is not a grid point",
                grid.t0(),
                grid.t1()
            )));
        }
        let engine = match method {
            FbmMethod::Circulant => {
                let pin = origin.ok_or_else(|| {
                    Error::InvalidGrid("circulant embedding needs 0 on the grid".into())
                })?;
                circulant_engine(&grid, hurst, pin)?
            }
            FbmMethod::Cholesky => cholesky_engine(&grid, hurst, origin)?,
        };
        Ok(Self {
            grid,
            hurst,
            method,
            engine,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    pub fn method(&self) -> FbmMethod {
        self.method
    }

    pub fn sample(&self, seed: RngSeed) -> SamplePath {
        let mut rng = seed.rng();
        let mut values = vec![0.0; self.grid.len()];
        match &self.engine {
            Engine::Circulant {
                scale,
                fft,
                step_scale,
                pin,
            } => {
                let mut buf: Vec<Complex64> = scale
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                let mut acc = 0.0;
                for (v, w) in values[1..].iter_mut().zip(&buf) {
                    acc += step_scale * w.re;
                    *v = acc;
                }
                let anchor = values[*pin];
                for v in values.iter_mut() {
                    *v -= anchor;
                }
                values[*pin] = 0.0;
            }
            Engine::Cholesky { factor, nodes } => {
                let z: Vec<f64> = (0..factor.dim())
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                let mut x = vec![0.0; factor.dim()];
                factor.mul(&z, &mut x);
                for (&i, v) in nodes.iter().zip(x) {
                    values[i] = v;
                }
            }
        }
        SamplePath::scalar(self.grid, values).expect("sampler grid and values agree")
    }
}

fn circulant_engine(grid: &TimeGrid, hurst: HurstParameter, pin: usize) -> Result<Engine> {
    let m = grid.n();
    let size = 2 * m;
    let two_h = 2.0 * hurst.value();
    let mut row: Vec<Complex64> = (0..size)
        .map(|j| {
            let lag = if j <= m { j } else { size - j };
            Complex64::new(fgn_autocovariance(lag, two_h), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut row);
    let peak = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let mut scale = Vec::with_capacity(size);
    for (k, c) in row.iter().enumerate() {
        let lambda = c.re;
        if lambda < -1e-10 * peak {
            return Err(Error::NonPositiveDefinite { pivot: k, value: lambda });
        }
        scale.push((lambda.max(0.0) / size as f64).sqrt());
    }
    Ok(Engine::Circulant {
        scale,
        fft,
        step_scale: grid.step().powf(hurst.value()),
        pin,
    })
}

fn cholesky_engine(grid: &TimeGrid, hurst: HurstParameter, origin: Option<usize>) -> Result<Engine> {
    let nodes: Vec<usize> = (0..grid.len()).filter(|&i| Some(i) != origin).collect();
    let times: Vec<f64> = nodes.iter().map(|&i| grid.point(i)).collect();
    let factor = PackedCholesky::factor(nodes.len(), |i, j| fbm_covariance(times[i], times[j], hurst))?;
    Ok(Engine::Cholesky { factor, nodes })
}

/// One fBm path on `grid`, pinned to zero at `t = 0` when the grid contains it.
pub fn sample_fbm(grid: &TimeGrid, hurst: HurstParameter, seed: RngSeed) -> Result<SamplePath> {
    Ok(FbmSampler::new(*grid, hurst)?.sample(seed))
}
