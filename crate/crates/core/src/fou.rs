//! Fractional Ornstein–Uhlenbeck paths driven by sampled fBm.
//!
//! The stationary process is never built as a stochastic integral. With the
//! driver interpolated linearly between grid points, `dO = -ν O dt + dB` has
//! the exact one-step solution
//!
//! ```text
//! O_{k+1} = e^{-νh} O_k + (1 - e^{-νh}) / (νh) · (B_{k+1} - B_k),
//! ```
//!
//! which is the integration-by-parts form `O_t = B_t - ν ∫ e^{-ν(t-s)} B_s ds`
//! integrated exactly against the piecewise-linear path. Starting from `0` a
//! distance `tail_length` before the window leaves a relative bias of
//! `e^{-ν tail_length}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{SamplePath, TimeGrid};
use crate::stats;

pub const DEFAULT_TAIL_LENGTH: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FouConfig {
    pub nu: f64,
    pub tail_length: f64,
}

impl Default for FouConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            tail_length: DEFAULT_TAIL_LENGTH,
        }
    }
}

impl FouConfig {
    pub fn new(nu: f64, tail_length: f64) -> Result<Self> {
        let cfg = Self { nu, tail_length };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.tail_length > 0.0 && self.tail_length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail_length must be positive, got {}",
                self.tail_length
            )));
        }
        Ok(())
    }

    /// Relative bias from starting the recursion `tail_length` early.
    pub fn truncation_bound(&self) -> f64 {
        (-self.nu * self.tail_length).exp()
    }
}

/// An fOU path with its quadrature metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FouPath {
    pub path: SamplePath,
    pub quadrature_step: f64,
    pub truncation_bound: f64,
}

impl FouPath {
    pub fn into_path(self) -> SamplePath {
        self.path
    }
}

/// Number of noise steps needed before a window for the given tail.
pub fn tail_steps(h: f64, tail_length: f64) -> usize {
    // tolerate tails that are a multiple of h up to rounding
    (tail_length / h - 1e-9).ceil().max(0.0) as usize
}

fn propagate(noise: &SamplePath, from: usize, to: usize, x0: f64, nu: f64) -> Vec<f64> {
    let h = noise.grid().step();
    let decay = (-nu * h).exp();
    let gain = -(-nu * h).exp_m1() / (nu * h);
    let mut out = Vec::with_capacity(to - from + 1);
    let mut o = x0;
    out.push(o);
    for k in from..to {
        o = decay * o + gain * (noise.value(k + 1) - noise.value(k));
        out.push(o);
    }
    out
}

fn check_scalar(noise: &SamplePath) -> Result<()> {
    if noise.dim() != 1 {
        return Err(Error::InvalidParameter(format!(
            "fOU needs a scalar driver, got dimension {}",
            noise.dim()
        )));
    }
    Ok(())
}

/// Stationary fOU on `window`, which must sit on the noise lattice at least
/// `tail_length` after the start of the noise.
pub fn fou_stationary_on(noise: &SamplePath, window: &TimeGrid, cfg: &FouConfig) -> Result<FouPath> {
    cfg.validate()?;
    check_scalar(noise)?;
    let g = noise.grid();
    let lo = g.locate(window)?;
    let tail = tail_steps(g.step(), cfg.tail_length);
    if lo < tail {
        return Err(Error::InsufficientSupport {
            required: window.t0() - cfg.tail_length,
            available: g.t0(),
        });
    }
    let start = lo - tail;
    let hi = lo + window.n();
    let all = propagate(noise, start, hi, 0.0, cfg.nu);
    let path = SamplePath::scalar(*window, all[tail..].to_vec())?;
    Ok(FouPath {
        path,
        quadrature_step: g.step(),
        truncation_bound: (-cfg.nu * tail as f64 * g.step()).exp(),
    })
}

/// Stationary fOU on the largest window of the noise grid that leaves a full
/// tail in front of it.
pub fn fou_stationary(noise: &SamplePath, cfg: &FouConfig) -> Result<FouPath> {
    cfg.validate()?;
    let g = noise.grid();
    let tail = tail_steps(g.step(), cfg.tail_length);
    if tail >= g.n() {
        return Err(Error::InsufficientSupport {
            required: g.t1() - cfg.tail_length,
            available: g.t0(),
        });
    }
    let window = g.slice(tail, g.n())?;
    fou_stationary_on(noise, &window, cfg)
}

/// Initial-value fOU `O_{t_start} = x0`, on `[t_start, noise.t1]`.
pub fn fou_ivp(noise: &SamplePath, x0: f64, t_start: f64, cfg: &FouConfig) -> Result<FouPath> {
    cfg.validate()?;
    check_scalar(noise)?;
    let g = noise.grid();
    if t_start < g.t0() - crate::noise::grid::LATTICE_TOL * g.step() {
        return Err(Error::InsufficientSupport {
            required: t_start,
            available: g.t0(),
        });
    }
    let start = g.index_of(t_start).ok_or_else(|| {
        Error::GridMismatch(format!("start time {t_start} is not a grid point"))
    })?;
    if start == g.n() {
        return Err(Error::InvalidGrid("start time is the last grid point".into()));
    }
    let values = propagate(noise, start, g.n(), x0, cfg.nu);
    Ok(FouPath {
        path: SamplePath::scalar(g.slice(start, g.n())?, values)?,
        quadrature_step: g.step(),
        truncation_bound: 0.0,
    })
}

/// `(1/T) ∫_0^T O_s ds` by the trapezoid rule.
pub fn ergodic_average(fou: &SamplePath, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("averaging horizon must be positive, got {t}")));
    }
    let g = fou.grid();
    let i0 = g.index_of(0.0).ok_or_else(|| Error::InsufficientSupport {
        required: 0.0,
        available: g.t0(),
    })?;
    let i1 = g.index_of(t).ok_or_else(|| {
        Error::GridMismatch(format!("horizon {t} is not a grid point of [{}, {}]", g.t0(), g.t1()))
    })?;
    let h = g.step();
    let mut s = 0.5 * (fou.value(i0) + fou.value(i1));
    for i in i0 + 1..i1 {
        s += fou.value(i);
    }
    Ok(s * h / t)
}

#[derive(Debug, Clone, Serialize)]
pub struct SublinearGrowthReport {
    pub delta: f64,
    /// Dyadic times `2^k` (absolute value).
    pub times: Vec<f64>,
    /// `max(|O_t|, |O_{-t}|) / t^δ` at each dyadic time.
    pub values: Vec<f64>,
    /// Least-squares slope of `values` against `log2 t`.
    pub trend: f64,
    /// Set when the trend is increasing, i.e. the average is not settling.
    pub violation: bool,
    /// Empirical `sup |O_t| / (1 + |t|)^2` on the grid.
    pub k_empirical: f64,
}

pub fn sublinear_growth_check(fou: &SamplePath, delta: f64) -> Result<SublinearGrowthReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let g = fou.grid();
    let reach = g.t0().abs().max(g.t1().abs());
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut t = 1.0;
    while t <= reach * (1.0 + 1e-12) {
        let mut v: Option<f64> = None;
        for s in [t, -t] {
            if let Some(i) = g.index_of(s) {
                v = Some(v.unwrap_or(0.0).max(fou.value(i).abs()));
            }
        }
        if let Some(v) = v {
            times.push(t);
            values.push(v / t.powf(delta));
        }
        t *= 2.0;
    }
    let trend = if times.len() >= 2 {
        let xs: Vec<f64> = times.iter().map(|t| t.log2()).collect();
        stats::linear_fit(&xs, &values).slope
    } else {
        0.0
    };
    let k_empirical = (0..fou.len())
        .map(|i| {
            let t = fou.time(i);
            fou.value(i).abs() / (1.0 + t.abs()).powi(2)
        })
        .fold(0.0, f64::max);
    Ok(SublinearGrowthReport {
        delta,
        times,
        values,
        trend,
        violation: trend > 0.0,
        k_empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t0: f64, t1: f64, n: usize) -> TimeGrid {
        TimeGrid::new(t0, t1, n).unwrap()
    }

    #[test]
    fn zero_noise_gives_zero() {
        let noise = SamplePath::zeros(grid(-30.0, 10.0, 400), 1);
        let o = fou_stationary(&noise, &FouConfig::default()).unwrap();
        assert!(o.path.values().iter().all(|&v| v == 0.0));
        assert!((o.path.grid().t0() + 10.0).abs() < 1e-12);
        assert!(o.truncation_bound < 3e-9);
    }

    #[test]
    fn ramp_relaxes_to_one() {
        let noise = SamplePath::from_fn(grid(-20.0, 20.0, 4000), |t| t);
        let o = fou_stationary(&noise, &FouConfig::default()).unwrap();
        // started from 0 at t = -20: O(t) = 1 - e^{-(t + 20)}
        for i in 0..o.path.len() {
            let t = o.path.time(i);
            assert!((o.path.value(i) - (1.0 - (-(t + 20.0)).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn ivp_with_zero_noise_decays() {
        let noise = SamplePath::zeros(grid(0.0, 5.0, 500), 1);
        let o = fou_ivp(&noise, 1.0, 1.0, &FouConfig::default()).unwrap();
        for i in 0..o.path.len() {
            let t = o.path.time(i);
            assert!((o.path.value(i) - (-(t - 1.0)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn short_noise_is_rejected() {
        let noise = SamplePath::zeros(grid(0.0, 10.0, 100), 1);
        assert!(matches!(
            fou_stationary(&noise, &FouConfig::default()),
            Err(Error::InsufficientSupport { .. })
        ));
        let w = grid(5.0, 10.0, 50);
        assert!(matches!(
            fou_stationary_on(&noise, &w, &FouConfig::default()),
            Err(Error::InsufficientSupport { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(FouConfig::new(0.0, 1.0).is_err());
        assert!(FouConfig::new(1.0, -1.0).is_err());
        assert!(FouConfig::new(2.0, 3.0).is_ok());
    }

    #[test]
    fn ergodic_average_of_constants() {
        let g = grid(-1.0, 10.0, 110);
        assert_eq!(ergodic_average(&SamplePath::zeros(g, 1), 5.0).unwrap(), 0.0);
        let c = ergodic_average(&SamplePath::from_fn(g, |_| 0.3), 5.0).unwrap();
        assert!((c - 0.3).abs() < 1e-14);
        assert!(ergodic_average(&SamplePath::zeros(g, 1), 20.0).is_err());
    }

    #[test]
    fn growth_report_flags_linear_paths() {
        let g = grid(-64.0, 64.0, 1024);
        let r = sublinear_growth_check(&SamplePath::zeros(g, 1), 0.5).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
        assert!(!r.violation);
        let r = sublinear_growth_check(&SamplePath::from_fn(g, |t| 1.0 + t.abs()), 0.5).unwrap();
        assert!(r.values.windows(2).all(|w| w[1] > w[0]));
        assert!(r.violation);
        assert_eq!(r.times.len(), 7);
    }
}
