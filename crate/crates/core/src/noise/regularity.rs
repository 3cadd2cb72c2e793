use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::path::SamplePath;
use crate::stats;

/// Minimum number of steps for a variogram estimate.
pub const MIN_VARIOGRAM_STEPS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct HolderEstimate {
    /// `slope / 2`.
    pub exponent: f64,
    /// Slope of `log V(k h)` against `log(k h)`.
    pub slope: f64,
    pub lags: Vec<usize>,
    pub variogram: Vec<f64>,
}

/// Dyadic lags `1, 2, 4, ..` up to the largest power of two not above `sqrt(n)`
/// (and at least 8).
pub fn variogram_lags(n: usize) -> Vec<usize> {
    let cap = ((n as f64).sqrt() as usize).max(8).min(n / 4);
    let mut lags = vec![1];
    while lags.last().unwrap() * 2 <= cap {
        lags.push(lags.last().unwrap() * 2);
    }
    lags
}

/// Mean squared increment at each lag.
pub fn variogram(path: &SamplePath, lags: &[usize]) -> Vec<f64> {
    let n = path.grid().n();
    lags.iter()
        .map(|&k| {
            let s: f64 = (0..=n - k)
                .map(|i| {
                    path.state(i + k)
                        .iter()
                        .zip(path.state(i))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .sum();
            s / (n + 1 - k) as f64
        })
        .collect()
}

/// Variogram estimate of the Hölder/Hurst exponent: half the least-squares
/// slope of `log E|u(t+h) - u(t)|^2` against `log h` over dyadic lags.
pub fn estimate_holder_exponent(path: &SamplePath) -> Result<HolderEstimate> {
    let n = path.grid().n();
    if n < MIN_VARIOGRAM_STEPS {
        return Err(Error::InvalidGrid(format!(
            "variogram estimate needs at least {MIN_VARIOGRAM_STEPS} steps, got {n}"
        )));
    }
    let lags = variogram_lags(n);
    let v = variogram(path, &lags);
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::DegeneratePath);
    }
    let h = path.grid().step();
    let xs: Vec<f64> = lags.iter().map(|&k| (k as f64 * h).ln()).collect();
    let ys: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let fit = stats::linear_fit(&xs, &ys);
    Ok(HolderEstimate {
        exponent: 0.5 * fit.slope,
        slope: fit.slope,
        lags,
        variogram: v,
    })
}

/// Discrete Hölder seminorm `sup_{i != j} |u_i - u_j| / |t_i - t_j|^alpha`.
pub fn holder_seminorm(path: &SamplePath, alpha: f64) -> f64 {
    let g = path.grid();
    let h = g.step();
    let mut best: f64 = 0.0;
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            let d = crate::linalg::distance(path.state(i), path.state(j));
            best = best.max(d / ((j - i) as f64 * h).powf(alpha));
        }
    }
    best
}

/// Hölder norm `sup |u| + |||u|||_alpha`.
pub fn holder_norm(path: &SamplePath, alpha: f64) -> f64 {
    let sup = (0..path.len())
        .map(|i| crate::linalg::norm(path.state(i)))
        .fold(0.0, f64::max);
    sup + holder_seminorm(path, alpha)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthBound {
    /// Smallest `K` with `|B_t| <= K (1 + t^2)` on the grid.
    pub k: f64,
    pub argmax_t: f64,
}

pub fn polynomial_growth_check(path: &SamplePath) -> GrowthBound {
    let mut best = GrowthBound {
        k: 0.0,
        argmax_t: path.time(0),
    };
    for i in 0..path.len() {
        let t = path.time(i);
        let ratio = crate::linalg::norm(path.state(i)) / (1.0 + t * t);
        if ratio > best.k {
            best = GrowthBound { k: ratio, argmax_t: t };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::grid::TimeGrid;

    #[test]
    fn smooth_path_has_exponent_one() {
        let g = TimeGrid::new(0.0, 1.0, 256).unwrap();
        let e = estimate_holder_exponent(&SamplePath::from_fn(g, |t| t)).unwrap();
        assert!((e.exponent - 1.0).abs() < 0.05);
    }

    #[test]
    fn constant_path_is_degenerate() {
        let g = TimeGrid::new(0.0, 1.0, 128).unwrap();
        assert!(matches!(
            estimate_holder_exponent(&SamplePath::from_fn(g, |_| 2.0)),
            Err(Error::DegeneratePath)
        ));
    }

    #[test]
    fn short_paths_are_rejected() {
        let g = TimeGrid::new(0.0, 1.0, 32).unwrap();
        assert!(estimate_holder_exponent(&SamplePath::from_fn(g, |t| t)).is_err());
    }

    #[test]
    fn lag_schedule() {
        assert_eq!(variogram_lags(64), vec![1, 2, 4, 8]);
        assert_eq!(variogram_lags(4096), vec![1, 2, 4, 8, 16, 32, 64]);
    }

    #[test]
    fn seminorm_of_linear_path() {
        let g = TimeGrid::new(0.0, 1.0, 16).unwrap();
        let p = SamplePath::from_fn(g, |t| 3.0 * t);
        assert!((holder_seminorm(&p, 1.0) - 3.0).abs() < 1e-12);
        // for alpha < 1 the supremum sits at the longest separation
        assert!((holder_seminorm(&p, 0.5) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn growth_examples() {
        let g = TimeGrid::new(-2.0, 2.0, 4).unwrap();
        let zero = SamplePath::from_fn(g, |_| 0.0);
        assert_eq!(polynomial_growth_check(&zero).k, 0.0);
        let spike = SamplePath::scalar(g, vec![0.0, 0.0, 0.0, 8.0, 0.0]).unwrap();
        let r = polynomial_growth_check(&spike);
        assert_eq!(r.k, 4.0);
        assert_eq!(r.argmax_t, 1.0);
    }
}
