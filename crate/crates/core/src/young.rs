//! Young integration by left-point Riemann–Stieltjes sums on a lattice, and
//! the explicit Young–Euler scheme for `dX = f(X) dt + (aX + b) dB`.

use serde::Serialize;

use crate::drift::DriftSpec;
use crate::error::{guard_state, Error, Result};
use crate::noise::{SamplePath, TimeGrid};
use crate::stats;

/// Lattice points `window.t0, window.t0 + stride h, ...`, always closing at
/// `window.t1` (the last interval may be shorter).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub points: Vec<f64>,
    pub mesh: f64,
    indices: Vec<usize>,
}

impl Partition {
    pub fn from_grid(window: &TimeGrid, stride: usize) -> Result<Self> {
        if stride == 0 || stride > window.n() {
            return Err(Error::InvalidParameter(format!(
                "stride {stride} does not fit {} steps",
                window.n()
            )));
        }
        let mut indices: Vec<usize> = (0..=window.n()).step_by(stride).collect();
        if *indices.last().unwrap() != window.n() {
            indices.push(window.n());
        }
        let points: Vec<f64> = indices.iter().map(|&i| window.point(i)).collect();
        let mesh = points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(Self { points, mesh, indices })
    }

    /// Indices into the window grid.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YoungResult {
    pub value: Vec<f64>,
    /// `|S_P - S_{2P}|` between the lattice and the stride-2 partition.
    pub refinement_gap: f64,
    #[serde(rename = "margin")]
    pub alpha_beta_margin: f64,
}

fn check_regularity(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha + beta > 1.0) || !(alpha <= 1.0 && beta <= 1.0) {
        return Err(Error::RegularityViolation { alpha, beta });
    }
    Ok(())
}

struct Aligned<'a> {
    y: &'a SamplePath,
    x: &'a SamplePath,
    y0: usize,
    x0: usize,
    dim: usize,
}

fn align<'a>(y: &'a SamplePath, x: &'a SamplePath, window: &TimeGrid) -> Result<Aligned<'a>> {
    let y0 = y.grid().locate(window)?;
    let x0 = x.grid().locate(window)?;
    if x.dim() != 1 && x.dim() != y.dim() {
        return Err(Error::GridMismatch(format!(
            "integrator dimension {} does not match integrand dimension {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(Aligned { y, x, y0, x0, dim: y.dim() })
}

impl Aligned<'_> {
    fn sum(&self, partition: &Partition) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for w in partition.indices().windows(2) {
            let (i, j) = (w[0], w[1]);
            let yi = self.y.state(self.y0 + i);
            let (xa, xb) = (self.x.state(self.x0 + i), self.x.state(self.x0 + j));
            for (k, a) in acc.iter_mut().enumerate() {
                let dx = if xa.len() == 1 { xb[0] - xa[0] } else { xb[k] - xa[k] };
                *a += yi[k] * dx;
            }
        }
        acc
    }
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    crate::linalg::distance(a, b)
}

/// Left-point sum `Σ Y_{t_i} (X_{t_{i+1}} - X_{t_i})` over the lattice of
/// `window`. A scalar integrator multiplies every integrand component;
/// otherwise the product is componentwise.
pub fn young_integral(
    integrand: &SamplePath,
    integrator: &SamplePath,
    window: &TimeGrid,
    alpha: f64,
    beta: f64,
) -> Result<YoungResult> {
    check_regularity(alpha, beta)?;
    let a = align(integrand, integrator, window)?;
    let fine = a.sum(&Partition::from_grid(window, 1)?);
    let refinement_gap = if window.n() >= 2 {
        gap(&fine, &a.sum(&Partition::from_grid(window, 2)?))
    } else {
        0.0
    };
    Ok(YoungResult {
        value: fine,
        refinement_gap,
        alpha_beta_margin: alpha + beta - 1.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementStudy {
    /// Mesh of the finer partition of each pair, finest first.
    pub meshes: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Slope of `log gap` against `log mesh`.
    pub order: f64,
}

/// Gaps `|S_{2^j} - S_{2^{j+1}}|` for strides `2^j`, `j = 0..levels`.
pub fn young_refinement_study(
    integrand: &SamplePath,
    integrator: &SamplePath,
    window: &TimeGrid,
    alpha: f64,
    beta: f64,
    levels: usize,
) -> Result<RefinementStudy> {
    check_regularity(alpha, beta)?;
    if levels < 2 || window.n() < 1 << levels {
        return Err(Error::InvalidParameter(format!(
            "{levels} refinement levels need at least {} steps",
            1usize << levels
        )));
    }
    let a = align(integrand, integrator, window)?;
    let sums: Vec<Vec<f64>> = (0..=levels)
        .map(|j| Partition::from_grid(window, 1 << j).map(|p| a.sum(&p)))
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = sums.windows(2).map(|w| gap(&w[0], &w[1])).collect();
    let meshes: Vec<f64> = (0..levels).map(|j| window.step() * (1 << j) as f64).collect();
    Ok(RefinementStudy {
        order: order_of(&meshes, &gaps),
        meshes,
        gaps,
    })
}

/// Log-log slope; NaN if any gap is zero.
pub fn order_of(meshes: &[f64], gaps: &[f64]) -> f64 {
    if gaps.iter().any(|&g| !(g > 0.0)) {
        return f64::NAN;
    }
    let xs: Vec<f64> = meshes.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    stats::linear_fit(&xs, &ys).slope
}

/// `X_{k+1} = X_k + f(X_k) h + (a X_k + b)(B_{k+1} - B_k)` on the lattice of
/// `window`.
pub fn young_euler_sde(
    drift: &DriftSpec,
    a: f64,
    b: &[f64],
    noise: &SamplePath,
    x0: &[f64],
    window: &TimeGrid,
) -> Result<SamplePath> {
    let d = x0.len();
    if d == 0 || b.len() != d {
        return Err(Error::InvalidParameter(format!(
            "state dimension {d} and noise offset dimension {} differ",
            b.len()
        )));
    }
    if noise.dim() != 1 {
        return Err(Error::InvalidParameter("Young–Euler needs a scalar driver".into()));
    }
    let lo = noise.grid().locate(window)?;
    let h = window.step();
    let mut values = Vec::with_capacity(window.len() * d);
    values.extend_from_slice(x0);
    let mut x = x0.to_vec();
    let mut fx = vec![0.0; d];
    for k in 0..window.n() {
        let db = noise.value(lo + k + 1) - noise.value(lo + k);
        drift.eval_into(&x, &mut fx);
        for i in 0..d {
            x[i] += fx[i] * h + (a * x[i] + b[i]) * db;
        }
        guard_state(window.point(k + 1), &x)?;
        values.extend_from_slice(&x);
    }
    SamplePath::new(*window, d, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> TimeGrid {
        TimeGrid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn partition_closes_at_endpoint() {
        let p = Partition::from_grid(&unit(5), 2).unwrap();
        assert_eq!(p.indices(), &[0, 2, 4, 5]);
        assert!((p.mesh - 0.4).abs() < 1e-15);
    }

    #[test]
    fn constant_integrand() {
        let g = unit(16);
        let x = SamplePath::from_fn(g, |t| (3.0 * t).sin());
        let y = SamplePath::from_fn(g, |_| 2.0);
        let r = young_integral(&y, &x, &g, 0.7, 0.7).unwrap();
        assert!((r.value[0] - 2.0 * 3f64.sin()).abs() < 1e-14);
        assert!(r.refinement_gap < 1e-14);
        assert!((r.alpha_beta_margin - 0.4).abs() < 1e-15);
    }

    #[test]
    fn riemann_integral_of_t() {
        let g = unit(1000);
        let x = SamplePath::from_fn(g, |t| t);
        let r = young_integral(&x, &x, &g, 1.0, 1.0).unwrap();
        // left sum of t dt is 1/2 - h/2
        assert!((r.value[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn regularity_violation() {
        let g = unit(8);
        let x = SamplePath::from_fn(g, |t| t);
        assert!(matches!(
            young_integral(&x, &x, &g, 0.5, 0.5),
            Err(Error::RegularityViolation { .. })
        ));
    }

    #[test]
    fn grid_mismatch() {
        let x = SamplePath::from_fn(unit(8), |t| t);
        let y = SamplePath::from_fn(unit(10), |t| t);
        assert!(matches!(
            young_integral(&y, &x, &unit(8), 0.7, 0.7),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn euler_with_pure_additive_noise() {
        let g = unit(32);
        let noise = SamplePath::from_fn(g, |t| (5.0 * t).cos());
        let f = DriftSpec::custom("zero", 1.0, 0.0, 1.0, |_, out| out.fill(0.0)).unwrap();
        let x = young_euler_sde(&f, 0.0, &[1.0, 0.0], &noise, &[0.5, 0.5], &g).unwrap();
        for i in 0..x.len() {
            let expect = 0.5 + noise.value(i) - noise.value(0);
            assert!((x.state(i)[0] - expect).abs() < 1e-14);
            assert_eq!(x.state(i)[1], 0.5);
        }
    }

    #[test]
    fn euler_without_noise_is_forward_euler() {
        let g = unit(100);
        let noise = SamplePath::from_fn(g, |t| t.sin());
        let f = DriftSpec::linear(1.0).unwrap();
        let x = young_euler_sde(&f, 0.0, &[0.0], &noise, &[1.0], &g).unwrap();
        let mut expect = 1.0f64;
        for _ in 0..100 {
            expect += -expect * 0.01;
        }
        assert_eq!(x.value(100), expect);
    }

    #[test]
    fn explosion_is_reported() {
        let g = unit(100);
        let noise = SamplePath::from_fn(g, |t| 1e4 * t);
        let f = DriftSpec::linear(1.0).unwrap();
        assert!(matches!(
            young_euler_sde(&f, 1.0, &[0.0], &noise, &[1.0], &g),
            Err(Error::StepExplosion { .. })
        ));
    }
}
