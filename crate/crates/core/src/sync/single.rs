use serde::Serialize;

use super::SyncReport;
use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::linalg;
use crate::noise::{SamplePath, TimeGrid};
use crate::rde::{integrate_channel, RdeScheme};
use crate::stats;
use crate::transform::NoiseChannel;

/// Integrates each pair of initial conditions on the same fOU path and fits
/// the slope of `log ‖U₁ - U₂‖²`. The bound is `2(-L + a·mean(O))`.
pub fn contraction_test(
    drift: &DriftSpec,
    channel: &NoiseChannel,
    fou: &SamplePath,
    u0_pairs: &[(Vec<f64>, Vec<f64>)],
    window: &TimeGrid,
) -> Result<SyncReport> {
    if u0_pairs.is_empty() {
        return Err(Error::InvalidParameter("contraction test needs at least one pair".into()));
    }
    let off = fou.grid().locate(window)?;
    let o_mean = super::trapezoid_mean(&(0..window.len()).map(|i| fou.value(off + i)).collect::<Vec<_>>());
    let mut slopes = Vec::with_capacity(u0_pairs.len());
    let mut first_gap = Vec::new();
    for (k, (a, b)) in u0_pairs.iter().enumerate() {
        if linalg::distance(a, b) == 0.0 {
            return Err(Error::InvalidParameter(format!("pair {k} has identical initial conditions")));
        }
        let ua = integrate_channel(drift, channel, fou, a, window, RdeScheme::Heun)?;
        let ub = integrate_channel(drift, channel, fou, b, window, RdeScheme::Heun)?;
        let gaps: Vec<(f64, f64)> = (0..window.len())
            .map(|i| (window.point(i), linalg::distance_sq(ua.state(i), ub.state(i))))
            .collect();
        let (ts, ls): (Vec<f64>, Vec<f64>) = gaps
            .iter()
            .filter(|(_, g)| *g > f64::MIN_POSITIVE)
            .map(|&(t, g)| (t, g.ln()))
            .unzip();
        if ts.len() < 2 {
            return Err(Error::DegeneratePath);
        }
        slopes.push(stats::linear_fit(&ts, &ls).slope);
        if k == 0 {
            first_gap = gaps;
        }
    }
    Ok(SyncReport {
        experiment: "contraction".into(),
        gap_trajectory: first_gap,
        fitted_rate: Some(stats::mean(&slopes)),
        rate_bound: Some(2.0 * (-drift.dissipativity_l() + channel.a() * o_mean)),
        ..SyncReport::default()
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AbsorbingRadius {
    pub r_squared: f64,
    pub truncation_t: f64,
    pub quadrature_step: f64,
    /// `e^{-L T}`, the weight left out by truncating at `-T`.
    pub tail_bound: f64,
}

/// `R² = 1 + (2/L) ∫_{-T}^0 (e^{-2aO_τ}‖f((b/a)(e^{aO_τ} - 1))‖² + ‖bO_τ‖²)
/// e^{Lτ + 2∫_τ^0 aO_s ds} dτ` by the trapezoid rule on the fOU lattice.
pub fn absorbing_radius(
    drift: &DriftSpec,
    channel: &NoiseChannel,
    fou: &SamplePath,
    truncation_t: f64,
) -> Result<AbsorbingRadius> {
    if !(truncation_t > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation time must be positive, got {truncation_t}")));
    }
    let g = fou.grid();
    let i0 = g.index_of(0.0).ok_or_else(|| Error::InsufficientSupport {
        required: 0.0,
        available: g.t1(),
    })?;
    let h = g.step();
    let steps = (truncation_t / h - 1e-9).ceil() as usize;
    if steps > i0 {
        return Err(Error::InsufficientSupport {
            required: -truncation_t,
            available: g.t0(),
        });
    }
    let l = drift.dissipativity_l();
    let d = channel.dim();
    let zero = vec![0.0; d];
    let integrand = |i: usize, inner: f64| {
        let o = fou.value(i);
        let fx = drift.eval(&channel.from_rde(&zero, o));
        let jac = channel.jacobian(o);
        let forcing = linalg::norm_sq(&fx) / (jac * jac) + channel.b().iter().map(|b| (b * o).powi(2)).sum::<f64>();
        forcing * (l * g.point(i) + inner).exp()
    };
    // walk backwards from 0, accumulating 2∫_τ^0 aO_s ds
    let mut inner = 0.0;
    let mut prev = integrand(i0, 0.0);
    let mut total = 0.0;
    for k in 1..=steps {
        let i = i0 - k;
        inner += h * (channel.rate(fou.value(i)) + channel.rate(fou.value(i + 1)));
        let cur = integrand(i, inner);
        total += 0.5 * h * (prev + cur);
        prev = cur;
    }
    Ok(AbsorbingRadius {
        r_squared: 1.0 + 2.0 / l * total,
        truncation_t: steps as f64 * h,
        quadrature_step: h,
        tail_bound: (-l * steps as f64 * h).exp(),
    })
}

/// `{0} ∪ {±r e_i}`; a single point when `r = 0`.
pub fn default_cloud(dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut cloud = vec![vec![0.0; dim]];
    if radius > 0.0 {
        for i in 0..dim {
            for s in [-1.0, 1.0] {
                let mut x = vec![0.0; dim];
                x[i] = s * radius;
                cloud.push(x);
            }
        }
    }
    cloud
}

#[derive(Debug, Clone, Serialize)]
pub struct PullbackReport {
    pub start_times: Vec<f64>,
    /// Diameter at `t = 0` of the cloud launched at each start time.
    pub diameters: Vec<f64>,
    pub radius0: f64,
    /// Start times sorted from latest to earliest give strictly smaller
    /// diameters.
    pub strictly_decreasing: bool,
}

/// Launches [`default_cloud`] at each (negative) start time and integrates to
/// `t = 0` on the same fOU path.
pub fn pullback_attractor_estimate(
    drift: &DriftSpec,
    channel: &NoiseChannel,
    fou: &SamplePath,
    start_times: &[f64],
    radius0: f64,
) -> Result<PullbackReport> {
    let g = fou.grid();
    let i0 = g.index_of(0.0).ok_or_else(|| Error::InsufficientSupport {
        required: 0.0,
        available: g.t1(),
    })?;
    let cloud = default_cloud(channel.dim(), radius0);
    let mut order: Vec<usize> = (0..start_times.len()).collect();
    order.sort_by(|&a, &b| start_times[b].total_cmp(&start_times[a]));
    let mut diameters = vec![0.0; start_times.len()];
    for (k, &s) in start_times.iter().enumerate() {
        if !(s < 0.0) {
            return Err(Error::InvalidParameter(format!("start time {s} is not negative")));
        }
        let is = g.index_of(s).ok_or_else(|| Error::InsufficientSupport {
            required: s,
            available: g.t0(),
        })?;
        let window = g.slice(is, i0)?;
        let finals = cloud
            .iter()
            .map(|x0| integrate_channel(drift, channel, fou, x0, &window, RdeScheme::Heun).map(|p| p.state(p.len() - 1).to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let mut diam: f64 = 0.0;
        for i in 0..finals.len() {
            for j in i + 1..finals.len() {
                diam = diam.max(linalg::distance(&finals[i], &finals[j]));
            }
        }
        diameters[k] = diam;
    }
    let sorted: Vec<f64> = order.iter().map(|&k| diameters[k]).collect();
    Ok(PullbackReport {
        start_times: start_times.to_vec(),
        strictly_decreasing: super::strictly_decreasing(&sorted),
        diameters,
        radius0,
    })
}
