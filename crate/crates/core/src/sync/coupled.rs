use serde::Serialize;

use super::{trapezoid_mean, SyncReport};
use crate::error::{Error, Result};
use crate::linalg::{self, Sym2};
use crate::noise::{SamplePath, TimeGrid};
use crate::rde::{integrate_averaged, integrate_coupled, CoupledConfig, CoupledState};

/// `∫₀ᵗ A_κ(τ) dτ` with
/// `A_κ = [[-2L - κ + 2a₁O¹, κ], [κ, -2L - κ + 2a₂O²]]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionMatrixSample {
    pub t: f64,
    pub entries: Sym2,
}

impl ContractionMatrixSample {
    pub fn max_eigenvalue(&self) -> f64 {
        self.entries.eigenvalues().0
    }
}

/// Running integral of the contraction matrix at every point of `window`,
/// measured from `window.t0` (trapezoid rule for the fOU terms).
pub fn contraction_matrix_integral(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    window: &TimeGrid,
) -> Result<Vec<ContractionMatrixSample>> {
    let (off1, off2) = (fou1.grid().locate(window)?, fou2.grid().locate(window)?);
    let (l, k) = (cfg.dissipativity_l, cfg.kappa);
    let h = window.step();
    let r1 = |i: usize| 2.0 * cfg.channel1.rate(fou1.value(off1 + i));
    let r2 = |i: usize| 2.0 * cfg.channel2.rate(fou2.value(off2 + i));
    let (mut i1, mut i2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(window.len());
    for i in 0..window.len() {
        if i > 0 {
            i1 += 0.5 * h * (r1(i - 1) + r1(i));
            i2 += 0.5 * h * (r2(i - 1) + r2(i));
        }
        let s = i as f64 * h;
        out.push(ContractionMatrixSample {
            t: window.point(i),
            entries: Sym2 {
                p: (-2.0 * l - k) * s + i1,
                q: k * s,
                r: (-2.0 * l - k) * s + i2,
            },
        });
    }
    Ok(out)
}

/// Eigenvalues of the integrated contraction matrix against `-L t`, and the
/// realized gap vector `m(t) = (‖U₁ - U₂‖², ‖V₁ - V₂‖²)` of two coupled
/// solutions against `exp(∫A_κ) m(0)`.
pub fn coupled_contraction_eigs(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    window: &TimeGrid,
    pair: (&CoupledState, &CoupledState),
) -> Result<SyncReport> {
    let mats = contraction_matrix_integral(cfg, fou1, fou2, window)?;
    let l = cfg.dissipativity_l;
    let eigen_trajectory: Vec<(f64, f64)> = mats.iter().map(|m| (m.t, m.max_eigenvalue())).collect();
    // last violation of λ_max <= -L (t - t0); the onset is the next grid time
    let t0 = window.t0();
    let last_bad = eigen_trajectory
        .iter()
        .rposition(|&(t, e)| e > -l * (t - t0) + 1e-12 * (1.0 + e.abs()));
    let onset = match last_bad {
        None => Some(t0),
        Some(i) if i + 1 < eigen_trajectory.len() => Some(eigen_trajectory[i + 1].0),
        Some(_) => None,
    };

    let a = integrate_coupled(cfg, fou1, fou2, pair.0, window)?;
    let b = integrate_coupled(cfg, fou1, fou2, pair.1, window)?;
    let m = |i: usize| {
        [
            linalg::distance_sq(a.u.state(i), b.u.state(i)),
            linalg::distance_sq(a.v.state(i), b.v.state(i)),
        ]
    };
    let m0 = m(0);
    if m0[0] == 0.0 && m0[1] == 0.0 {
        return Err(Error::InvalidParameter("comparison pair starts from the same state".into()));
    }
    let phi = fundamental_solution(cfg, fou1, fou2, window, m0)?;
    let mut excess = f64::NEG_INFINITY;
    let mut fundamental_excess = f64::NEG_INFINITY;
    let mut gap_trajectory = Vec::with_capacity(window.len());
    for (i, mat) in mats.iter().enumerate() {
        let mi = m(i);
        let bound = mat.entries.expm_apply(m0);
        for c in 0..2 {
            excess = excess.max(relative_excess(mi[c], bound[c]));
            fundamental_excess = fundamental_excess.max(relative_excess(mi[c], phi[i][c]));
        }
        gap_trajectory.push((mat.t, mi[0] + mi[1]));
    }
    Ok(SyncReport {
        experiment: "contraction-eigs".into(),
        kappa: Some(cfg.kappa),
        gap_trajectory,
        eigenvalue_bound: eigen_trajectory.last().map(|e| e.1),
        eigen_trajectory,
        onset,
        comparison_excess: Some(excess),
        fundamental_excess: Some(fundamental_excess),
        ..SyncReport::default()
    })
}

fn relative_excess(m: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        (m - bound) / bound
    } else if m == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `Φ(t) m₀` for the linear comparison system `m' = A_κ(t) m`, by RK4 with
/// `A_κ` linear between grid points. Unlike `exp(∫A_κ)`, this is the
/// fundamental solution when `A_κ(t)` does not commute over time.
pub fn fundamental_solution(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    window: &TimeGrid,
    m0: [f64; 2],
) -> Result<Vec<[f64; 2]>> {
    let (off1, off2) = (fou1.grid().locate(window)?, fou2.grid().locate(window)?);
    let (l, k) = (cfg.dissipativity_l, cfg.kappa);
    let h = window.step();
    let diag = |i: usize| {
        (
            -2.0 * l - k + 2.0 * cfg.channel1.rate(fou1.value(off1 + i)),
            -2.0 * l - k + 2.0 * cfg.channel2.rate(fou2.value(off2 + i)),
        )
    };
    let apply = |(p, r): (f64, f64), m: [f64; 2]| [p * m[0] + k * m[1], k * m[0] + r * m[1]];
    let mut m = m0;
    let mut out = Vec::with_capacity(window.len());
    out.push(m);
    for i in 0..window.n() {
        let (a0, a1) = (diag(i), diag(i + 1));
        let am = (0.5 * (a0.0 + a1.0), 0.5 * (a0.1 + a1.1));
        let k1 = apply(a0, m);
        let k2 = apply(am, [m[0] + 0.5 * h * k1[0], m[1] + 0.5 * h * k1[1]]);
        let k3 = apply(am, [m[0] + 0.5 * h * k2[0], m[1] + 0.5 * h * k2[1]]);
        let k4 = apply(a1, [m[0] + h * k3[0], m[1] + h * k3[1]]);
        for c in 0..2 {
            m[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        out.push(m);
    }
    Ok(out)
}

fn second_half(window: &TimeGrid) -> usize {
    window.n() / 2
}

/// Runs the coupled system for each `κ` from `state0` and records
/// `‖U - V‖²`, with its time average over the second half of the window.
pub fn sync_gap_sweep(
    cfg_base: &CoupledConfig,
    kappas: &[f64],
    fou1: &SamplePath,
    fou2: &SamplePath,
    window: &TimeGrid,
    state0: &CoupledState,
) -> Result<Vec<SyncReport>> {
    check_kappas(kappas)?;
    kappas
        .iter()
        .map(|&k| {
            let cfg = cfg_base.with_kappa(k);
            let tr = integrate_coupled(&cfg, fou1, fou2, state0, window)?;
            let gaps = tr.gap_squared();
            let steady = trapezoid_mean(&gaps[second_half(window)..]);
            Ok(SyncReport {
                experiment: "sync-sweep".into(),
                kappa: Some(k),
                gap_trajectory: gaps.iter().enumerate().map(|(i, &g)| (window.point(i), g)).collect(),
                steady_gap: Some(steady),
                ..SyncReport::default()
            })
        })
        .collect()
}

/// For each `κ`, `sup ‖½(U_κ + V_κ) - W‖` over the second half of the window,
/// where `W` solves the averaged system from `½(U_0 + V_0)`; the first half
/// is burn-in.
pub fn averaged_limit_sweep(
    cfg_base: &CoupledConfig,
    kappas: &[f64],
    fou1: &SamplePath,
    fou2: &SamplePath,
    window: &TimeGrid,
    state0: &CoupledState,
) -> Result<Vec<SyncReport>> {
    check_kappas(kappas)?;
    let w0: Vec<f64> = state0.u.iter().zip(&state0.v).map(|(a, b)| 0.5 * (a + b)).collect();
    let w = integrate_averaged(cfg_base, fou1, fou2, &w0, window)?;
    kappas
        .iter()
        .map(|&k| {
            let cfg = cfg_base.with_kappa(k);
            let tr = integrate_coupled(&cfg, fou1, fou2, state0, window)?;
            let mid = tr.midpoint();
            let dist: Vec<(f64, f64)> = (0..window.len())
                .map(|i| (window.point(i), linalg::distance(mid.state(i), w.state(i))))
                .collect();
            let sup = dist[second_half(window)..].iter().map(|d| d.1).fold(0.0, f64::max);
            Ok(SyncReport {
                experiment: "averaged-sweep".into(),
                kappa: Some(k),
                gap_trajectory: dist,
                reference_distance: Some(sup),
                ..SyncReport::default()
            })
        })
        .collect()
}

fn check_kappas(kappas: &[f64]) -> Result<()> {
    if kappas.is_empty() || kappas.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::InvalidParameter(format!("kappas must be positive, got {kappas:?}")));
    }
    if kappas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("kappas must be increasing, got {kappas:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::DriftSpec;
    use crate::noise::HurstParameter;
    use crate::transform::LinearNoiseCoeffs;

    fn cfg(f: DriftSpec, g: DriftSpec, kappa: f64) -> CoupledConfig {
        let h = HurstParameter::new(0.75).unwrap();
        let c = LinearNoiseCoeffs::new(1.0, vec![0.0]).unwrap();
        CoupledConfig::new(c.clone(), c, f, g, h, h, kappa).unwrap()
    }

    #[test]
    fn zero_noise_eigenvalues() {
        let g = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let o = SamplePath::zeros(g, 1);
        let f = DriftSpec::linear(1.0).unwrap();
        let mats = contraction_matrix_integral(&cfg(f.clone(), f.clone(), 1.0), &o, &o, &g).unwrap();
        let (l1, l2) = mats[10].entries.eigenvalues();
        assert!((l1 + 2.0).abs() < 1e-12 && (l2 + 4.0).abs() < 1e-12);
        let mats = contraction_matrix_integral(&cfg(f.clone(), f, 0.0), &o, &o, &g).unwrap();
        let (l1, l2) = mats[10].entries.eigenvalues();
        assert!((l1 + 2.0).abs() < 1e-12 && (l2 + 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_sweep_has_zero_gap() {
        let g = TimeGrid::new(0.0, 4.0, 400).unwrap();
        let o = SamplePath::from_fn(g, |t| (2.0 * t).sin());
        let f = DriftSpec::affine(1.0, vec![1.0]).unwrap();
        let c = cfg(f.clone(), f, 1.0);
        let s = CoupledState::new(vec![2.0], vec![2.0]);
        for r in sync_gap_sweep(&c, &[1.0, 10.0, 100.0], &o, &o, &g, &s).unwrap() {
            assert!(r.gap_trajectory.iter().all(|p| p.1 == 0.0));
        }
        for r in averaged_limit_sweep(&c, &[1.0, 10.0, 100.0], &o, &o, &g, &s).unwrap() {
            assert_eq!(r.reference_distance, Some(0.0));
        }
    }

    #[test]
    fn linear_averaged_limit_is_first_order_in_kappa() {
        let g = TimeGrid::new(0.0, 4.0, 4000).unwrap();
        let o = SamplePath::zeros(g, 1);
        let c = cfg(DriftSpec::linear(1.0).unwrap(), DriftSpec::linear(3.0).unwrap(), 1.0);
        let s = CoupledState::new(vec![1.0], vec![1.0]);
        let r = averaged_limit_sweep(&c, &[10.0, 100.0], &o, &o, &g, &s).unwrap();
        let ratio = r[0].reference_distance.unwrap() / r[1].reference_distance.unwrap();
        assert!((7.0..13.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn comparison_bound_holds_without_noise() {
        let g = TimeGrid::new(0.0, 5.0, 1000).unwrap();
        let o = SamplePath::zeros(g, 1);
        let c = cfg(DriftSpec::affine(1.0, vec![1.0]).unwrap(), DriftSpec::affine(1.0, vec![-1.0]).unwrap(), 10.0);
        let a = CoupledState::new(vec![1.0], vec![-1.0]);
        let b = CoupledState::new(vec![2.0], vec![0.5]);
        let r = coupled_contraction_eigs(&c, &o, &o, &g, (&a, &b)).unwrap();
        assert_eq!(r.onset, Some(0.0));
        assert!(r.comparison_excess.unwrap() <= 1e-6, "{r:?}");
    }

    #[test]
    fn fundamental_solution_bounds_noisy_gap() {
        let g = TimeGrid::new(0.0, 6.0, 3000).unwrap();
        let o1 = SamplePath::from_fn(g, |t| 1.5 * (3.0 * t).sin());
        let o2 = SamplePath::from_fn(g, |t| -1.5 * (2.0 * t).cos());
        let c = cfg(DriftSpec::affine(1.0, vec![1.0]).unwrap(), DriftSpec::affine(1.0, vec![-1.0]).unwrap(), 1.0);
        let a = CoupledState::new(vec![1.0], vec![-1.0]);
        let b = CoupledState::new(vec![2.0], vec![-2.0]);
        let r = coupled_contraction_eigs(&c, &o1, &o2, &g, (&a, &b)).unwrap();
        assert!(r.fundamental_excess.unwrap() <= 1e-6, "{r:?}");
    }

    #[test]
    fn kappas_are_validated() {
        assert!(check_kappas(&[1.0, 10.0]).is_ok());
        assert!(check_kappas(&[10.0, 1.0]).is_err());
        assert!(check_kappas(&[0.0]).is_err());
    }
}
