//! The fractional O-U change of variables between the SDE
//! `dX = f(X) dt + (aX + b) dB` and the random ODE `dU/dt = F(U, O_t)`.

use serde::{Deserialize, Serialize};

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::fou::{fou_stationary_on, FouConfig};
use crate::noise::{SamplePath, TimeGrid};
use crate::rde::{integrate_channel, RdeScheme};
use crate::young::{order_of, young_euler_sde};

/// Coefficients of the linear multiplicative noise `(aX + b) dB`, `a != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffs")]
pub struct LinearNoiseCoeffs {
    a: f64,
    b: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeffs {
    a: f64,
    b: Vec<f64>,
}

impl TryFrom<RawCoeffs> for LinearNoiseCoeffs {
    type Error = Error;
    fn try_from(raw: RawCoeffs) -> Result<Self> {
        Self::new(raw.a, raw.b)
    }
}

impl LinearNoiseCoeffs {
    pub fn new(a: f64, b: Vec<f64>) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "multiplicative coefficient a must be finite and nonzero, got {a}"
            )));
        }
        if b.is_empty() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("b must be a finite nonempty vector".into()));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }
}

fn check_dim(x: &[f64], d: usize) {
    assert_eq!(x.len(), d, "state dimension {} does not match coefficient dimension {d}", x.len());
}

/// `U = e^{-aO}(X + b/a) - b/a`.
pub fn forward_transform(x: &[f64], o: f64, coeffs: &LinearNoiseCoeffs) -> Vec<f64> {
    check_dim(x, coeffs.dim());
    let a = coeffs.a;
    let e = (-a * o).exp();
    let m = (-a * o).exp_m1();
    x.iter().zip(&coeffs.b).map(|(xi, bi)| e * xi + bi / a * m).collect()
}

/// `X = e^{aO}(U + b/a) - b/a`.
pub fn inverse_transform(u: &[f64], o: f64, coeffs: &LinearNoiseCoeffs) -> Vec<f64> {
    check_dim(u, coeffs.dim());
    let a = coeffs.a;
    let e = (a * o).exp();
    let m = (a * o).exp_m1();
    u.iter().zip(&coeffs.b).map(|(ui, bi)| e * ui + bi / a * m).collect()
}

/// `F(u, o) = e^{-ao} f(e^{ao} u + (b/a)(e^{ao} - 1)) + (au + b) o`.
pub fn rde_vector_field(u: &[f64], o: f64, coeffs: &LinearNoiseCoeffs, drift: &DriftSpec) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    let mut scratch = vec![0.0; u.len()];
    NoiseChannel::Linear(coeffs.clone()).field_into(drift, u, o, &mut out, &mut scratch);
    out
}

/// How one subsystem's noise enters: linear multiplicative `(aX + b) dB`
/// (exponential change of variables) or purely additive `b dB`
/// (`V = Y - bO`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseChannel {
    Linear(LinearNoiseCoeffs),
    Additive { b: Vec<f64> },
}

impl From<LinearNoiseCoeffs> for NoiseChannel {
    fn from(c: LinearNoiseCoeffs) -> Self {
        Self::Linear(c)
    }
}

impl NoiseChannel {
    pub fn additive(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("b must be a finite nonempty vector".into()));
        }
        Ok(Self::Additive { b })
    }

    pub fn dim(&self) -> usize {
        self.b().len()
    }

    pub fn b(&self) -> &[f64] {
        match self {
            Self::Linear(c) => c.b(),
            Self::Additive { b } => b,
        }
    }

    /// Multiplicative coefficient; zero for the additive channel.
    pub fn a(&self) -> f64 {
        match self {
            Self::Linear(c) => c.a(),
            Self::Additive { .. } => 0.0,
        }
    }

    /// SDE state to RDE state.
    pub fn to_rde(&self, x: &[f64], o: f64) -> Vec<f64> {
        match self {
            Self::Linear(c) => forward_transform(x, o, c),
            Self::Additive { b } => x.iter().zip(b).map(|(xi, bi)| xi - bi * o).collect(),
        }
    }

    /// RDE state back to SDE state.
    pub fn from_rde(&self, u: &[f64], o: f64) -> Vec<f64> {
        match self {
            Self::Linear(c) => inverse_transform(u, o, c),
            Self::Additive { b } => u.iter().zip(b).map(|(ui, bi)| ui + bi * o).collect(),
        }
    }

    /// `dX/dU`, a scalar multiple of the identity.
    pub fn jacobian(&self, o: f64) -> f64 {
        (self.a() * o).exp()
    }

    /// Growth rate `a·o` the noise adds to the one-sided Lipschitz constant.
    pub fn rate(&self, o: f64) -> f64 {
        self.a() * o
    }

    /// The RDE field at `(u, o)`; `scratch` must have the state dimension.
    pub fn field_into(&self, drift: &DriftSpec, u: &[f64], o: f64, out: &mut [f64], scratch: &mut [f64]) {
        match self {
            Self::Linear(c) => {
                let a = c.a;
                let e = (a * o).exp();
                let m = (a * o).exp_m1();
                for ((s, ui), bi) in scratch.iter_mut().zip(u).zip(&c.b) {
                    *s = e * ui + bi / a * m;
                }
                drift.eval_into(scratch, out);
                for ((y, ui), bi) in out.iter_mut().zip(u).zip(&c.b) {
                    *y = *y / e + (a * ui + bi) * o;
                }
            }
            Self::Additive { b } => {
                for ((s, ui), bi) in scratch.iter_mut().zip(u).zip(b) {
                    *s = ui + bi * o;
                }
                drift.eval_into(scratch, out);
                for (y, bi) in out.iter_mut().zip(b) {
                    *y += bi * o;
                }
            }
        }
    }
}

/// Both sides of the integrated chain rule along a sampled SDE trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRuleReport {
    /// `sup_t |U_t - U_0 - Σ F(U_s, O_s) h|`, left-point sums.
    pub sup_defect: f64,
    pub final_defect: f64,
}

/// Transforms `x_path` with `o_path` and compares the increment of `U` with
/// the left-point lattice integral of the RDE field along it.
pub fn chain_rule_residual(
    x_path: &SamplePath,
    o_path: &SamplePath,
    coeffs: &LinearNoiseCoeffs,
    drift: &DriftSpec,
) -> Result<ChainRuleReport> {
    let g = x_path.grid();
    let off = o_path.grid().locate(g)?;
    if x_path.dim() != coeffs.dim() {
        return Err(Error::GridMismatch(format!(
            "path dimension {} does not match coefficients {}",
            x_path.dim(),
            coeffs.dim()
        )));
    }
    let h = g.step();
    let u: Vec<Vec<f64>> = (0..x_path.len())
        .map(|i| forward_transform(x_path.state(i), o_path.value(off + i), coeffs))
        .collect();
    let mut integral = vec![0.0; coeffs.dim()];
    let mut sup_defect: f64 = 0.0;
    let mut last = 0.0;
    for i in 1..u.len() {
        let f = rde_vector_field(&u[i - 1], o_path.value(off + i - 1), coeffs, drift);
        for (s, fk) in integral.iter_mut().zip(&f) {
            *s += fk * h;
        }
        let defect: f64 = u[i]
            .iter()
            .zip(&u[0])
            .zip(&integral)
            .map(|((ui, u0), s)| (ui - u0 - s).powi(2))
            .sum::<f64>()
            .sqrt();
        sup_defect = sup_defect.max(defect);
        last = defect;
    }
    Ok(ChainRuleReport {
        sup_defect,
        final_defect: last,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainRuleStudy {
    pub steps: Vec<f64>,
    pub defects: Vec<f64>,
    pub order: f64,
}

/// Chain-rule defect of Young–Euler trajectories computed at strides
/// `1, 2, .., 2^{levels-1}` of the noise lattice, against the fOU path of the
/// finest lattice.
pub fn chain_rule_study(
    drift: &DriftSpec,
    coeffs: &LinearNoiseCoeffs,
    noise: &SamplePath,
    fou: &SamplePath,
    x0: &[f64],
    window: &TimeGrid,
    levels: usize,
) -> Result<ChainRuleStudy> {
    let mut steps = Vec::new();
    let mut defects = Vec::new();
    for j in 0..levels {
        let stride = 1 << j;
        let w = window.coarsen(stride)?;
        let nz = noise.restrict(window)?.subsample(stride)?;
        let o = fou.restrict(window)?.subsample(stride)?;
        let x = young_euler_sde(drift, coeffs.a(), coeffs.b(), &nz, x0, &w)?;
        steps.push(w.step());
        defects.push(chain_rule_residual(&x, &o, coeffs, drift)?.sup_defect);
    }
    Ok(ChainRuleStudy {
        order: order_of(&steps, &defects),
        steps,
        defects,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessOptions {
    /// Hölder exponent used to turn the self-gap into an envelope.
    pub alpha: f64,
    pub scheme: RdeScheme,
    pub fou: FouConfig,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            alpha: 0.7,
            scheme: RdeScheme::Heun,
            fou: FouConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// `sup |X_direct - X_conjugate|` at the window step `h`.
    pub sup_distance: f64,
    /// The same distance at `h/2`.
    pub fine_sup_distance: f64,
    /// `log2` of the ratio of the two distances.
    pub refinement_order: f64,
    /// `sup |X_h - X_{h/2}|` of the direct Young–Euler solve.
    pub self_gap: f64,
    /// Geometric-tail bound `self_gap / (1 - 2^{-(2α-1)})` on the direct
    /// solver's error at step `h`.
    pub envelope: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Solves the SDE directly and through the conjugate RDE from one noise
/// realization and compares the `X` trajectories.
///
/// `noise` must live on the lattice of `window.refine(2)` and reach
/// `fou.tail_length` before the window; the half-step solves provide the
/// self-refinement envelope.
pub fn equivalence_harness(
    drift: &DriftSpec,
    coeffs: &LinearNoiseCoeffs,
    noise: &SamplePath,
    x0: &[f64],
    window: &TimeGrid,
    opts: &HarnessOptions,
) -> Result<EquivalenceReport> {
    if !(opts.alpha > 0.5 && opts.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (1/2, 1), got {}",
            opts.alpha
        )));
    }
    let fine_window = window.refine(2)?;
    if !noise.grid().same_lattice(&fine_window) {
        return Err(Error::GridMismatch(format!(
            "noise step {} is not half the window step {}",
            noise.grid().step(),
            window.step()
        )));
    }
    let fine_fou = fou_stationary_on(noise, &fine_window, &opts.fou)?.path;
    let solve = |w: &TimeGrid, stride: usize| -> Result<(SamplePath, SamplePath)> {
        let nz = noise.restrict(&fine_window)?.subsample(stride)?;
        let o = fine_fou.subsample(stride)?;
        let direct = young_euler_sde(drift, coeffs.a(), coeffs.b(), &nz, x0, w)?;
        let channel = NoiseChannel::Linear(coeffs.clone());
        let u0 = forward_transform(x0, o.value(0), coeffs);
        let u = integrate_channel(drift, &channel, &o, &u0, w, opts.scheme)?;
        let mut xs = Vec::with_capacity(u.values().len());
        for i in 0..u.len() {
            xs.extend(inverse_transform(u.state(i), o.value(i), coeffs));
        }
        Ok((direct, SamplePath::new(*w, x0.len(), xs)?))
    };
    let (direct_h, conj_h) = solve(window, 2)?;
    let (direct_f, conj_f) = solve(&fine_window, 1)?;
    let sup_distance = direct_h.sup_distance(&conj_h)?;
    let fine_sup_distance = direct_f.sup_distance(&conj_f)?;
    let self_gap = direct_h.sup_distance(&direct_f.subsample(2)?)?;
    let envelope = self_gap / (1.0 - 2f64.powf(-(2.0 * opts.alpha - 1.0)));
    let ratio = if envelope > 0.0 {
        sup_distance / envelope
    } else if sup_distance <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(EquivalenceReport {
        sup_distance,
        fine_sup_distance,
        refinement_order: (sup_distance / fine_sup_distance).log2(),
        self_gap,
        envelope,
        ratio,
        pass: ratio <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(a: f64, b: f64) -> LinearNoiseCoeffs {
        LinearNoiseCoeffs::new(a, vec![b]).unwrap()
    }

    #[test]
    fn rejects_zero_a() {
        assert!(LinearNoiseCoeffs::new(0.0, vec![1.0]).is_err());
        assert!(serde_json::from_str::<LinearNoiseCoeffs>(r#"{"a":0.0,"b":[1.0]}"#).is_err());
    }

    #[test]
    fn hand_values() {
        let c = coeffs(1.0, 1.0);
        let u = forward_transform(&[0.0], 2f64.ln(), &c);
        assert!((u[0] + 0.5).abs() < 1e-15);
        let x = inverse_transform(&[-0.5], 2f64.ln(), &c);
        assert!(x[0].abs() < 1e-15);
        assert_eq!(forward_transform(&[0.3], 0.0, &c), vec![0.3]);
        assert_eq!(inverse_transform(&[0.3], 0.0, &c), vec![0.3]);
    }

    #[test]
    fn field_hand_values() {
        let f = DriftSpec::linear(1.0).unwrap();
        let c = coeffs(1.0, 0.0);
        let v = rde_vector_field(&[2.0], 0.5, &c, &f);
        assert!((v[0] + 1.0).abs() < 1e-14);
        let g = DriftSpec::affine(1.0, vec![1.0]).unwrap();
        assert_eq!(rde_vector_field(&[2.0], 0.0, &coeffs(0.7, 0.3), &g), g.eval(&[2.0]));
        let zero = DriftSpec::custom("zero", 1.0, 0.0, 1.0, |_, o| o.fill(0.0)).unwrap();
        let v = rde_vector_field(&[2.0], 0.25, &coeffs(3.0, 0.0), &zero);
        assert!((v[0] - 3.0 * 2.0 * 0.25).abs() < 1e-14);
    }

    #[test]
    fn additive_channel_roundtrip() {
        let ch = NoiseChannel::additive(vec![0.5, -1.0]).unwrap();
        let y = [1.25, 3.0];
        let v = ch.to_rde(&y, 0.75);
        assert_eq!(ch.from_rde(&v, 0.75), y.to_vec());
        assert_eq!(ch.jacobian(0.75), 1.0);
        assert_eq!(ch.rate(0.75), 0.0);
    }

    #[test]
    fn additive_field_without_offset_is_the_drift() {
        let ch = NoiseChannel::additive(vec![0.0]).unwrap();
        let g = DriftSpec::linear(1.0).unwrap();
        let (mut out, mut s) = ([0.0], [0.0]);
        ch.field_into(&g, &[2.0], 0.9, &mut out, &mut s);
        assert_eq!(out, [-2.0]);
    }

    #[test]
    fn smooth_chain_rule_is_first_order() {
        // B = sin t + 1 - cos t makes O = sin t solve dO = -O dt + dB exactly
        let f = DriftSpec::linear(1.0).unwrap();
        let c = coeffs(1.0, 0.0);
        let mut defects = Vec::new();
        for n in [200, 400, 800] {
            let g = TimeGrid::new(0.0, 2.0, n).unwrap();
            let noise = SamplePath::from_fn(g, |t| t.sin() + 1.0 - t.cos());
            let o = SamplePath::from_fn(g, f64::sin);
            let x = young_euler_sde(&f, 1.0, &[0.0], &noise, &[1.0], &g).unwrap();
            defects.push(chain_rule_residual(&x, &o, &c, &f).unwrap().sup_defect);
        }
        for w in defects.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 1.0).abs() < 0.15, "{defects:?}");
        }
    }

    #[test]
    fn zero_noise_harness_is_exact_with_euler() {
        let f = DriftSpec::affine(1.0, vec![1.0]).unwrap();
        let window = TimeGrid::new(0.0, 1.0, 64).unwrap();
        let noise = SamplePath::zeros(TimeGrid::new(-20.0, 1.0, 21 * 128).unwrap(), 1);
        let opts = HarnessOptions {
            scheme: RdeScheme::Euler,
            ..HarnessOptions::default()
        };
        let r = equivalence_harness(&f, &coeffs(1.0, 1.0), &noise, &[0.5], &window, &opts).unwrap();
        assert!(r.sup_distance <= 1e-12, "{r:?}");
    }
}
