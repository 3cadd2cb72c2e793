//! Pathwise integration of the random ODEs: a single transformed system,
//! the linearly coupled pair, and the averaged system.
//!
//! The fOU coefficients enter as ordinary time-dependent coefficients, so the
//! uncoupled fields are stepped with Heun's method on the lattice of the
//! precomputed fOU path. The coupling `κ(V - U), κ(U - V)` is integrated
//! exactly inside a Strang splitting, so no step restriction comes from `κ`.

use serde::{Deserialize, Serialize};

use crate::drift::DriftSpec;
use crate::error::{guard_state, Error, Result};
use crate::noise::{HurstParameter, SamplePath, TimeGrid};
use crate::transform::{LinearNoiseCoeffs, NoiseChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RdeScheme {
    #[default]
    Heun,
    Euler,
}

struct Stepper {
    d: usize,
    k1: Vec<f64>,
    k2: Vec<f64>,
    pred: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(d: usize) -> Self {
        Self {
            d,
            k1: vec![0.0; d],
            k2: vec![0.0; d],
            pred: vec![0.0; d],
            scratch: vec![0.0; d],
        }
    }

    /// One step of `du/dt = field(u, o)` from `(t_k, o0)` to `(t_k + h, o1)`.
    fn step(
        &mut self,
        scheme: RdeScheme,
        field: &impl Fn(&[f64], f64, &mut [f64], &mut [f64]),
        u: &mut [f64],
        o0: f64,
        o1: f64,
        h: f64,
    ) {
        field(u, o0, &mut self.k1, &mut self.scratch);
        match scheme {
            RdeScheme::Euler => {
                for i in 0..self.d {
                    u[i] += h * self.k1[i];
                }
            }
            RdeScheme::Heun => {
                for i in 0..self.d {
                    self.pred[i] = u[i] + h * self.k1[i];
                }
                field(&self.pred, o1, &mut self.k2, &mut self.scratch);
                for i in 0..self.d {
                    u[i] += 0.5 * h * (self.k1[i] + self.k2[i]);
                }
            }
        }
    }
}

fn fou_offset(fou: &SamplePath, window: &TimeGrid) -> Result<usize> {
    if fou.dim() != 1 {
        return Err(Error::InvalidParameter("fOU coefficient path must be scalar".into()));
    }
    fou.grid().locate(window)
}

fn check_state(d: usize, x: &[f64], what: &str) -> Result<()> {
    if x.len() != d {
        return Err(Error::InvalidParameter(format!(
            "{what} has dimension {}, expected {d}",
            x.len()
        )));
    }
    Ok(())
}

/// Heun integration of `du/dt = F(u, O_t)` for linear multiplicative noise.
pub fn integrate_rde(
    drift: &DriftSpec,
    coeffs: &LinearNoiseCoeffs,
    fou: &SamplePath,
    u0: &[f64],
    window: &TimeGrid,
) -> Result<SamplePath> {
    integrate_channel(drift, &NoiseChannel::Linear(coeffs.clone()), fou, u0, window, RdeScheme::Heun)
}

/// Integrates the RDE field of `channel` along `fou` on the lattice of `window`.
pub fn integrate_channel(
    drift: &DriftSpec,
    channel: &NoiseChannel,
    fou: &SamplePath,
    u0: &[f64],
    window: &TimeGrid,
    scheme: RdeScheme,
) -> Result<SamplePath> {
    let d = channel.dim();
    check_state(d, u0, "initial state")?;
    let off = fou_offset(fou, window)?;
    let field = |u: &[f64], o: f64, out: &mut [f64], s: &mut [f64]| channel.field_into(drift, u, o, out, s);
    integrate_field(&field, d, fou, off, u0, window, scheme)
}

fn integrate_field(
    field: &impl Fn(&[f64], f64, &mut [f64], &mut [f64]),
    d: usize,
    fou: &SamplePath,
    off: usize,
    u0: &[f64],
    window: &TimeGrid,
    scheme: RdeScheme,
) -> Result<SamplePath> {
    let h = window.step();
    let mut stepper = Stepper::new(d);
    let mut u = u0.to_vec();
    let mut values = Vec::with_capacity(window.len() * d);
    values.extend_from_slice(&u);
    for k in 0..window.n() {
        stepper.step(scheme, field, &mut u, fou.value(off + k), fou.value(off + k + 1), h);
        guard_state(window.point(k + 1), &u)?;
        values.extend_from_slice(&u);
    }
    SamplePath::new(*window, d, values)
}

/// Parameters of the coupled pair
/// `dU/dt = F(U, O¹) + κ(V - U)`, `dV/dt = G(V, O²) + κ(U - V)`.
#[derive(Debug, Clone)]
pub struct CoupledConfig {
    pub channel1: NoiseChannel,
    pub channel2: NoiseChannel,
    pub drift_f: DriftSpec,
    pub drift_g: DriftSpec,
    pub h1: HurstParameter,
    pub h2: HurstParameter,
    pub kappa: f64,
    /// Common one-sided Lipschitz constant of `f` and `g`.
    pub dissipativity_l: f64,
}

impl CoupledConfig {
    pub fn new(
        channel1: impl Into<NoiseChannel>,
        channel2: impl Into<NoiseChannel>,
        drift_f: DriftSpec,
        drift_g: DriftSpec,
        h1: HurstParameter,
        h2: HurstParameter,
        kappa: f64,
    ) -> Result<Self> {
        let cfg = Self {
            channel1: channel1.into(),
            channel2: channel2.into(),
            dissipativity_l: drift_f.dissipativity_l().min(drift_g.dissipativity_l()),
            drift_f,
            drift_g,
            h1,
            h2,
            kappa,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be finite and nonnegative, got {}",
                self.kappa
            )));
        }
        if self.channel1.dim() != self.channel2.dim() {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimensions differ: {} vs {}",
                self.channel1.dim(),
                self.channel2.dim()
            )));
        }
        if !(self.dissipativity_l > 0.0)
            || self.dissipativity_l > self.drift_f.dissipativity_l()
            || self.dissipativity_l > self.drift_g.dissipativity_l()
        {
            return Err(Error::InvalidParameter(format!(
                "common L = {} is not shared by both drifts",
                self.dissipativity_l
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.channel1.dim()
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self { kappa, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CoupledState {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        Self { u, v }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrajectory {
    pub u: SamplePath,
    pub v: SamplePath,
}

impl CoupledTrajectory {
    pub fn grid(&self) -> &TimeGrid {
        self.u.grid()
    }

    /// `‖U_t - V_t‖²` at each grid point.
    pub fn gap_squared(&self) -> Vec<f64> {
        (0..self.u.len())
            .map(|i| crate::linalg::distance_sq(self.u.state(i), self.v.state(i)))
            .collect()
    }

    /// `½(U + V)`.
    pub fn midpoint(&self) -> SamplePath {
        self.u.combine(0.5, &self.v, 0.5).expect("components share a grid")
    }

    pub fn state(&self, i: usize) -> CoupledState {
        CoupledState::new(self.u.state(i).to_vec(), self.v.state(i).to_vec())
    }
}

/// Exact flow of `d(U, V)/dt = κ(V - U, U - V)` over `tau`: the sum is kept
/// and the difference shrinks by `e^{-2κτ}`.
pub fn coupling_flow(u: &mut [f64], v: &mut [f64], kappa: f64, tau: f64) {
    let c = -0.5 * (-2.0 * kappa * tau).exp_m1();
    for (ui, vi) in u.iter_mut().zip(v.iter_mut()) {
        let d = *vi - *ui;
        *ui += c * d;
        *vi -= c * d;
    }
}

/// Strang splitting: half coupling flow, Heun step of each field, half
/// coupling flow.
pub fn integrate_coupled(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    state0: &CoupledState,
    window: &TimeGrid,
) -> Result<CoupledTrajectory> {
    cfg.validate()?;
    let d = cfg.dim();
    check_state(d, &state0.u, "u0")?;
    check_state(d, &state0.v, "v0")?;
    let (off1, off2) = (fou_offset(fou1, window)?, fou_offset(fou2, window)?);
    let f1 = |u: &[f64], o: f64, out: &mut [f64], s: &mut [f64]| cfg.channel1.field_into(&cfg.drift_f, u, o, out, s);
    let f2 = |u: &[f64], o: f64, out: &mut [f64], s: &mut [f64]| cfg.channel2.field_into(&cfg.drift_g, u, o, out, s);
    let h = window.step();
    let (mut s1, mut s2) = (Stepper::new(d), Stepper::new(d));
    let (mut u, mut v) = (state0.u.clone(), state0.v.clone());
    let mut us = Vec::with_capacity(window.len() * d);
    let mut vs = Vec::with_capacity(window.len() * d);
    us.extend_from_slice(&u);
    vs.extend_from_slice(&v);
    for k in 0..window.n() {
        coupling_flow(&mut u, &mut v, cfg.kappa, 0.5 * h);
        s1.step(RdeScheme::Heun, &f1, &mut u, fou1.value(off1 + k), fou1.value(off1 + k + 1), h);
        s2.step(RdeScheme::Heun, &f2, &mut v, fou2.value(off2 + k), fou2.value(off2 + k + 1), h);
        coupling_flow(&mut u, &mut v, cfg.kappa, 0.5 * h);
        let t = window.point(k + 1);
        guard_state(t, &u)?;
        guard_state(t, &v)?;
        us.extend_from_slice(&u);
        vs.extend_from_slice(&v);
    }
    Ok(CoupledTrajectory {
        u: SamplePath::new(*window, d, us)?,
        v: SamplePath::new(*window, d, vs)?,
    })
}

/// Heun integration of the averaged field `½(F(W, O¹) + G(W, O²))`.
pub fn integrate_averaged(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    w0: &[f64],
    window: &TimeGrid,
) -> Result<SamplePath> {
    cfg.validate()?;
    let d = cfg.dim();
    check_state(d, w0, "w0")?;
    let (off1, off2) = (fou_offset(fou1, window)?, fou_offset(fou2, window)?);
    // the field sees one coefficient value; pass the step index through it
    let h = window.step();
    let mut k1 = vec![0.0; d];
    let mut k2 = vec![0.0; d];
    let mut a = vec![0.0; d];
    let mut b = vec![0.0; d];
    let mut s = vec![0.0; d];
    let mut pred = vec![0.0; d];
    let mut eval = |w: &[f64], i: usize, out: &mut [f64]| {
        cfg.channel1.field_into(&cfg.drift_f, w, fou1.value(off1 + i), &mut a, &mut s);
        cfg.channel2.field_into(&cfg.drift_g, w, fou2.value(off2 + i), &mut b, &mut s);
        for j in 0..d {
            out[j] = 0.5 * (a[j] + b[j]);
        }
    };
    let mut w = w0.to_vec();
    let mut values = Vec::with_capacity(window.len() * d);
    values.extend_from_slice(&w);
    for k in 0..window.n() {
        eval(&w, k, &mut k1);
        for j in 0..d {
            pred[j] = w[j] + h * k1[j];
        }
        eval(&pred, k + 1, &mut k2);
        for j in 0..d {
            w[j] += 0.5 * h * (k1[j] + k2[j]);
        }
        guard_state(window.point(k + 1), &w)?;
        values.extend_from_slice(&w);
    }
    SamplePath::new(*window, d, values)
}

/// The coupled SDE pair recovered from a coupled RDE solve.
#[derive(Debug, Clone)]
pub struct CoupledSdeReconstruction {
    pub x: SamplePath,
    pub y: SamplePath,
    /// `η_t = ½(a₁O¹_t - a₂O²_t)`.
    pub eta: SamplePath,
    /// The averaged RDE solution `W` started from `½(U_0 + V_0)`.
    pub w: SamplePath,
    /// `W` mapped through each inverse transform: the `κ → ∞` limit of `(X, Y)`.
    pub x_limit: SamplePath,
    pub y_limit: SamplePath,
    /// Explicit Young–Euler solve of the coupled SDE itself; `None` when
    /// `κh > 1` makes the explicit coupling unstable.
    pub direct: Option<(SamplePath, SamplePath)>,
}

/// Drift of the coupled SDE for `X`:
/// `f(X) + κ e^{a₁O¹}(V - U)` with `U, V` the transformed states.
pub fn coupled_sde_drift(
    drift: &DriftSpec,
    own: &NoiseChannel,
    other: &NoiseChannel,
    kappa: f64,
    x: &[f64],
    y: &[f64],
    o_own: f64,
    o_other: f64,
) -> Vec<f64> {
    let u = own.to_rde(x, o_own);
    let v = other.to_rde(y, o_other);
    let jac = own.jacobian(o_own);
    let mut out = drift.eval(x);
    for i in 0..out.len() {
        out[i] += kappa * jac * (v[i] - u[i]);
    }
    out
}

fn map_path(path: &SamplePath, fou: &SamplePath, off: usize, f: impl Fn(&[f64], f64) -> Vec<f64>) -> Result<SamplePath> {
    let mut out = Vec::with_capacity(path.values().len());
    for i in 0..path.len() {
        out.extend(f(path.state(i), fou.value(off + i)));
    }
    SamplePath::new(*path.grid(), path.dim(), out)
}

/// Solves the coupled RDE from the transformed initial state, maps it back to
/// SDE coordinates, and builds the averaged limit for comparison.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_coupled_sde(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    noise1: &SamplePath,
    noise2: &SamplePath,
    state0: &CoupledState,
    window: &TimeGrid,
) -> Result<CoupledSdeReconstruction> {
    let (off1, off2) = (fou_offset(fou1, window)?, fou_offset(fou2, window)?);
    let (o1, o2) = (fou1.value(off1), fou2.value(off2));
    let rde0 = CoupledState::new(cfg.channel1.to_rde(&state0.u, o1), cfg.channel2.to_rde(&state0.v, o2));
    let traj = integrate_coupled(cfg, fou1, fou2, &rde0, window)?;
    let x = map_path(&traj.u, fou1, off1, |u, o| cfg.channel1.from_rde(u, o))?;
    let y = map_path(&traj.v, fou2, off2, |v, o| cfg.channel2.from_rde(v, o))?;
    let w0: Vec<f64> = rde0.u.iter().zip(&rde0.v).map(|(a, b)| 0.5 * (a + b)).collect();
    let w = integrate_averaged(cfg, fou1, fou2, &w0, window)?;
    let x_limit = map_path(&w, fou1, off1, |w, o| cfg.channel1.from_rde(w, o))?;
    let y_limit = map_path(&w, fou2, off2, |w, o| cfg.channel2.from_rde(w, o))?;
    let eta = SamplePath::scalar(
        *window,
        (0..window.len())
            .map(|i| 0.5 * (cfg.channel1.rate(fou1.value(off1 + i)) - cfg.channel2.rate(fou2.value(off2 + i))))
            .collect(),
    )?;
    let direct = if cfg.kappa * window.step() <= 1.0 {
        Some(coupled_young_euler(cfg, fou1, fou2, noise1, noise2, state0, window)?)
    } else {
        None
    };
    Ok(CoupledSdeReconstruction {
        x,
        y,
        eta,
        w,
        x_limit,
        y_limit,
        direct,
    })
}

/// Explicit Young–Euler scheme for the coupled SDE in original coordinates.
pub fn coupled_young_euler(
    cfg: &CoupledConfig,
    fou1: &SamplePath,
    fou2: &SamplePath,
    noise1: &SamplePath,
    noise2: &SamplePath,
    state0: &CoupledState,
    window: &TimeGrid,
) -> Result<(SamplePath, SamplePath)> {
    let (off1, off2) = (fou_offset(fou1, window)?, fou_offset(fou2, window)?);
    let (n1, n2) = (noise1.grid().locate(window)?, noise2.grid().locate(window)?);
    let d = cfg.dim();
    let h = window.step();
    let (mut x, mut y) = (state0.u.clone(), state0.v.clone());
    let mut xs = x.clone();
    let mut ys = y.clone();
    for k in 0..window.n() {
        let (o1, o2) = (fou1.value(off1 + k), fou2.value(off2 + k));
        let fx = coupled_sde_drift(&cfg.drift_f, &cfg.channel1, &cfg.channel2, cfg.kappa, &x, &y, o1, o2);
        let fy = coupled_sde_drift(&cfg.drift_g, &cfg.channel2, &cfg.channel1, cfg.kappa, &y, &x, o2, o1);
        let db1 = noise1.value(n1 + k + 1) - noise1.value(n1 + k);
        let db2 = noise2.value(n2 + k + 1) - noise2.value(n2 + k);
        let (a1, a2) = (cfg.channel1.a(), cfg.channel2.a());
        let (b1, b2) = (cfg.channel1.b(), cfg.channel2.b());
        for i in 0..d {
            x[i] += fx[i] * h + (a1 * x[i] + b1[i]) * db1;
            y[i] += fy[i] * h + (a2 * y[i] + b2[i]) * db2;
        }
        let t = window.point(k + 1);
        guard_state(t, &x)?;
        guard_state(t, &y)?;
        xs.extend_from_slice(&x);
        ys.extend_from_slice(&y);
    }
    Ok((SamplePath::new(*window, d, xs)?, SamplePath::new(*window, d, ys)?))
}
