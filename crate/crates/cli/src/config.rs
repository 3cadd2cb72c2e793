//! Experiment configuration: JSON schema, defaults and validation.

use std::path::{Path, PathBuf};

use fracsync_core::{
    DriftCatalog, FouConfig, HurstParameter, LinearNoiseCoeffs, NoiseChannel, TimeGrid,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GenerateFbm,
    Fou,
    Equivalence,
    Contraction,
    Pullback,
    SyncSweep,
    AveragedSweep,
    EigenComparison,
    CaseMultiplicative,
    CaseMixed,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::GenerateFbm => "generate-fbm",
            Self::Fou => "fou",
            Self::Equivalence => "equivalence",
            Self::Contraction => "contraction",
            Self::Pullback => "pullback",
            Self::SyncSweep => "sync-sweep",
            Self::AveragedSweep => "averaged-sweep",
            Self::EigenComparison => "eigen-comparison",
            Self::CaseMultiplicative => "case-multiplicative",
            Self::CaseMixed => "case-mixed",
        }
    }

    /// Experiments that integrate the coupled pair.
    pub fn is_coupled(self) -> bool {
        matches!(
            self,
            Self::SyncSweep | Self::AveragedSweep | Self::EigenComparison | Self::CaseMultiplicative | Self::CaseMixed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HurstSpec {
    pub h1: f64,
    /// Defaults to `h1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<f64>,
}

impl Default for HurstSpec {
    fn default() -> Self {
        Self { h1: 0.75, h2: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub channel1: NoiseChannel,
    /// Defaults to `channel1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel2: Option<NoiseChannel>,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            channel1: LinearNoiseCoeffs::new(1.0, vec![0.5]).expect("valid default").into(),
            channel2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSpecs {
    pub f: DriftCatalog,
    /// Defaults to `f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<DriftCatalog>,
}

impl Default for DriftSpecs {
    fn default() -> Self {
        Self {
            f: DriftCatalog::Affine { rate: 1.0, offset: vec![1.0] },
            g: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Start of subsystem 1 (or the first of a pair), in SDE coordinates for
    /// `equivalence` and RDE coordinates otherwise.
    pub x0: Vec<f64>,
    /// Start of subsystem 2 (or the second of a pair).
    pub y0: Vec<f64>,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self {
            x0: vec![1.0],
            y0: vec![-1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackSpec {
    pub start_times: Vec<f64>,
    pub radius0: f64,
}

impl Default for PullbackSpec {
    fn default() -> Self {
        Self {
            start_times: vec![-5.0, -10.0, -20.0],
            radius0: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceSpec {
    /// Hölder exponent of the self-refinement envelope.
    pub alpha: f64,
}

impl Default for EquivalenceSpec {
    fn default() -> Self {
        Self { alpha: 0.7 }
    }
}

fn one() -> usize {
    1
}

fn default_kappas() -> Vec<f64> {
    vec![1.0, 10.0, 100.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    /// Ensemble size.
    #[serde(default = "one")]
    pub trials: usize,
    pub grid: GridSpec,
    #[serde(default)]
    pub hurst: HurstSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub drift: DriftSpecs,
    #[serde(default = "default_kappas")]
    pub kappas: Vec<f64>,
    #[serde(default)]
    pub fou: FouConfig,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub pullback: PullbackSpec,
    #[serde(default)]
    pub equivalence: EquivalenceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(".", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Small defaults for each experiment, used by the subcommands.
    pub fn preset(experiment: Experiment) -> Self {
        let grid = match experiment {
            Experiment::GenerateFbm => GridSpec { t0: 0.0, t1: 1.0, n: 1024 },
            Experiment::Fou => GridSpec { t0: 0.0, t1: 100.0, n: 10_000 },
            Experiment::Equivalence => GridSpec { t0: 0.0, t1: 1.0, n: 1024 },
            Experiment::Pullback => GridSpec { t0: -20.0, t1: 0.0, n: 5120 },
            _ => GridSpec { t0: 0.0, t1: 20.0, n: 5120 },
        };
        let noise = match experiment {
            Experiment::CaseMultiplicative => NoiseSpec {
                channel1: LinearNoiseCoeffs::new(1.0, vec![0.0]).expect("valid").into(),
                channel2: Some(LinearNoiseCoeffs::new(0.5, vec![0.0]).expect("valid").into()),
            },
            Experiment::CaseMixed => NoiseSpec {
                channel1: LinearNoiseCoeffs::new(1.0, vec![0.5]).expect("valid").into(),
                channel2: Some(NoiseChannel::additive(vec![0.5]).expect("valid")),
            },
            e if e.is_coupled() => NoiseSpec {
                channel1: LinearNoiseCoeffs::new(1.0, vec![0.5]).expect("valid").into(),
                channel2: Some(LinearNoiseCoeffs::new(0.5, vec![-0.5]).expect("valid").into()),
            },
            _ => NoiseSpec::default(),
        };
        let drift = if experiment.is_coupled() {
            DriftSpecs {
                f: DriftCatalog::Affine { rate: 1.0, offset: vec![1.0] },
                g: Some(DriftCatalog::Affine { rate: 1.0, offset: vec![-1.0] }),
            }
        } else if experiment == Experiment::Contraction {
            DriftSpecs {
                f: DriftCatalog::CubicDissipative,
                g: None,
            }
        } else {
            DriftSpecs::default()
        };
        let initial = if experiment == Experiment::Equivalence {
            InitialSpec { x0: vec![0.0], y0: vec![0.0] }
        } else {
            InitialSpec::default()
        };
        Self {
            experiment,
            seed: 0,
            trials: 10,
            grid,
            hurst: HurstSpec {
                h1: 0.75,
                h2: experiment.is_coupled().then_some(0.6),
            },
            noise,
            drift,
            kappas: default_kappas(),
            fou: FouConfig::default(),
            initial,
            pullback: PullbackSpec::default(),
            equivalence: EquivalenceSpec::default(),
            output_dir: None,
        }
    }

    pub fn window(&self) -> TimeGrid {
        TimeGrid::new(self.grid.t0, self.grid.t1, self.grid.n).expect("validated grid")
    }

    pub fn h1(&self) -> HurstParameter {
        HurstParameter::new(self.hurst.h1).expect("validated Hurst index")
    }

    pub fn h2(&self) -> HurstParameter {
        HurstParameter::new(self.hurst.h2.unwrap_or(self.hurst.h1)).expect("validated Hurst index")
    }

    pub fn channel2(&self) -> &NoiseChannel {
        self.noise.channel2.as_ref().unwrap_or(&self.noise.channel1)
    }

    pub fn drift_g(&self) -> &DriftCatalog {
        self.drift.g.as_ref().unwrap_or(&self.drift.f)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        if !(g.t0.is_finite() && g.t1.is_finite() && g.t1 > g.t0) {
            return Err(ConfigError::new("grid", format!("need finite t0 < t1, got [{}, {}]", g.t0, g.t1)));
        }
        if g.n == 0 {
            return Err(ConfigError::new("grid.n", "must be positive"));
        }
        TimeGrid::new(g.t0, g.t1, g.n).map_err(|e| ConfigError::new("grid", e))?;
        if self.trials == 0 {
            return Err(ConfigError::new("trials", "must be positive"));
        }
        HurstParameter::new(self.hurst.h1).map_err(|e| ConfigError::new("hurst.h1", e))?;
        if let Some(h2) = self.hurst.h2 {
            HurstParameter::new(h2).map_err(|e| ConfigError::new("hurst.h2", e))?;
        }
        self.fou.validate().map_err(|e| ConfigError::new("fou", e))?;
        let d = self.noise.channel1.dim();
        let f = self.drift.f.build().map_err(|e| ConfigError::new("drift.f", e))?;
        self.drift_g().build().map_err(|e| ConfigError::new("drift.g", e))?;
        for (path, catalog) in [("drift.f", &self.drift.f), ("drift.g", self.drift_g())] {
            if let DriftCatalog::Affine { offset, .. } = catalog {
                if offset.len() != 1 && offset.len() != d {
                    return Err(ConfigError::new(path, format!("offset has {} entries, state dimension is {d}", offset.len())));
                }
            }
        }
        if self.channel2().dim() != d {
            return Err(ConfigError::new("noise.channel2", format!("dimension {} differs from channel1 dimension {d}", self.channel2().dim())));
        }
        for (path, x) in [("initial.x0", &self.initial.x0), ("initial.y0", &self.initial.y0)] {
            if x.len() != d || x.iter().any(|v| !v.is_finite()) {
                return Err(ConfigError::new(path, format!("need {d} finite entries")));
            }
        }
        let e = self.experiment;
        if self.kappas.is_empty() || self.kappas.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(ConfigError::new("kappas", "need positive finite coupling strengths"));
        }
        if self.kappas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::new("kappas", "must be strictly increasing"));
        }
        match e {
            Experiment::Equivalence | Experiment::Contraction | Experiment::Pullback | Experiment::Fou => {
                if matches!(self.noise.channel1, NoiseChannel::Additive { .. }) && e != Experiment::Fou {
                    return Err(ConfigError::new("noise.channel1", "this experiment needs linear multiplicative noise"));
                }
            }
            Experiment::CaseMultiplicative => {
                for (path, ch) in [("noise.channel1", &self.noise.channel1), ("noise.channel2", self.channel2())] {
                    if !matches!(ch, NoiseChannel::Linear(c) if c.b().iter().all(|&b| b == 0.0)) {
                        return Err(ConfigError::new(path, "multiplicative case needs b = 0"));
                    }
                }
            }
            Experiment::CaseMixed => {
                if !matches!(self.noise.channel1, NoiseChannel::Linear(_)) {
                    return Err(ConfigError::new("noise.channel1", "mixed case needs linear multiplicative noise here"));
                }
                if !matches!(self.channel2(), NoiseChannel::Additive { .. }) {
                    return Err(ConfigError::new("noise.channel2", "mixed case needs additive noise here"));
                }
            }
            _ => {}
        }
        match e {
            Experiment::Fou if g.t0 != 0.0 => {
                return Err(ConfigError::new("grid.t0", "ergodic averages run from t = 0"));
            }
            Experiment::Pullback => {
                if g.t1 != 0.0 {
                    return Err(ConfigError::new("grid.t1", "pullback windows end at t = 0"));
                }
                let w = self.window();
                if self.pullback.start_times.is_empty() {
                    return Err(ConfigError::new("pullback.start_times", "need at least one start time"));
                }
                for (i, &s) in self.pullback.start_times.iter().enumerate() {
                    if !(s < 0.0) || w.index_of(s).is_none() {
                        return Err(ConfigError::new(
                            format!("pullback.start_times[{i}]"),
                            format!("{s} must be a negative grid point of [{}, 0]", g.t0),
                        ));
                    }
                }
                if !(self.pullback.radius0 >= 0.0 && self.pullback.radius0.is_finite()) {
                    return Err(ConfigError::new("pullback.radius0", "must be finite and nonnegative"));
                }
            }
            Experiment::Equivalence => {
                let a = self.equivalence.alpha;
                if !(a > 0.5 && a < 1.0) {
                    return Err(ConfigError::new("equivalence.alpha", format!("must lie in (1/2, 1), got {a}")));
                }
                if g.n < 2 {
                    return Err(ConfigError::new("grid.n", "equivalence needs at least two steps"));
                }
            }
            Experiment::Contraction if self.initial.x0 == self.initial.y0 => {
                return Err(ConfigError::new("initial", "contraction needs two distinct starts"));
            }
            _ => {}
        }
        if e.is_coupled() || e == Experiment::Contraction {
            let l = f.dissipativity_l();
            if !(l > 0.0) {
                return Err(ConfigError::new("drift.f", "drift must be dissipative"));
            }
        }
        Ok(())
    }
}
