//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fracsync_core::{DriftCatalog, LinearNoiseCoeffs, NoiseChannel};

use crate::config::{ConfigError, Experiment, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "fracsync", version, about = "Synchronization experiments for SDEs driven by fractional noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output directory (default: config `output_dir`, then $FRACSYNC_OUT, then ./fracsync-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for ensembles; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Replaces the configured seed.
    #[arg(long, global = true)]
    pub seed_override: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Sample fBm; check covariance and variogram slope.
    GenerateFbm(Overrides),
    /// Stationary fOU; check the ergodic average.
    Fou(Overrides),
    /// Direct Young–Euler solve against the transformed RDE solve.
    Equivalence(Overrides),
    /// Contraction rate of a single system.
    Contraction(Overrides),
    /// Pullback cloud diameters.
    Pullback(Overrides),
    /// Steady synchronization gap over the coupling strengths.
    SyncSweep(Overrides),
    /// Distance of the coupled midpoint to the averaged solution.
    AveragedSweep(Overrides),
    /// Eigenvalues of the integrated contraction matrix and comparison bound.
    EigenComparison(Overrides),
    /// All coupled checks with b₁ = b₂ = 0.
    CaseMultiplicative(Overrides),
    /// All coupled checks with additive noise on subsystem 2.
    CaseMixed(Overrides),
}

/// Comma-separated floats. Aliased so clap parses it as one value.
type Floats = Vec<f64>;

fn parse_list(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

/// Flag equivalents of the config fields; unset flags keep the preset (or
/// `--config`) value.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Base config; the subcommand still fixes the experiment.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub h1: Option<f64>,
    #[arg(long)]
    pub h2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub b1: Option<Floats>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<f64>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub b2: Option<Floats>,
    /// Make subsystem 2's noise additive (`b₂ dB`).
    #[arg(long)]
    pub additive2: bool,
    /// Drift of subsystem 1: linear, affine or cubic-dissipative.
    #[arg(long)]
    pub drift_f: Option<String>,
    #[arg(long)]
    pub drift_g: Option<String>,
    #[arg(long)]
    pub rate_f: Option<f64>,
    #[arg(long)]
    pub rate_g: Option<f64>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub offset_f: Option<Floats>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub offset_g: Option<Floats>,
    #[arg(long, value_parser = parse_list)]
    pub kappas: Option<Floats>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub tail_length: Option<f64>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub x0: Option<Floats>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub y0: Option<Floats>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub start_times: Option<Floats>,
    #[arg(long)]
    pub radius0: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

fn drift(path: &str, kind: Option<&str>, current: &DriftCatalog, rate: Option<f64>, offset: Option<&Vec<f64>>) -> Result<DriftCatalog, ConfigError> {
    let kind = kind.unwrap_or(match current {
        DriftCatalog::Linear { .. } => "linear",
        DriftCatalog::Affine { .. } => "affine",
        DriftCatalog::CubicDissipative => "cubic-dissipative",
    });
    let (cur_rate, cur_offset) = match current {
        DriftCatalog::Linear { rate } => (*rate, None),
        DriftCatalog::Affine { rate, offset } => (*rate, Some(offset.clone())),
        DriftCatalog::CubicDissipative => (1.0, None),
    };
    let rate = rate.unwrap_or(cur_rate);
    Ok(match kind {
        "linear" => DriftCatalog::Linear { rate },
        "affine" => DriftCatalog::Affine {
            rate,
            offset: offset.cloned().or(cur_offset).unwrap_or_else(|| vec![1.0]),
        },
        "cubic-dissipative" => DriftCatalog::CubicDissipative,
        other => return Err(ConfigError::new(path, format!("unknown drift `{other}` (linear, affine, cubic-dissipative)"))),
    })
}

fn channel(path: &str, current: &NoiseChannel, a: Option<f64>, b: Option<&Vec<f64>>, additive: bool) -> Result<NoiseChannel, ConfigError> {
    let b = b.cloned().unwrap_or_else(|| current.b().to_vec());
    if additive {
        return NoiseChannel::additive(b).map_err(|e| ConfigError::new(path, e));
    }
    // An additive channel turned linear without `--a*` gets a = 1.
    let a = a.unwrap_or(match current {
        NoiseChannel::Linear(c) => c.a(),
        NoiseChannel::Additive { .. } => 1.0,
    });
    LinearNoiseCoeffs::new(a, b).map(Into::into).map_err(|e| ConfigError::new(path, e))
}

impl Overrides {
    /// Preset (or `--config`) for `experiment` with the given flags applied.
    pub fn build(&self, experiment: Experiment) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_path(p)?,
            None => ExperimentConfig::preset(experiment),
        };
        cfg.experiment = experiment;
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.t0 {
            cfg.grid.t0 = v;
        }
        if let Some(v) = self.t1 {
            cfg.grid.t1 = v;
        }
        if let Some(v) = self.n {
            cfg.grid.n = v;
        }
        if let Some(v) = self.h1 {
            cfg.hurst.h1 = v;
        }
        if let Some(v) = self.h2 {
            cfg.hurst.h2 = Some(v);
        }
        if self.a1.is_some() || self.b1.is_some() {
            cfg.noise.channel1 = channel("noise.channel1", &cfg.noise.channel1, self.a1, self.b1.as_ref(), false)?;
        }
        if self.a2.is_some() || self.b2.is_some() || self.additive2 {
            let cur = cfg.channel2().clone();
            cfg.noise.channel2 = Some(channel("noise.channel2", &cur, self.a2, self.b2.as_ref(), self.additive2)?);
        }
        if self.drift_f.is_some() || self.rate_f.is_some() || self.offset_f.is_some() {
            cfg.drift.f = drift("drift.f", self.drift_f.as_deref(), &cfg.drift.f, self.rate_f, self.offset_f.as_ref())?;
        }
        if self.drift_g.is_some() || self.rate_g.is_some() || self.offset_g.is_some() {
            let cur = cfg.drift_g().clone();
            cfg.drift.g = Some(drift("drift.g", self.drift_g.as_deref(), &cur, self.rate_g, self.offset_g.as_ref())?);
        }
        if let Some(v) = &self.kappas {
            cfg.kappas = v.clone();
        }
        if let Some(v) = self.nu {
            cfg.fou.nu = v;
        }
        if let Some(v) = self.tail_length {
            cfg.fou.tail_length = v;
        }
        if let Some(v) = &self.x0 {
            cfg.initial.x0 = v.clone();
        }
        if let Some(v) = &self.y0 {
            cfg.initial.y0 = v.clone();
        }
        if let Some(v) = &self.start_times {
            cfg.pullback.start_times = v.clone();
        }
        if let Some(v) = self.radius0 {
            cfg.pullback.radius0 = v;
        }
        if let Some(v) = self.alpha {
            cfg.equivalence.alpha = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Command {
    /// The effective config of this invocation.
    pub fn config(&self) -> Result<ExperimentConfig, ConfigError> {
        let (e, o) = match self {
            Self::Run { config } => return ExperimentConfig::from_path(config),
            Self::GenerateFbm(o) => (Experiment::GenerateFbm, o),
            Self::Fou(o) => (Experiment::Fou, o),
            Self::Equivalence(o) => (Experiment::Equivalence, o),
            Self::Contraction(o) => (Experiment::Contraction, o),
            Self::Pullback(o) => (Experiment::Pullback, o),
            Self::SyncSweep(o) => (Experiment::SyncSweep, o),
            Self::AveragedSweep(o) => (Experiment::AveragedSweep, o),
            Self::EigenComparison(o) => (Experiment::EigenComparison, o),
            Self::CaseMultiplicative(o) => (Experiment::CaseMultiplicative, o),
            Self::CaseMixed(o) => (Experiment::CaseMixed, o),
        };
        o.build(e)
    }
}
