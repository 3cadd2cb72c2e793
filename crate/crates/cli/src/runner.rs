//! Runs one configured experiment and writes its artifacts.
//!
//! Every run writes, into the output directory:
//! - one CSV per table and one JSON file per verdict, named
//!   `{experiment}_seed{seed}_kappa{κ|all|none}_H1-{h1}_H2-{h2}_{part}`;
//! - the effective configuration;
//! - `manifest.json` listing every file above with its SHA-256.
//!
//! Nothing time- or host-dependent is written, so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use fracsync_core::io::{to_json_string, write_table_csv};
use fracsync_core::Verdict;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiments::{execute, Table};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("experiment failed to run: {0}")]
    Experiment(#[from] fracsync_core::Error),
    #[error("cannot write artifacts to {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub all_pass: bool,
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub verdicts: Vec<Verdict>,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// 0 when every verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

fn kappa_label(kappa: Option<f64>, coupled: bool) -> String {
    match kappa {
        Some(k) => format!("{k}"),
        None if coupled => "all".into(),
        None => "none".into(),
    }
}

/// Artifact file stem.
pub fn artifact_stem(cfg: &ExperimentConfig, kappa: Option<f64>) -> String {
    format!(
        "{}_seed{}_kappa{}_H1-{}_H2-{}",
        cfg.experiment.name(),
        cfg.seed,
        kappa_label(kappa, cfg.experiment.is_coupled()),
        cfg.h1().value(),
        cfg.h2().value()
    )
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Collector {
    dir: PathBuf,
    entries: Vec<(PathBuf, ManifestEntry)>,
}

impl Collector {
    fn write(&mut self, name: String, bytes: Vec<u8>) -> Result<(), RunError> {
        let path = self.dir.join(&name);
        fs::write(&path, &bytes).map_err(|source| RunError::Output { path: path.clone(), source })?;
        self.entries.push((
            path,
            ManifestEntry {
                file: name,
                bytes: bytes.len() as u64,
                sha256: sha256_hex(&bytes),
            },
        ));
        Ok(())
    }
}

fn table_bytes(table: &Table) -> Result<Vec<u8>, RunError> {
    let mut buf = Vec::new();
    write_table_csv(&mut buf, &table.header, table.rows.iter().cloned())?;
    Ok(buf)
}

/// Validates, runs and writes artifacts to `out_dir`. Verdict failures are
/// reported through [`RunOutcome::exit_code`], with all artifacts written.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let output = execute(cfg)?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut c = Collector {
        dir: out_dir.to_path_buf(),
        entries: Vec::new(),
    };
    for table in &output.tables {
        c.write(format!("{}_{}.csv", artifact_stem(cfg, table.kappa), table.name), table_bytes(table)?)?;
    }
    for v in &output.verdicts {
        let part = v.experiment.rsplit('/').next().unwrap_or("verdict");
        c.write(format!("{}_{part}_verdict.json", artifact_stem(cfg, None)), to_json_string(v)?.into_bytes())?;
    }
    let mut effective = cfg.clone();
    effective.output_dir = None;
    c.write(format!("{}_config.json", artifact_stem(cfg, None)), to_json_string(&effective)?.into_bytes())?;

    c.entries.sort_by(|a, b| a.1.file.cmp(&b.1.file));
    let manifest = Manifest {
        experiment: cfg.experiment.name().into(),
        seed: cfg.seed,
        all_pass: output.verdicts.iter().all(|v| v.pass),
        files: c.entries.iter().map(|e| e.1.clone()).collect(),
    };
    let mut files: Vec<PathBuf> = c.entries.into_iter().map(|e| e.0).collect();
    let manifest_path = out_dir.join(MANIFEST);
    fs::write(&manifest_path, to_json_string(&manifest)?).map_err(|source| RunError::Output {
        path: manifest_path.clone(),
        source,
    })?;
    files.push(manifest_path);
    Ok(RunOutcome {
        verdicts: output.verdicts,
        out_dir: out_dir.to_path_buf(),
        files,
    })
}

/// Output directory: explicit flag, then the config, then `FRACSYNC_OUT`,
/// then `./fracsync-out`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ExperimentConfig, env: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fracsync-out"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    #[test]
    fn stems_embed_run_identity() {
        let mut cfg = ExperimentConfig::preset(Experiment::SyncSweep);
        cfg.seed = 42;
        assert_eq!(artifact_stem(&cfg, Some(10.0)), "sync-sweep_seed42_kappa10_H1-0.75_H2-0.6");
        assert_eq!(artifact_stem(&cfg, None), "sync-sweep_seed42_kappaall_H1-0.75_H2-0.6");
        let cfg = ExperimentConfig::preset(Experiment::Fou);
        assert_eq!(artifact_stem(&cfg, None), "fou_seed0_kappanone_H1-0.75_H2-0.75");
    }

    #[test]
    fn out_dir_precedence() {
        let mut cfg = ExperimentConfig::preset(Experiment::Fou);
        assert_eq!(resolve_out_dir(None, &cfg, None), PathBuf::from("fracsync-out"));
        assert_eq!(resolve_out_dir(None, &cfg, Some("env")), PathBuf::from("env"));
        cfg.output_dir = Some("cfg".into());
        assert_eq!(resolve_out_dir(None, &cfg, Some("env")), PathBuf::from("cfg"));
        assert_eq!(resolve_out_dir(Some(Path::new("flag")), &cfg, Some("env")), PathBuf::from("flag"));
    }
}
