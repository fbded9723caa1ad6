//! Experiment runner: configuration, dispatch, CSV/SVG output and run
//! manifests.

mod config;
mod experiments;
mod manifest;
mod output;
mod params;
mod pipeline;

pub use config::ConfigFile;
pub use manifest::{Check, OutputDigest, RunManifest, StageRecord, StageStatus};
pub use output::{sha256_hex, svg_plot, write_atomic, Cell, Csv, Series};
pub use params::{param_specs, ParamSpec, Params};
pub use pipeline::emergence_pipeline;

use std::fmt::Display;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("unknown key `{key}` for experiment {experiment}")]
    UnknownKey { key: String, experiment: String },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{context}: {message}")]
    Module { context: String, message: String },
}

impl HarnessError {
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            HarnessError::Usage(_) | HarnessError::UnknownKey { .. } | HarnessError::Config { .. }
        )
    }

    /// Process exit code: `2` for usage errors, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_usage() {
            2
        } else {
            1
        }
    }
}

pub(crate) trait Context<T> {
    fn context(self, what: &str) -> Result<T, HarnessError>;
}

impl<T, E: Display> Context<T> for Result<T, E> {
    fn context(self, what: &str) -> Result<T, HarnessError> {
        self.map_err(|e| HarnessError::Module {
            context: what.to_string(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Classical,
    Langevin,
    FokkerPlanck,
    PathMc,
    OsCheck,
    Pipeline,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Classical,
        Experiment::Langevin,
        Experiment::FokkerPlanck,
        Experiment::PathMc,
        Experiment::OsCheck,
        Experiment::Pipeline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Classical => "classical",
            Experiment::Langevin => "langevin",
            Experiment::FokkerPlanck => "fokker-planck",
            Experiment::PathMc => "path-mc",
            Experiment::OsCheck => "os-check",
            Experiment::Pipeline => "pipeline",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// A validated experiment run request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new<'a, I>(experiment: Experiment, overrides: I, seed: u64, out_dir: impl Into<PathBuf>) -> Result<Self, HarnessError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        Ok(Self {
            experiment,
            params: Params::resolve(experiment, overrides)?,
            seed,
            out_dir: out_dir.into(),
        })
    }
}

/// Runs one experiment, writes its outputs under `config.out_dir` and
/// returns the manifest. The manifest file itself is written by
/// [`write_manifest`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunManifest, HarnessError> {
    let start = Instant::now();
    let mut out = output::OutputSet::new(config.out_dir.clone());
    let p = &config.params;
    let mut stages = Vec::new();
    let checks = match config.experiment {
        Experiment::Classical => experiments::classical(p, &mut out)?,
        Experiment::Langevin => experiments::langevin(p, config.seed, &mut out)?,
        Experiment::FokkerPlanck => experiments::fokker_planck(p, &mut out)?,
        Experiment::PathMc => experiments::path_mc(p, config.seed, &mut out)?,
        Experiment::OsCheck => experiments::os_check(p, config.seed, &mut out)?,
        Experiment::Pipeline => {
            let (c, s) = pipeline::run(p, config.seed, &mut out)?;
            stages = s;
            c
        }
    };
    Ok(RunManifest {
        tool: "emergence".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: config.experiment.name().into(),
        seed: config.seed,
        out_dir: config.out_dir.display().to_string(),
        config: p.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
        checks,
        stages,
        outputs: out
            .files
            .into_iter()
            .map(|(file, sha256)| OutputDigest { file, sha256 })
            .collect(),
    })
}

/// Writes `manifest.json` or `manifest.txt` next to the outputs.
pub fn write_manifest(manifest: &RunManifest, json: bool) -> Result<PathBuf, HarnessError> {
    let dir = PathBuf::from(&manifest.out_dir);
    let (name, body) = if json {
        ("manifest.json", manifest.to_json())
    } else {
        ("manifest.txt", manifest.to_text())
    };
    let path = dir.join(name);
    write_atomic(&path, body.as_bytes())?;
    Ok(path)
}
