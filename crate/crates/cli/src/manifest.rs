//! Run manifests: everything needed to reproduce a run's outputs.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use lmsf_core::experiment::ExperimentConfig;

/// The resolved command a run executed. Replaying it reproduces every
/// data file byte for byte (the manifest itself re-records wall-clock time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandSpec {
    Compare {
        config: ExperimentConfig,
        tail_fraction: f64,
    },
    Sweep {
        config: ExperimentConfig,
        target: SweepTarget,
        grid: Vec<f64>,
        tail_fraction: f64,
    },
    Theory {
        base: TheoryBase,
        param: TheoryParam,
        grid: Vec<f64>,
    },
    Channel {
        n: usize,
        k: usize,
        seed: u64,
        preset: Option<String>,
        normalize: bool,
    },
}

impl CommandSpec {
    pub fn master_seed(&self) -> u64 {
        match self {
            CommandSpec::Compare { config, .. } | CommandSpec::Sweep { config, .. } => {
                config.master_seed
            }
            CommandSpec::Theory { .. } => 0,
            CommandSpec::Channel { seed, .. } => *seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTarget {
    RhoZa,
    RhoRza,
    Epsilon,
}

impl SweepTarget {
    pub fn file_stem(self) -> &'static str {
        match self {
            SweepTarget::RhoZa => "rho_za",
            SweepTarget::RhoRza => "rho_rza",
            SweepTarget::Epsilon => "epsilon",
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            SweepTarget::RhoZa => "rho_za",
            SweepTarget::RhoRza => "rho_rza",
            SweepTarget::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoryParam {
    Lambda,
    Mu,
    MuS,
    GammaZa,
    SnrDb,
    K,
    N,
}

impl TheoryParam {
    pub fn column(self) -> &'static str {
        match self {
            TheoryParam::Lambda => "lambda",
            TheoryParam::Mu => "mu",
            TheoryParam::MuS => "mu_s",
            TheoryParam::GammaZa => "gamma_za",
            TheoryParam::SnrDb => "snr_db",
            TheoryParam::K => "k",
            TheoryParam::N => "n",
        }
    }
}

/// Baseline theory parameters a table row perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryBase {
    pub mu: f64,
    pub mu_s: f64,
    pub lambda: f64,
    pub n: usize,
    pub k: usize,
    pub sigma_x_sq: f64,
    pub sigma_n_sq: f64,
    pub gamma_za: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub command: CommandSpec,
    pub master_seed: u64,
    /// Data files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&raw)
            .with_context(|| format!("cannot parse manifest {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut raw = serde_json::to_string_pretty(self).context("serialize manifest")?;
        raw.push('\n');
        std::fs::write(path, raw).with_context(|| format!("cannot write {}", path.display()))
    }
}
