//! Experiment configuration: a versioned TOML schema with unknown-key
//! rejection, plus the content hashes used to key artifact caching.

use crate::channel::{make_bec, make_bsc, BinaryInputDMC, WiretapSystem};
use crate::construction::{ConstructionParams, ThresholdMode};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub system: SystemSpec,
    pub code: CodeSpec,
    #[serde(default)]
    pub construction: ConstructionSpec,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub leakage: LeakageSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default = "default_prior")]
    pub prior_v: f64,
    #[serde(default)]
    pub prefix: Option<[[f64; 2]; 2]>,
    pub main: ChannelSpec,
    pub eve: ChannelSpec,
}

fn default_prior() -> f64 {
    0.5
}

/// Channel spec: kind = bec | bsc | matrix; matrix rows are row-major
/// transition probabilities, one row per input bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Bec { epsilon: f64 },
    Bsc { p: f64 },
    Matrix { rows: Vec<Vec<f64>> },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<BinaryInputDMC> {
        match self {
            ChannelSpec::Bec { epsilon } => make_bec(*epsilon),
            ChannelSpec::Bsc { p } => make_bsc(*p),
            ChannelSpec::Matrix { rows } => {
                if rows.len() != 2 {
                    return Err(Error::Config(format!(
                        "matrix channel needs 2 rows, got {}",
                        rows.len()
                    )));
                }
                BinaryInputDMC::new(rows[0].clone(), rows[1].clone())
            }
        }
    }

    pub fn is_bec(&self) -> bool {
        matches!(self, ChannelSpec::Bec { .. })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileChoice {
    Auto,
    ExactBec,
    BruteForce,
    ExactSc,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructionSpec {
    pub mode: ThresholdMode,
    pub beta: f64,
    pub target_secret_rate: f64,
    pub reliability_threshold: f64,
    pub mc_samples: usize,
    pub profile: ProfileChoice,
}

impl Default for ConstructionSpec {
    fn default() -> Self {
        let p = ConstructionParams::default();
        Self {
            mode: p.mode,
            beta: p.beta,
            target_secret_rate: p.target_secret_rate,
            reliability_threshold: p.reliability_threshold,
            mc_samples: p.mc_samples,
            profile: ProfileChoice::Auto,
        }
    }
}

impl ConstructionSpec {
    pub fn params(&self) -> ConstructionParams {
        ConstructionParams {
            mode: self.mode,
            beta: self.beta,
            target_secret_rate: self.target_secret_rate,
            reliability_threshold: self.reliability_threshold,
            mc_samples: self.mc_samples,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSpec {
    pub trials: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageMode {
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LeakageSpec {
    pub mode: LeakageMode,
    pub samples: usize,
    /// Enumeration budget in table cells (2^{message bits} * K^{symbols}).
    pub budget: u64,
    pub shared_seeds: Vec<u64>,
}

impl Default for LeakageSpec {
    fn default() -> Self {
        Self {
            mode: LeakageMode::Auto,
            samples: 100_000,
            budget: 1 << 26,
            shared_seeds: crate::analysis::LEAKAGE_SHARED_SEEDS.to_vec(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{path:?}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.build_system()?;
        self.construction.params().validate()?;
        crate::polar::PolarParams::new(self.code.n)?;
        if self.code.m < 2 {
            return Err(Error::Config(format!(
                "m = {} but chaining needs m >= 2",
                self.code.m
            )));
        }
        if self.leakage.shared_seeds.is_empty() {
            return Err(Error::Config("leakage.shared_seeds must be nonempty".into()));
        }
        Ok(())
    }

    pub fn build_system(&self) -> Result<WiretapSystem> {
        WiretapSystem::new(
            self.system.prior_v,
            self.system.prefix,
            self.system.main.build()?,
            self.system.eve.build()?,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// Hash over the fields that determine construction artifacts.
    pub fn construction_hash(&self) -> String {
        let key = serde_json::to_string(&(&self.system, &self.code, &self.construction))
            .expect("config serializes");
        hex_sha256(key.as_bytes())
    }

    /// Hash over the entire config, embedded in every report.
    pub fn config_hash(&self) -> String {
        let key = serde_json::to_string(self).expect("config serializes");
        hex_sha256(key.as_bytes())
    }
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
