//! Run configuration, read from TOML.
//!
//! ```toml
//! [data]
//! epsilon = 1.0
//! bins = 8
//!
//! [model]
//! batch_size = 32
//!
//! [run]
//! models = ["mlp", "rmtnet"]
//!
//! [bench]
//! seeds = [0, 1, 2]
//! epsilons = [1.0, 0.5]
//! ```
//!
//! Every key is optional. `[model]` takes the fields of [`ModelConfig`].

use std::path::{Path, PathBuf};

use rmtnet::data::{SplitMode, SyntheticSpec, DEFAULT_BINS};
use rmtnet::models::{ModelConfig, ModelKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Feature table to load instead of generating one. With an `r` column it
    /// is used as is; otherwise its `y` column drives the policy simulation.
    pub csv: Option<PathBuf>,
    pub n: usize,
    pub d: usize,
    pub noise: f64,
    pub signal: f64,
    pub base_rate: f64,
    pub correlation: f64,
    pub epsilon: f64,
    pub bins: usize,
    /// Independent simulated policies, one per equal random subset.
    pub policies: usize,
    pub mode: SplitMode,
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        let spec = SyntheticSpec::default();
        DataConfig {
            csv: None,
            n: spec.n,
            d: spec.d,
            noise: spec.noise,
            signal: spec.signal,
            base_rate: spec.base_rate,
            correlation: spec.correlation,
            epsilon: 1.0,
            bins: DEFAULT_BINS,
            policies: 1,
            mode: SplitMode::ApprovalRejection,
            seed: 0,
        }
    }
}

impl DataConfig {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            n: self.n,
            d: self.d,
            noise: self.noise,
            signal: self.signal,
            base_rate: self.base_rate,
            correlation: self.correlation,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Learners fitted by `train` and scored by `evaluate` and `bench`.
    pub models: Vec<ModelKind>,
    /// Points of the gate curve written by `train`.
    pub gate_grid: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            models: vec![ModelKind::RmtNet],
            gate_grid: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub seeds: Vec<u64>,
    /// One benchmark variant per value; overrides `data.epsilon`.
    pub epsilons: Vec<f64>,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            seeds: (0..10).collect(),
            epsilons: vec![1.0, 0.5],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    pub model: ModelConfig,
    pub run: RunSection,
    pub bench: BenchSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = RunConfig::from_toml(&text)?;
        if let Some(csv) = &config.data.csv {
            if csv.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new("."));
                config.data.csv = Some(base.join(csv));
            }
        }
        Ok(config)
    }

    /// Sets the data and model seeds together.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.data.seed = seed;
        self.model.seed = seed;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.data.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.run.models.is_empty() {
            return Err(CliError::Usage("run.models is empty".into()));
        }
        if self.data.policies == 0 {
            return Err(CliError::Usage("data.policies must be at least 1".into()));
        }
        if self.bench.seeds.is_empty() || self.bench.epsilons.is_empty() {
            return Err(CliError::Usage(
                "bench.seeds and bench.epsilons must be non-empty".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.data.bins, 32);
        assert_eq!(c.model.layers, 2);
    }

    #[test]
    fn sections_parse() {
        let c = RunConfig::from_toml(
            "[data]\nepsilon = 0.5\nmode = \"approval-only\"\n[model]\nbatch_size = 32\n[run]\nmodels = [\"mlp\", \"rmtnetpp\"]\n",
        )
        .unwrap();
        assert_eq!(c.data.epsilon, 0.5);
        assert_eq!(c.data.mode, SplitMode::ApprovalOnly);
        assert_eq!(c.model.batch_size, 32);
        assert_eq!(c.run.models, vec![ModelKind::Mlp, ModelKind::RmtNetPp]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[model]\nlearning_rat = 0.1\n").is_err());
        assert!(RunConfig::from_toml("[run]\nmodels = [\"xgb\"]\n").is_err());
        assert!(RunConfig::from_toml("[model]\neta = 2.0\n").is_err());
    }
}
