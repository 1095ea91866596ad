use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six learners the harness can train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Mlp,
    /// Self-training on top of [`ModelConfig::base`].
    St,
    /// Inverse-propensity reweighting on top of [`ModelConfig::base`].
    Ips,
    RmtNet,
    RmtNetPp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Lr,
        ModelKind::Mlp,
        ModelKind::St,
        ModelKind::Ips,
        ModelKind::RmtNet,
        ModelKind::RmtNetPp,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::Mlp => "mlp",
            ModelKind::St => "st",
            ModelKind::Ips => "ips",
            ModelKind::RmtNet => "rmtnet",
            ModelKind::RmtNetPp => "rmtnetpp",
        }
    }

    /// Row label used in comparison tables, e.g. `ST+MLP`.
    pub fn display_name(self, base: BaseLearner) -> String {
        match self {
            ModelKind::Lr => "LR".into(),
            ModelKind::Mlp => "MLP".into(),
            ModelKind::St => format!("ST+{}", base.display_name()),
            ModelKind::Ips => format!("IPS+{}", base.display_name()),
            ModelKind::RmtNet => "RMT-Net".into(),
            ModelKind::RmtNetPp => "RMT-Net++".into(),
        }
    }

    pub fn is_multi_task(self) -> bool {
        matches!(self, ModelKind::RmtNet | ModelKind::RmtNetPp)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.key() == s)
            .ok_or_else(|| Error::Config(format!("unknown model kind `{s}`")))
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

/// Learner wrapped by self-training and IPS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseLearner {
    Lr,
    Mlp,
}

impl BaseLearner {
    pub fn display_name(self) -> &'static str {
        match self {
            BaseLearner::Lr => "LR",
            BaseLearner::Mlp => "MLP",
        }
    }
}

/// Hyperparameters shared by every learner. Fields a learner does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Embedding width per feature (`k`).
    pub embedding_dim: usize,
    /// Width of every hidden layer.
    pub hidden: usize,
    /// Layers per tower including the output layer (`t`).
    pub layers: usize,
    /// Weight of the default loss against the rejection loss.
    pub eta: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub patience: usize,
    /// Rows per optimizer step; 0 means the whole training set.
    pub batch_size: usize,
    pub seed: u64,
    /// Policy count for the multi-policy network; 0 takes it from the dataset.
    pub policies: usize,
    /// Let the default loss reach the rejection towers through the gate input.
    pub share_gradient_through_gate: bool,
    /// Train each rejection head only on rows of its own policy.
    pub strict_policy_heads: bool,
    pub base: BaseLearner,
    pub st_rounds: usize,
    pub st_add_fraction: f64,
    pub ips_max_weight: f64,
    pub propensity_epochs: usize,
    pub propensity_learning_rate: f64,
    /// Rows per step when fitting the propensity model; 0 means full batch.
    pub propensity_batch_size: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embedding_dim: 4,
            hidden: 16,
            layers: 2,
            eta: 0.5,
            learning_rate: 1e-3,
            epochs: 500,
            patience: 10,
            batch_size: 0,
            seed: 0,
            policies: 0,
            share_gradient_through_gate: true,
            strict_policy_heads: true,
            base: BaseLearner::Mlp,
            st_rounds: 5,
            st_add_fraction: 0.02,
            ips_max_weight: 20.0,
            propensity_epochs: 20,
            propensity_learning_rate: 1e-2,
            propensity_batch_size: 256,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.layers < 2 {
            return fail(format!("layers must be at least 2, got {}", self.layers));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return fail(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if self.embedding_dim == 0 || self.hidden == 0 {
            return fail("embedding_dim and hidden must be positive".into());
        }
        if [self.learning_rate, self.propensity_learning_rate]
            .iter()
            .any(|&lr| lr.is_nan() || lr <= 0.0)
        {
            return fail("learning rates must be positive".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be positive".into());
        }
        if !(self.st_add_fraction > 0.0 && self.st_add_fraction <= 1.0) {
            return fail(format!(
                "st_add_fraction must lie in (0, 1], got {}",
                self.st_add_fraction
            ));
        }
        if self.ips_max_weight.is_nan() || self.ips_max_weight < 1.0 {
            return fail(format!(
                "ips_max_weight must be at least 1, got {}",
                self.ips_max_weight
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ModelConfig::default();
        c.validate().unwrap();
        assert_eq!((c.embedding_dim, c.hidden, c.layers), (4, 16, 2));
        assert_eq!(c.learning_rate, 0.001);
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            ModelConfig {
                layers: 1,
                ..Default::default()
            },
            ModelConfig {
                eta: 1.0,
                ..Default::default()
            },
            ModelConfig {
                eta: 0.0,
                ..Default::default()
            },
            ModelConfig {
                embedding_dim: 0,
                ..Default::default()
            },
            ModelConfig {
                ips_max_weight: 0.5,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn kinds_parse() {
        for k in ModelKind::ALL {
            assert_eq!(k.key().parse::<ModelKind>().unwrap(), k);
        }
        assert!("xgb".parse::<ModelKind>().is_err());
        assert_eq!(ModelKind::St.display_name(BaseLearner::Mlp), "ST+MLP");
    }
}
