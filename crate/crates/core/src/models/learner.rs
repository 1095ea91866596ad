//! One entry point for all six learners.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binary::{fit_approved, BinaryLearner, BinaryModel};
use super::reject::{fit_ips, fit_self_training, PseudoLabelRound};
use super::rmt::{fit_rmt, RmtShape};
use super::train::{DefaultScorer, TrainingLog};
use super::{BaseLearner, LogisticModel, Mlp, ModelConfig, ModelKind, RmtNet};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nncore::snapshot::{Snapshot, SnapshotHeader};
use crate::nncore::ParamSet;

/// The parameters that produce default scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predictor {
    Lr(LogisticModel),
    Mlp(Mlp),
    Rmt(RmtNet),
}

impl Predictor {
    pub fn prob(&self, bins: &[u32]) -> Result<f64> {
        match self {
            Predictor::Lr(m) => m.prob(bins),
            Predictor::Mlp(m) => m.prob(bins),
            Predictor::Rmt(m) => Ok(m.forward(bins)?.dn.prob),
        }
    }

    pub fn as_rmt(&self) -> Option<&RmtNet> {
        match self {
            Predictor::Rmt(m) => Some(m),
            _ => None,
        }
    }

    fn from_binary(b: BinaryLearner) -> Self {
        match b {
            BinaryLearner::Lr(m) => Predictor::Lr(m),
            BinaryLearner::Mlp(m) => Predictor::Mlp(m),
        }
    }

    fn capture(&self, header: SnapshotHeader) -> Snapshot {
        match self {
            Predictor::Lr(m) => Snapshot::capture(header, m),
            Predictor::Mlp(m) => Snapshot::capture(header, m),
            Predictor::Rmt(m) => Snapshot::capture(header, m),
        }
    }

    fn restore(&mut self, snapshot: &Snapshot) -> Result<()> {
        match self {
            Predictor::Lr(m) => snapshot.restore_into(m),
            Predictor::Mlp(m) => snapshot.restore_into(m),
            Predictor::Rmt(m) => snapshot.restore_into(m),
        }
    }
}

impl DefaultScorer for Predictor {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.prob(dataset.bins(row))
    }
}

/// A fitted learner with its training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub kind: ModelKind,
    pub config: ModelConfig,
    pub predictor: Predictor,
    pub log: TrainingLog,
    /// Pseudo-labelling trace of self-training.
    pub pseudo_labels: Vec<PseudoLabelRound>,
    /// Approval propensity model of IPS.
    pub propensity: Option<LogisticModel>,
}

/// Rejection towers used for `kind` on `dataset`.
pub fn policy_count(kind: ModelKind, dataset: &Dataset, config: &ModelConfig) -> usize {
    match kind {
        ModelKind::RmtNetPp if config.policies > 0 => config.policies,
        ModelKind::RmtNetPp => dataset.n_policies(),
        _ => 1,
    }
}

/// Fits `kind` on `dataset`.
///
/// LR and MLP ignore `config.base`; self-training and IPS use it.
pub fn fit(kind: ModelKind, dataset: &Dataset, config: &ModelConfig) -> Result<Fitted> {
    config.validate()?;
    let mut fitted = Fitted {
        kind,
        config: config.clone(),
        predictor: Predictor::Lr(LogisticModel::zeros(&[])),
        log: TrainingLog::default(),
        pseudo_labels: Vec::new(),
        propensity: None,
    };
    match kind {
        ModelKind::Lr | ModelKind::Mlp => {
            let base = if kind == ModelKind::Lr {
                BaseLearner::Lr
            } else {
                BaseLearner::Mlp
            };
            let (m, log) = fit_approved(base, dataset, config)?;
            fitted.predictor = Predictor::from_binary(m);
            fitted.log = log;
        }
        ModelKind::St => {
            let st = fit_self_training(dataset, config)?;
            fitted.predictor = Predictor::from_binary(st.model);
            fitted.log = st.log;
            fitted.pseudo_labels = st.rounds;
        }
        ModelKind::Ips => {
            let ips = fit_ips(dataset, config)?;
            fitted.predictor = Predictor::from_binary(ips.model);
            fitted.log = ips.log;
            fitted.propensity = Some(ips.propensity);
        }
        ModelKind::RmtNet | ModelKind::RmtNetPp => {
            let (m, log) = fit_rmt(dataset, config, policy_count(kind, dataset, config))?;
            fitted.predictor = Predictor::Rmt(m);
            fitted.log = log;
        }
    }
    Ok(fitted)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SnapshotMetadata {
    config: ModelConfig,
    cardinalities: Vec<usize>,
    base: Option<BaseLearner>,
}

/// A predictor restored from a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub kind: ModelKind,
    pub config: ModelConfig,
    pub predictor: Predictor,
}

impl Fitted {
    pub fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.predictor.default_prob(dataset, row)
    }

    /// Parameters plus enough metadata to rebuild the model.
    pub fn snapshot(&self) -> Snapshot {
        let (policies, cardinalities, base) = match &self.predictor {
            Predictor::Rmt(m) => (m.n_policies(), m.embedding.cardinalities().to_vec(), None),
            Predictor::Lr(m) => (0, m.cardinalities().to_vec(), Some(BaseLearner::Lr)),
            Predictor::Mlp(m) => (0, m.embedding.cardinalities().to_vec(), Some(BaseLearner::Mlp)),
        };
        let metadata = SnapshotMetadata {
            config: self.config.clone(),
            cardinalities,
            base,
        };
        let header = SnapshotHeader {
            kind: self.kind.key().to_string(),
            policies,
            metadata: serde_json::to_value(metadata).expect("metadata serializes"),
        };
        self.predictor.capture(header)
    }
}

impl SavedModel {
    pub fn from_snapshot(snapshot: &Snapshot) -> Result<Self> {
        let kind: ModelKind = snapshot.header.kind.parse()?;
        let meta: SnapshotMetadata = serde_json::from_value(snapshot.header.metadata.clone())?;
        let config = meta.config;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut predictor = match (kind, meta.base) {
            (ModelKind::RmtNet | ModelKind::RmtNetPp, _) => {
                let shape = RmtShape {
                    embedding_dim: config.embedding_dim,
                    hidden: config.hidden,
                    layers: config.layers,
                    policies: snapshot.header.policies,
                };
                Predictor::Rmt(RmtNet::init(&meta.cardinalities, shape, &mut rng)?)
            }
            (_, Some(BaseLearner::Lr)) => Predictor::Lr(LogisticModel::zeros(&meta.cardinalities)),
            (_, Some(BaseLearner::Mlp)) => Predictor::Mlp(Mlp::init(
                &meta.cardinalities,
                config.embedding_dim,
                config.hidden,
                config.layers,
                &mut rng,
            )),
            (_, None) => return Err(Error::Snapshot(format!("{kind} snapshot without a base learner"))),
        };
        predictor.restore(snapshot)?;
        let params_ok = match &predictor {
            Predictor::Lr(m) => m.all_finite(),
            Predictor::Mlp(m) => m.all_finite(),
            Predictor::Rmt(m) => m.all_finite(),
        };
        if !params_ok {
            return Err(Error::Snapshot("non-finite parameters".into()));
        }
        Ok(SavedModel {
            kind,
            config,
            predictor,
        })
    }
}

impl DefaultScorer for SavedModel {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.predictor.default_prob(dataset, row)
    }
}

impl DefaultScorer for Fitted {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.predictor.default_prob(dataset, row)
    }
}
