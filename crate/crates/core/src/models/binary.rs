//! Single-task default classifiers trained on labelled rows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::train::{train, DefaultScorer, Objective, TrainOptions, TrainingLog};
use super::{BaseLearner, LogisticModel, LossParts, Mlp, ModelConfig};
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::nncore::{bce, bce_logit_grad, ParamSet};

/// A model producing one default probability per row of bins.
pub trait BinaryModel: ParamSet {
    fn prob(&self, bins: &[u32]) -> Result<f64>;

    /// Probability of `bins`; adds `d_logit(p)` times the gradient of the
    /// output logit to `grads`.
    fn prob_with_grad(&self, bins: &[u32], d_logit: &dyn Fn(f64) -> f64, grads: &mut Self) -> Result<f64>;
}

/// Weighted cross-entropy over explicitly labelled rows.
#[derive(Debug, Clone)]
pub struct BinaryObjective<'a> {
    pub dataset: &'a Dataset,
    pub rows: Vec<usize>,
    pub labels: Vec<u8>,
    pub weights: Vec<f64>,
}

impl<'a> BinaryObjective<'a> {
    /// Unit weights and observed defaults of `rows`, which must all be approved.
    pub fn observed(dataset: &'a Dataset, rows: Vec<usize>) -> Result<Self> {
        let labels = rows
            .iter()
            .map(|&i| {
                dataset
                    .observed_default(i)
                    .ok_or_else(|| Error::Contract(format!("row {i} has no observed default")))
            })
            .collect::<Result<Vec<u8>>>()?;
        let weights = vec![1.0; rows.len()];
        Ok(BinaryObjective {
            dataset,
            rows,
            labels,
            weights,
        })
    }

    /// Weighted loss of the whole row set.
    pub fn total_loss<M: BinaryModel>(&self, model: &M) -> Result<f64> {
        let all: Vec<usize> = (0..self.rows.len()).collect();
        self.weighted_loss(model, &all, None)
    }

    fn weighted_loss<M: BinaryModel>(&self, model: &M, batch: &[usize], mut grads: Option<&mut M>) -> Result<f64> {
        let mut total = 0.0;
        for &b in batch {
            let bins = self.dataset.bins(self.rows[b]);
            let y = f64::from(self.labels[b]);
            let w = self.weights[b];
            let p = match grads.as_deref_mut() {
                Some(g) => model.prob_with_grad(bins, &|p| w * bce_logit_grad(p, y), g)?,
                None => model.prob(bins)?,
            };
            total += w * bce(p, y);
        }
        Ok(total)
    }
}

/// Adapts a [`BinaryObjective`] to a concrete model type for the trainer.
pub(super) struct Typed<'o, 'a, M>(
    pub(super) &'o BinaryObjective<'a>,
    pub(super) std::marker::PhantomData<M>,
);

impl<M: BinaryModel> Objective for Typed<'_, '_, M> {
    type Params = M;

    fn n_examples(&self) -> usize {
        self.0.rows.len()
    }

    fn loss(&self, params: &M, batch: &[usize], grads: Option<&mut M>) -> Result<LossParts> {
        let l = self.0.weighted_loss(params, batch, grads)?;
        Ok(LossParts {
            total: l,
            rejection: 0.0,
            default: l,
        })
    }
}

impl DefaultScorer for LogisticModel {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.prob(dataset.bins(row))
    }
}

impl DefaultScorer for Mlp {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.prob(dataset.bins(row))
    }
}

/// A fitted LR or MLP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BinaryLearner {
    Lr(LogisticModel),
    Mlp(Mlp),
}

impl BinaryLearner {
    /// Untrained model: zero weights for LR, seeded initialization for MLP.
    pub fn init(base: BaseLearner, cardinalities: &[usize], config: &ModelConfig) -> Self {
        match base {
            BaseLearner::Lr => BinaryLearner::Lr(LogisticModel::zeros(cardinalities)),
            BaseLearner::Mlp => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                BinaryLearner::Mlp(Mlp::init(
                    cardinalities,
                    config.embedding_dim,
                    config.hidden,
                    config.layers,
                    &mut rng,
                ))
            }
        }
    }

    pub fn base(&self) -> BaseLearner {
        match self {
            BinaryLearner::Lr(_) => BaseLearner::Lr,
            BinaryLearner::Mlp(_) => BaseLearner::Mlp,
        }
    }

    pub fn prob(&self, bins: &[u32]) -> Result<f64> {
        match self {
            BinaryLearner::Lr(m) => m.prob(bins),
            BinaryLearner::Mlp(m) => m.prob(bins),
        }
    }
}

impl DefaultScorer for BinaryLearner {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        self.prob(dataset.bins(row))
    }
}

/// Trains a base learner on `objective`, early-stopping on approved validation rows.
pub fn fit_binary(
    base: BaseLearner,
    objective: &BinaryObjective<'_>,
    config: &ModelConfig,
) -> Result<(BinaryLearner, TrainingLog)> {
    config.validate()?;
    if objective.rows.is_empty() {
        return Err(Error::Protocol("no labelled training rows".into()));
    }
    let dataset = objective.dataset;
    let val = dataset.approved_rows(Split::Val);
    let options = TrainOptions::from(config);
    Ok(match BinaryLearner::init(base, dataset.cardinalities(), config) {
        BinaryLearner::Lr(m) => {
            let (m, log) = train(m, &Typed(objective, Default::default()), dataset, &val, options)?;
            (BinaryLearner::Lr(m), log)
        }
        BinaryLearner::Mlp(m) => {
            let (m, log) = train(m, &Typed(objective, Default::default()), dataset, &val, options)?;
            (BinaryLearner::Mlp(m), log)
        }
    })
}

/// Base learner on approved training rows only.
pub fn fit_approved(
    base: BaseLearner,
    dataset: &Dataset,
    config: &ModelConfig,
) -> Result<(BinaryLearner, TrainingLog)> {
    let rows = dataset.approved_rows(Split::Train);
    if rows.is_empty() {
        return Err(Error::Protocol("no approved training rows".into()));
    }
    fit_binary(base, &BinaryObjective::observed(dataset, rows)?, config)
}

pub fn fit_lr(dataset: &Dataset, config: &ModelConfig) -> Result<(LogisticModel, TrainingLog)> {
    match fit_approved(BaseLearner::Lr, dataset, config)? {
        (BinaryLearner::Lr(m), log) => Ok((m, log)),
        _ => unreachable!(),
    }
}

pub fn fit_mlp(dataset: &Dataset, config: &ModelConfig) -> Result<(Mlp, TrainingLog)> {
    match fit_approved(BaseLearner::Mlp, dataset, config)? {
        (BinaryLearner::Mlp(m), log) => Ok((m, log)),
        _ => unreachable!(),
    }
}
