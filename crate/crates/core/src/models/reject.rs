//! Reject-inference baselines: self-training and inverse-propensity weighting.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::binary::{fit_binary, BinaryLearner, BinaryModel, BinaryObjective, Typed};
use super::train::{train_fixed, TrainOptions, TrainingLog};
use super::{LogisticModel, ModelConfig};
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};

/// Rejected rows moved into the labelled pool in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoLabelRound {
    pub round: usize,
    pub pool_before: usize,
    pub added: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTraining {
    pub model: BinaryLearner,
    pub log: TrainingLog,
    pub rounds: Vec<PseudoLabelRound>,
}

/// Self-training: fit on the labelled pool, label the riskiest remaining
/// rejected rows as defaults, refit; `config.st_rounds` times.
///
/// Each round adds `ceil(st_add_fraction * rejected)` rows, highest predicted
/// default first (ties by row index). Every fit starts from the same seeded
/// initialization. Stops early once no rejected rows remain.
pub fn fit_self_training(dataset: &Dataset, config: &ModelConfig) -> Result<SelfTraining> {
    let approved = dataset.approved_rows(Split::Train);
    if approved.is_empty() {
        return Err(Error::Protocol("no approved training rows".into()));
    }
    let mut objective = BinaryObjective::observed(dataset, approved)?;
    let mut remaining = dataset.rejected_rows();
    let per_round = (config.st_add_fraction * remaining.len() as f64).ceil() as usize;
    let mut rounds = Vec::new();
    let (mut model, mut log) = fit_binary(config.base, &objective, config)?;
    for round in 1..=config.st_rounds {
        if remaining.is_empty() {
            break;
        }
        let mut scored = remaining
            .iter()
            .map(|&i| Ok((i, model.prob(dataset.bins(i))?)))
            .collect::<Result<Vec<(usize, f64)>>>()?;
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        let take = per_round.min(scored.len());
        let mut added: Vec<usize> = scored[..take].iter().map(|&(i, _)| i).collect();
        added.sort_unstable();
        let pool_before = objective.rows.len();
        for &i in &added {
            objective.rows.push(i);
            objective.labels.push(1);
            objective.weights.push(1.0);
        }
        remaining.retain(|i| added.binary_search(i).is_err());
        rounds.push(PseudoLabelRound {
            round,
            pool_before,
            added,
        });
        (model, log) = fit_binary(config.base, &objective, config)?;
    }
    Ok(SelfTraining { model, log, rounds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ips {
    pub model: BinaryLearner,
    pub log: TrainingLog,
    pub propensity: LogisticModel,
}

/// Logistic model of `P(r = 1 | x)` over every row, trained for a fixed
/// number of epochs.
pub fn fit_propensity(dataset: &Dataset, config: &ModelConfig) -> Result<LogisticModel> {
    let rows: Vec<usize> = (0..dataset.n_rows()).collect();
    let labels = rows.iter().map(|&i| dataset.rejection_label(i)).collect();
    let objective = BinaryObjective {
        dataset,
        weights: vec![1.0; rows.len()],
        rows,
        labels,
    };
    let options = TrainOptions {
        learning_rate: config.propensity_learning_rate,
        epochs: config.propensity_epochs,
        patience: 0,
        batch_size: config.propensity_batch_size,
        seed: config.seed,
    };
    let init = LogisticModel::zeros(dataset.cardinalities());
    Ok(train_fixed(init, &Typed(&objective, Default::default()), options)?.0)
}

/// Approval weight `1 / (1 - p)` clipped to `[1, max_weight]`.
pub fn ips_weight(propensity: f64, max_weight: f64) -> f64 {
    let w = 1.0 / (1.0 - propensity);
    if w.is_nan() {
        max_weight
    } else {
        w.clamp(1.0, max_weight)
    }
}

/// Base learner on approved training rows reweighted by inverse approval propensity.
pub fn fit_ips(dataset: &Dataset, config: &ModelConfig) -> Result<Ips> {
    let approved = dataset.approved_rows(Split::Train);
    if approved.is_empty() {
        return Err(Error::Protocol("no approved training rows".into()));
    }
    let propensity = fit_propensity(dataset, config)?;
    let mut objective = BinaryObjective::observed(dataset, approved)?;
    objective.weights = objective
        .rows
        .iter()
        .map(|&i| Ok(ips_weight(propensity.prob(dataset.bins(i))?, config.ips_max_weight)))
        .collect::<Result<Vec<f64>>>()?;
    let (model, log) = fit_binary(config.base, &objective, config)?;
    Ok(Ips { model, log, propensity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_clipped() {
        assert_eq!(ips_weight(0.5, 20.0), 2.0);
        assert_eq!(ips_weight(0.0, 20.0), 1.0);
        assert_eq!(ips_weight(1.0, 20.0), 20.0);
        assert_eq!(ips_weight(0.99, 20.0), 20.0);
        assert_eq!(ips_weight(0.7, 1.0), 1.0);
    }
}
