//! Minibatch Adam with early stopping on validation KS.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LossParts, ModelConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::{ks, ScoredSet};
use crate::nncore::{adam_step, AdamConfig, OptimizerState, ParamSet};

/// A differentiable training loss over a fixed list of examples.
pub trait Objective {
    type Params: ParamSet;

    fn n_examples(&self) -> usize;

    /// Summed loss of `batch` (example indices); adds the summed gradient to `grads`.
    fn loss(&self, params: &Self::Params, batch: &[usize], grads: Option<&mut Self::Params>) -> Result<LossParts>;
}

/// Anything that scores rows of a dataset by default probability.
pub trait DefaultScorer {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub learning_rate: f64,
    pub epochs: usize,
    pub patience: usize,
    /// 0 means full batch.
    pub batch_size: usize,
    pub seed: u64,
}

impl From<&ModelConfig> for TrainOptions {
    fn from(c: &ModelConfig) -> Self {
        TrainOptions {
            learning_rate: c.learning_rate,
            epochs: c.epochs,
            patience: c.patience,
            batch_size: c.batch_size,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub rejection_loss: f64,
    pub default_loss: f64,
    pub val_ks: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were kept; 0 only when no epoch ran.
    pub best_epoch: usize,
    pub best_val_ks: f64,
    pub stopped_early: bool,
}

/// KS of default scores on `rows`, labelled by their observed default.
pub fn validation_ks<P: DefaultScorer>(params: &P, dataset: &Dataset, rows: &[usize]) -> Result<f64> {
    let mut scores = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for &i in rows {
        let y = dataset
            .observed_default(i)
            .ok_or_else(|| Error::Contract(format!("validation row {i} has no observed default")))?;
        scores.push(params.default_prob(dataset, i)?);
        labels.push(y);
    }
    ks(&ScoredSet::new(scores, labels)?)
}

/// Fits `init` to `objective`, keeping the parameters with the best validation KS.
///
/// Gradients are averaged over each minibatch. Examples are reshuffled every
/// epoch from a stream seeded by `options.seed`. Training stops after
/// `patience` epochs without a strict improvement.
pub fn train<O>(
    init: O::Params,
    objective: &O,
    dataset: &Dataset,
    val_rows: &[usize],
    options: TrainOptions,
) -> Result<(O::Params, TrainingLog)>
where
    O: Objective,
    O::Params: DefaultScorer,
{
    let n = objective.n_examples();
    if n == 0 {
        return Err(Error::Protocol("no training examples".into()));
    }
    let mut params = init;
    let mut stepper = Stepper::new(&params, n, options);

    let mut log = TrainingLog {
        best_val_ks: f64::NEG_INFINITY,
        ..Default::default()
    };
    let mut best = params.clone();
    let mut stale = 0;
    for epoch in 1..=options.epochs {
        let parts = stepper.epoch(objective, &mut params, epoch)?;
        let val_ks = validation_ks(&params, dataset, val_rows)?;
        log.epochs.push(EpochRecord {
            epoch,
            loss: parts.total,
            rejection_loss: parts.rejection,
            default_loss: parts.default,
            val_ks,
        });
        if val_ks > log.best_val_ks {
            log.best_val_ks = val_ks;
            log.best_epoch = epoch;
            best.clone_from(&params);
            stale = 0;
        } else {
            stale += 1;
            if stale >= options.patience {
                log.stopped_early = true;
                break;
            }
        }
    }
    Ok((best, log))
}

/// Optimizer state, gradient buffer and shuffling stream for one fit.
struct Stepper<P> {
    grads: P,
    state: OptimizerState,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    batch_size: usize,
}

impl<P: ParamSet> Stepper<P> {
    fn new(params: &P, n: usize, options: TrainOptions) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(7);
        Stepper {
            grads: params.zeros_like(),
            state: OptimizerState::new(params, AdamConfig::with_learning_rate(options.learning_rate)),
            rng,
            order: (0..n).collect(),
            batch_size: if options.batch_size == 0 {
                n
            } else {
                options.batch_size.min(n)
            },
        }
    }

    fn epoch<O: Objective<Params = P>>(&mut self, objective: &O, params: &mut P, epoch: usize) -> Result<LossParts> {
        if self.batch_size < self.order.len() {
            self.order.shuffle(&mut self.rng);
        }
        let mut parts = LossParts::default();
        for batch in self.order.chunks(self.batch_size) {
            self.grads.fill_zero();
            parts += objective.loss(params, batch, Some(&mut self.grads))?;
            self.grads.scale(1.0 / batch.len() as f64);
            adam_step(&mut self.state, params, &self.grads);
        }
        if !params.all_finite() {
            return Err(Error::Protocol(format!("parameters diverged at epoch {epoch}")));
        }
        Ok(parts)
    }
}

/// Runs exactly `options.epochs` epochs with no validation; returns the
/// final parameters and each epoch's summed loss.
pub fn train_fixed<O: Objective>(
    init: O::Params,
    objective: &O,
    options: TrainOptions,
) -> Result<(O::Params, Vec<LossParts>)> {
    let n = objective.n_examples();
    if n == 0 {
        return Err(Error::Protocol("no training examples".into()));
    }
    let mut params = init;
    let mut stepper = Stepper::new(&params, n, options);
    let losses = (1..=options.epochs)
        .map(|epoch| stepper.epoch(objective, &mut params, epoch))
        .collect::<Result<Vec<_>>>()?;
    Ok((params, losses))
}

impl TrainOptions {
    pub fn with_epochs(self, epochs: usize) -> Self {
        TrainOptions { epochs, ..self }
    }
}
