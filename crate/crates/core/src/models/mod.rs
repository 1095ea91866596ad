//! The reject-aware multi-task network and the LR, MLP, self-training and
//! inverse-propensity baselines. Every learner is fitted through [`fit`] and
//! scores rows through [`DefaultScorer`].

mod binary;
mod config;
mod embedding;
mod learner;
mod linear;
mod mlp;
mod reject;
mod rmt;
mod train;

pub use binary::{fit_approved, fit_binary, fit_lr, fit_mlp, BinaryLearner, BinaryModel, BinaryObjective};
pub use config::{BaseLearner, ModelConfig, ModelKind};
pub use embedding::Embedding;
pub use learner::{fit, policy_count, Fitted, Predictor, SavedModel};
pub use linear::LogisticModel;
pub use mlp::Mlp;
pub use reject::{fit_ips, fit_propensity, fit_self_training, ips_weight, Ips, PseudoLabelRound, SelfTraining};
pub use rmt::{
    fit_rmt, loss, DnOutput, LossParts, Prediction, RaOutput, RmtNet, RmtObjective, RmtObjectiveOptions, RmtShape,
    RmtTape,
};
pub use train::{train, train_fixed, validation_ks, DefaultScorer, EpochRecord, Objective, TrainOptions, TrainingLog};
