//! Dense-network numerical engine: matrices, layers, activations, losses, the
//! optimizer, finite-difference gradient checking and parameter snapshots.
//!
//! Every model in the crate is built on these pieces. Gradients are exact and
//! hand-derived; there is no general autodiff.

mod activation;
mod gradcheck;
mod layer;
mod matrix;
mod optim;
mod params;
pub mod snapshot;
mod stack;

pub use activation::{bce, bce_logit_grad, relu, sigmoid, Activation, PROB_CLAMP};
pub use gradcheck::{grad_check, GradCheckReport};
pub use layer::DenseLayer;
pub use matrix::Matrix;
pub use optim::{adam_step, AdamConfig, OptimizerState};
pub use params::{ParamSet, Tensor};
pub use stack::{DenseStack, StackTape};
