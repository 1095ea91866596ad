//! Reject-aware multi-task networks for credit scoring under
//! missing-not-at-random selection bias.
//!
//! Approved loan applications reveal whether the borrower defaulted; rejected
//! ones do not. The models here learn the default task jointly with the
//! rejection task, sharing representations through gates driven by the
//! predicted rejection probability.
//!
//! - [`data`]: CSV loading, discretization, synthetic rejection policies, splits.
//! - [`nncore`]: dense layers, losses, the optimizer, gradient checking, snapshots.
//! - [`models`]: the multi-task networks and the LR / MLP / self-training / IPS baselines.
//! - [`eval`]: AUC, KS, phi correlation, gate curves and multi-run aggregation.

pub mod data;
pub mod error;
pub mod eval;
pub mod models;
pub mod nncore;

pub use error::{Error, Result};
