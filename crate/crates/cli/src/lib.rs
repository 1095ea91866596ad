//! Driver for the reject-aware credit scoring models: data generation,
//! training, evaluation, summaries and the multi-seed benchmark.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;

pub use config::RunConfig;
pub use error::{CliError, Result};
