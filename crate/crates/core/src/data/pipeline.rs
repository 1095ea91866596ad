use serde::{Deserialize, Serialize};

use super::{
    fit_discretizer, generate_synthetic_rejection, generate_table, Dataset, DiscretizationMap, RawTable, SplitMode,
    SynthPolicy, SyntheticSpec, SyntheticTable,
};
use crate::error::Result;

/// Everything needed to build one synthetic approval-rejection dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSetup {
    pub spec: SyntheticSpec,
    pub epsilon: f64,
    pub bins: usize,
    pub mode: SplitMode,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    /// Main rows with `r`, `policy` and every true label.
    pub raw: RawTable,
    pub policy: SynthPolicy,
    pub map: DiscretizationMap,
    pub dataset: Dataset,
    /// The full generated table before the policy simulation.
    pub truth: SyntheticTable,
}

/// Generates the ground truth, simulates the policy, discretizes and splits.
///
/// The table, the policy simulation and the split are seeded by
/// `spec.seed`, `spec.seed + 1` and `spec.seed + 2`. Bin edges are fitted on
/// the features of every main row.
pub fn prepare_synthetic(setup: &SyntheticSetup) -> Result<SyntheticDataset> {
    let seed = setup.spec.seed;
    let truth = generate_table(&setup.spec)?;
    let (raw, policy) = generate_synthetic_rejection(&truth.table, setup.epsilon, seed.wrapping_add(1))?;
    let map = fit_discretizer(&raw, setup.bins)?;
    let dataset = Dataset::from_raw(&raw, &map)?.assign_splits(seed.wrapping_add(2), setup.mode)?;
    Ok(SyntheticDataset {
        raw,
        policy,
        map,
        dataset,
        truth,
    })
}
