//! Dataset construction shared by every command.

use rmtnet::data::{
    compose_multi_policy, fit_discretizer, generate_synthetic_rejection, generate_table, load_csv, split_equal,
    Dataset, DiscretizationMap, PolicyRatios, RawTable, SynthPolicy,
};
use rmtnet::eval::{rejection_default_correlation, ContingencyTable};
use serde::{Deserialize, Serialize};

use crate::config::DataConfig;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Prepared {
    /// Main rows with rejection labels, policy ids and outcomes.
    pub raw: RawTable,
    pub map: DiscretizationMap,
    pub dataset: Dataset,
    /// Simulated policies; empty when the input already carried `r`.
    pub policies: Vec<SynthPolicy>,
    pub warnings: Vec<String>,
}

/// Loads or generates the feature table, simulates rejection when needed,
/// discretizes and assigns splits.
///
/// Seeds: table `seed`, policy `seed + 1`, split `seed + 2`, subset
/// partition `seed + 3`. With several policies, subset `m` simulates with
/// `seed + 1` mixed with `m`.
pub fn prepare(data: &DataConfig) -> Result<Prepared> {
    let seed = data.seed;
    let table = match &data.csv {
        Some(path) => load_csv(path, None)?,
        None => generate_table(&data.spec())?.table,
    };
    let (raw, policies, warnings) = if table.r.is_some() {
        let raw = if table.policy.is_some() {
            table
        } else {
            let n = table.n_rows();
            table.with_policy(vec![1; n])?
        };
        (raw, Vec::new(), Vec::new())
    } else if data.policies == 1 {
        let (raw, policy) = generate_synthetic_rejection(&table, data.epsilon, seed.wrapping_add(1))?;
        (raw, vec![policy], Vec::new())
    } else {
        let parts = split_equal(&table, data.policies, seed.wrapping_add(3))?;
        let subsets: Vec<(RawTable, f64, u64)> = parts
            .into_iter()
            .enumerate()
            .map(|(m, t)| (t, data.epsilon, seed.wrapping_add(1) ^ ((m as u64) << 32)))
            .collect();
        let c = compose_multi_policy(&subsets)?;
        (c.table, c.policies, c.warnings)
    };
    let map = fit_discretizer(&raw, data.bins)?;
    let dataset = Dataset::from_raw(&raw, &map)?.assign_splits(seed.wrapping_add(2), data.mode)?;
    Ok(Prepared {
        raw,
        map,
        dataset,
        policies,
        warnings,
    })
}

/// Size, ratio and correlation facts about a prepared dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFacts {
    pub seed: u64,
    pub epsilon: f64,
    pub rows: usize,
    pub features: usize,
    pub cardinalities: Vec<usize>,
    pub ratios: Vec<PolicyRatios>,
    /// Correlation between true default and rejection, when every outcome is known.
    pub phi: Option<f64>,
    pub contingency: Option<ContingencyTable>,
    pub policy_accuracy: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Prepared {
    pub fn facts(&self, data: &DataConfig) -> DatasetFacts {
        let d = &self.dataset;
        let correlation = rejection_default_correlation(d).ok();
        DatasetFacts {
            seed: data.seed,
            epsilon: data.epsilon,
            rows: d.n_rows(),
            features: d.n_features(),
            cardinalities: d.cardinalities().to_vec(),
            ratios: (1..=d.n_policies()).map(|m| d.policy_ratios(m)).collect(),
            phi: correlation.as_ref().map(|c| c.1),
            contingency: correlation.map(|c| c.0),
            policy_accuracy: self.policies.iter().map(|p| p.training_accuracy).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rmtnet::data::{prepare_synthetic, SyntheticSetup};

    fn small() -> DataConfig {
        DataConfig {
            n: 900,
            d: 5,
            bins: 6,
            seed: 4,
            ..Default::default()
        }
    }

    #[test]
    fn single_policy_matches_core_pipeline() {
        let data = small();
        let p = prepare(&data).unwrap();
        let setup = SyntheticSetup {
            spec: data.spec(),
            epsilon: data.epsilon,
            bins: data.bins,
            mode: data.mode,
        };
        let q = prepare_synthetic(&setup).unwrap();
        assert_eq!(p.dataset, q.dataset);
        assert_eq!(p.policies, vec![q.policy]);
    }

    #[test]
    fn several_policies_are_tagged() {
        let p = prepare(&DataConfig {
            policies: 3,
            epsilon: 0.5,
            ..small()
        })
        .unwrap();
        assert_eq!(p.dataset.n_policies(), 3);
        assert_eq!(p.policies.len(), 3);
        let facts = p.facts(&small());
        assert_eq!(facts.ratios.len(), 3);
        assert!(facts.phi.unwrap() > 0.0);
    }
}
