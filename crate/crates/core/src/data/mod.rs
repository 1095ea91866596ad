//! Tabular credit data: CSV loading, quantile discretization, synthetic
//! approval policies, split assignment and group summaries.

mod dataset;
mod discretize;
mod pipeline;
mod summary;
mod synth;
mod table;

pub use dataset::{Dataset, HiddenLabels, PolicyRatios, Split, SplitMode};
pub use discretize::{apply_discretizer, fit_discretizer, quantile_sorted, BinnedFeatures, DiscretizationMap};
pub use pipeline::{prepare_synthetic, SyntheticDataset, SyntheticSetup};
pub use summary::{group_summary, GroupSummary};
pub use synth::{
    compose_multi_policy, generate_synthetic_rejection, generate_synthetic_rejection_with, generate_table,
    policy_feature_count, rejected_count, split_equal, Composition, PolicyFit, SynthPolicy, SyntheticSpec,
    SyntheticTable,
};
pub use table::{load_csv, read_csv, ColumnRole, CsvSchema, RawTable};

/// Default number of quantile bins per feature.
pub const DEFAULT_BINS: usize = 32;
