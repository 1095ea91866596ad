//! Ranking metrics, the default/rejection correlation, gate curves and
//! multi-seed aggregation.

mod gates;
mod metrics;
mod phi;
mod report;

pub use gates::{gate_curve, GateCurve, GateSeries};
pub use metrics::{auc, ks, ScoredSet, Subset};
pub use phi::{phi_correlation, ContingencyTable};
pub use report::{
    aggregate, evaluate_model, rejection_default_correlation, render_table, spread, AucKs, MetricReport, RunMetrics,
    SeedRun, Spread, SubsetSummary,
};
