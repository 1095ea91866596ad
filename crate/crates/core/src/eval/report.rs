use serde::{Deserialize, Serialize};

use super::{auc, ks, phi_correlation, ContingencyTable, ScoredSet, Subset};
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::models::DefaultScorer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucKs {
    pub auc: f64,
    pub ks: f64,
}

/// Test metrics of one fitted model. `rejected` is `None` when the test split
/// holds no rejected rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub approved: AucKs,
    pub rejected: Option<AucKs>,
    pub combined: AucKs,
}

impl RunMetrics {
    pub fn get(&self, subset: Subset) -> Option<AucKs> {
        match subset {
            Subset::ApprovedTest => Some(self.approved),
            Subset::RejectedTest => self.rejected,
            Subset::CombinedTest => Some(self.combined),
        }
    }
}

fn score(set: ScoredSet) -> Result<AucKs> {
    Ok(AucKs {
        auc: auc(&set)?,
        ks: ks(&set)?,
    })
}

/// Scores every test row and evaluates against true default labels: observed
/// ones for approved rows, hidden ones for rejected rows.
pub fn evaluate_model<S: DefaultScorer + ?Sized>(model: &S, dataset: &Dataset) -> Result<RunMetrics> {
    let mut approved = (Vec::new(), Vec::new());
    let mut rejected = (Vec::new(), Vec::new());
    for i in dataset.rows_where(|i| dataset.split(i) == Split::Test) {
        let s = model.default_prob(dataset, i)?;
        if dataset.is_rejected(i) {
            let y = dataset
                .evaluation_label(i)
                .ok_or_else(|| Error::Protocol(format!("rejected test row {i} has no hidden default label")))?;
            rejected.0.push(s);
            rejected.1.push(y);
        } else {
            let y = dataset
                .observed_default(i)
                .ok_or_else(|| Error::Contract(format!("approved row {i} has no default label")))?;
            approved.0.push(s);
            approved.1.push(y);
        }
    }
    let has_rejected = !rejected.0.is_empty();
    let combined = ScoredSet::new(
        approved.0.iter().chain(&rejected.0).copied().collect(),
        approved.1.iter().chain(&rejected.1).copied().collect(),
    )?;
    Ok(RunMetrics {
        approved: score(ScoredSet::new(approved.0, approved.1)?)?,
        rejected: if has_rejected {
            Some(score(ScoredSet::new(rejected.0, rejected.1)?)?)
        } else {
            None
        },
        combined: score(combined)?,
    })
}

/// Phi correlation between true default and rejection over every row with a
/// known default label.
pub fn rejection_default_correlation(dataset: &Dataset) -> Result<(ContingencyTable, f64)> {
    let mut y = Vec::new();
    let mut r = Vec::new();
    for i in 0..dataset.n_rows() {
        if let Some(label) = dataset.evaluation_label(i) {
            y.push(label);
            r.push(dataset.rejection_label(i));
        }
    }
    let table = ContingencyTable::from_labels(&y, &r)?;
    let phi = phi_correlation(&table)?;
    Ok((table, phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

/// Median (mean of the middle pair for even counts), min and max; `None` when empty.
pub fn spread(values: &[f64]) -> Option<Spread> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    };
    Some(Spread {
        median,
        min: v[0],
        max: v[n - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub auc: Spread,
    pub ks: Spread,
}

/// One seed's result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Per-seed metrics of one approach and their order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub model: String,
    pub config: serde_json::Value,
    pub runs: Vec<SeedRun>,
    pub approved: Option<SubsetSummary>,
    pub rejected: Option<SubsetSummary>,
    pub combined: Option<SubsetSummary>,
}

impl MetricReport {
    pub fn summary(&self, subset: Subset) -> Option<&SubsetSummary> {
        match subset {
            Subset::ApprovedTest => self.approved.as_ref(),
            Subset::RejectedTest => self.rejected.as_ref(),
            Subset::CombinedTest => self.combined.as_ref(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Medians over completed runs, per subset. A subset missing from every run
/// stays `None`.
pub fn aggregate(model: &str, config: serde_json::Value, runs: Vec<SeedRun>) -> MetricReport {
    let summarize = |subset: Subset| {
        let pairs: Vec<AucKs> = runs.iter().filter_map(|r| r.metrics.get(subset)).collect();
        let aucs: Vec<f64> = pairs.iter().map(|p| p.auc).collect();
        let kss: Vec<f64> = pairs.iter().map(|p| p.ks).collect();
        Some(SubsetSummary {
            auc: spread(&aucs)?,
            ks: spread(&kss)?,
        })
    };
    MetricReport {
        model: model.to_string(),
        config,
        approved: summarize(Subset::ApprovedTest),
        rejected: summarize(Subset::RejectedTest),
        combined: summarize(Subset::CombinedTest),
        runs,
    }
}

/// Aligned text table: one row per report, median AUC and KS per subset.
pub fn render_table(reports: &[MetricReport]) -> String {
    let mut header = vec!["model".to_string()];
    for s in Subset::ALL {
        header.push(format!("{} AUC", s.as_str()));
        header.push(format!("{} KS", s.as_str()));
    }
    let mut rows = vec![header];
    for r in reports {
        let mut row = vec![r.model.clone()];
        for s in Subset::ALL {
            match r.summary(s) {
                Some(sum) => {
                    row.push(format!("{:.4}", sum.auc.median));
                    row.push(format!("{:.4}", sum.ks.median));
                }
                None => row.extend(["n/a".to_string(), "n/a".to_string()]),
            }
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(spread(&[3.0, 1.0, 2.0]).unwrap().median, 2.0);
        assert_eq!(
            spread(&[5.0]).unwrap(),
            Spread {
                median: 5.0,
                min: 5.0,
                max: 5.0
            }
        );
        assert_eq!(spread(&[4.0, 1.0, 3.0, 2.0]).unwrap().median, 2.5);
        assert!(spread(&[]).is_none());
    }

    fn run(seed: u64, ks: f64, rejected: bool) -> SeedRun {
        let p = AucKs {
            auc: 0.5 + ks / 2.0,
            ks,
        };
        SeedRun {
            seed,
            metrics: RunMetrics {
                approved: p,
                rejected: rejected.then_some(p),
                combined: p,
            },
        }
    }

    #[test]
    fn aggregate_and_table() {
        let report = aggregate(
            "mlp",
            serde_json::Value::Null,
            vec![run(0, 0.1, false), run(1, 0.3, false), run(2, 0.2, false)],
        );
        assert_eq!(report.combined.unwrap().ks.median, 0.2);
        assert!(report.rejected.is_none());
        let table = render_table(std::slice::from_ref(&report));
        assert_eq!(table.lines().count(), 2);
        assert!(table.lines().nth(1).unwrap().contains("n/a"));
        assert_eq!(MetricReport::from_json(&report.to_json()).unwrap(), report);
    }
}
