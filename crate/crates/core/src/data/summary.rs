use serde::{Deserialize, Serialize};

use super::RawTable;
use crate::error::{Error, Result};

/// Per-field means of approved and rejected rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub fields: Vec<String>,
    pub approved_count: usize,
    pub rejected_count: usize,
    /// `None` when the group is empty.
    pub approved_means: Vec<Option<f64>>,
    pub rejected_means: Vec<Option<f64>>,
}

/// Means of `fields` grouped by the rejection label. An empty `fields` slice
/// summarizes every feature column.
pub fn group_summary(table: &RawTable, fields: &[String]) -> Result<GroupSummary> {
    let r = table
        .r
        .as_ref()
        .ok_or_else(|| Error::Protocol("group summary needs rejection labels".into()))?;
    let fields: Vec<String> = if fields.is_empty() {
        table.column_names().to_vec()
    } else {
        fields.to_vec()
    };
    let columns = fields
        .iter()
        .map(|f| {
            table
                .column_index(f)
                .ok_or_else(|| Error::Schema(format!("unknown field `{f}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sums = [vec![0.0; columns.len()], vec![0.0; columns.len()]];
    let mut counts = [0usize; 2];
    for (i, &ri) in r.iter().enumerate() {
        let g = usize::from(ri == 1);
        counts[g] += 1;
        let row = table.row(i);
        for (s, &j) in sums[g].iter_mut().zip(&columns) {
            *s += row[j];
        }
    }
    let means = |g: usize| -> Vec<Option<f64>> {
        sums[g]
            .iter()
            .map(|s| (counts[g] > 0).then(|| s / counts[g] as f64))
            .collect()
    };
    Ok(GroupSummary {
        approved_means: means(0),
        rejected_means: means(1),
        approved_count: counts[0],
        rejected_count: counts[1],
        fields,
    })
}

impl GroupSummary {
    /// Aligned text table: one row per field, approved and rejected means.
    pub fn to_table(&self) -> String {
        let width = self.fields.iter().map(String::len).max().unwrap_or(5).max(5);
        let fmt = |v: Option<f64>| v.map(|m| format!("{m:.4}")).unwrap_or_else(|| "-".into());
        let mut out = format!("{:<width$}  {:>14}  {:>14}\n", "field", "approved", "rejected");
        for (k, f) in self.fields.iter().enumerate() {
            out.push_str(&format!(
                "{f:<width$}  {:>14}  {:>14}\n",
                fmt(self.approved_means[k]),
                fmt(self.rejected_means[k])
            ));
        }
        out.push_str(&format!(
            "{:<width$}  {:>14}  {:>14}\n",
            "rows", self.approved_count, self.rejected_count
        ));
        out
    }
}
