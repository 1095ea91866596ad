use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cross-counts of default (D) and rejection (R).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub default_rejected: u64,
    pub default_approved: u64,
    pub repaid_rejected: u64,
    pub repaid_approved: u64,
}

impl ContingencyTable {
    /// Counts pairs `(y, r)`.
    pub fn from_labels(y: &[u8], r: &[u8]) -> Result<Self> {
        if y.len() != r.len() {
            return Err(Error::Shape(format!(
                "{} default labels for {} rejection labels",
                y.len(),
                r.len()
            )));
        }
        let mut t = ContingencyTable::default();
        for (&d, &rj) in y.iter().zip(r) {
            match (d, rj) {
                (1, 1) => t.default_rejected += 1,
                (1, 0) => t.default_approved += 1,
                (0, 1) => t.repaid_rejected += 1,
                (0, 0) => t.repaid_approved += 1,
                _ => return Err(Error::Shape(format!("labels must be 0 or 1, got ({d}, {rj})"))),
            }
        }
        Ok(t)
    }

    pub fn total(&self) -> u64 {
        self.default_rejected + self.default_approved + self.repaid_rejected + self.repaid_approved
    }

    /// `P(D | R)`, or `None` without rejected rows.
    pub fn default_rate_rejected(&self) -> Option<f64> {
        let n = self.default_rejected + self.repaid_rejected;
        (n > 0).then(|| self.default_rejected as f64 / n as f64)
    }

    /// `P(D | not R)`, or `None` without approved rows.
    pub fn default_rate_approved(&self) -> Option<f64> {
        let n = self.default_approved + self.repaid_approved;
        (n > 0).then(|| self.default_approved as f64 / n as f64)
    }
}

/// Pearson correlation of the two binary variables:
/// `(P(DR) - P(D)P(R)) / sqrt(P(D)P(not D)P(R)P(not R))`.
pub fn phi_correlation(table: &ContingencyTable) -> Result<f64> {
    let n = table.total() as f64;
    let p_d = (table.default_rejected + table.default_approved) as f64 / n;
    let p_r = (table.default_rejected + table.repaid_rejected) as f64 / n;
    let p_dr = table.default_rejected as f64 / n;
    let denom = p_d * (1.0 - p_d) * p_r * (1.0 - p_r);
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::UndefinedMetric(format!(
            "degenerate margins: P(D) = {p_d}, P(R) = {p_r}"
        )));
    }
    Ok((p_dr - p_d * p_r) / denom.sqrt())
}
