use serde::{Deserialize, Serialize};

use super::RawTable;
use crate::error::{Error, Result};

/// Per-feature quantile bin edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationMap {
    /// Requested bins per feature; ties can leave a feature with fewer.
    pub bins: usize,
    edges: Vec<Vec<f64>>,
}

/// Feature matrix of bin indices, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedFeatures {
    n_rows: usize,
    cardinalities: Vec<usize>,
    bins: Vec<u32>,
}

impl DiscretizationMap {
    pub fn from_edges(bins: usize, edges: Vec<Vec<f64>>) -> Result<Self> {
        for (j, e) in edges.iter().enumerate() {
            if e.windows(2).any(|w| w[0] >= w[1]) || e.iter().any(|v| !v.is_finite()) {
                return Err(Error::Shape(format!(
                    "edges of feature {j} are not strictly increasing"
                )));
            }
        }
        Ok(DiscretizationMap { bins, edges })
    }

    pub fn n_features(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self, feature: usize) -> &[f64] {
        &self.edges[feature]
    }

    /// Effective number of bins of every feature.
    pub fn cardinalities(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.len() + 1).collect()
    }

    /// Number of edges strictly below `value`.
    pub fn bin(&self, feature: usize, value: f64) -> usize {
        self.edges[feature].partition_point(|&e| e < value)
    }
}

/// Linear-interpolation empirical quantile of sorted data at level `q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Edges at the empirical quantiles `i/bins`, `i = 1..bins-1`, per feature.
///
/// Duplicate edges collapse, and edges not below the column maximum are
/// dropped since no observed value can fall above them; a constant column
/// therefore gets no edges.
pub fn fit_discretizer(table: &RawTable, bins: usize) -> Result<DiscretizationMap> {
    if bins < 2 {
        return Err(Error::Config(format!("need at least 2 bins, got {bins}")));
    }
    if table.n_rows() < bins {
        return Err(Error::Config(format!(
            "{} rows cannot fill {bins} bins",
            table.n_rows()
        )));
    }
    let edges = (0..table.n_features())
        .map(|j| {
            let mut col: Vec<f64> = table.column(j).collect();
            col.sort_by(f64::total_cmp);
            let max = *col.last().unwrap();
            let mut edges: Vec<f64> = Vec::with_capacity(bins - 1);
            for i in 1..bins {
                let e = quantile_sorted(&col, i as f64 / bins as f64);
                if e < max && edges.last().is_none_or(|&last| e > last) {
                    edges.push(e);
                }
            }
            edges
        })
        .collect();
    Ok(DiscretizationMap { bins, edges })
}

/// Maps every raw value to its bin index.
pub fn apply_discretizer(table: &RawTable, map: &DiscretizationMap) -> Result<BinnedFeatures> {
    if table.n_features() != map.n_features() {
        return Err(Error::Shape(format!(
            "table has {} features, discretizer {}",
            table.n_features(),
            map.n_features()
        )));
    }
    let mut bins = Vec::with_capacity(table.n_rows() * table.n_features());
    for i in 0..table.n_rows() {
        for (j, &v) in table.row(i).iter().enumerate() {
            bins.push(map.bin(j, v) as u32);
        }
    }
    Ok(BinnedFeatures {
        n_rows: table.n_rows(),
        cardinalities: map.cardinalities(),
        bins,
    })
}

impl BinnedFeatures {
    pub fn new(cardinalities: Vec<usize>, bins: Vec<u32>) -> Result<Self> {
        let d = cardinalities.len();
        if d == 0 || !bins.len().is_multiple_of(d) {
            return Err(Error::Shape(format!("{} bin indices for {d} features", bins.len())));
        }
        for (k, &b) in bins.iter().enumerate() {
            if b as usize >= cardinalities[k % d] {
                return Err(Error::Shape(format!(
                    "bin {b} out of range for feature {} with {} bins",
                    k % d,
                    cardinalities[k % d]
                )));
            }
        }
        Ok(BinnedFeatures {
            n_rows: bins.len() / d,
            cardinalities,
            bins,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.n_features();
        &self.bins[i * d..(i + 1) * d]
    }

    pub fn select_rows(&self, rows: &[usize]) -> BinnedFeatures {
        let mut bins = Vec::with_capacity(rows.len() * self.n_features());
        for &i in rows {
            bins.extend_from_slice(self.row(i));
        }
        BinnedFeatures {
            n_rows: rows.len(),
            cardinalities: self.cardinalities.clone(),
            bins,
        }
    }
}
