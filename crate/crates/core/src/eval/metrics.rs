use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which slice of the test split a [`ScoredSet`] covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subset {
    ApprovedTest,
    RejectedTest,
    CombinedTest,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::ApprovedTest, Subset::RejectedTest, Subset::CombinedTest];

    pub fn as_str(self) -> &'static str {
        match self {
            Subset::ApprovedTest => "approved",
            Subset::RejectedTest => "rejected",
            Subset::CombinedTest => "combined",
        }
    }
}

/// Scores paired with binary labels (1 = default, the positive class).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSet {
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
}

impl ScoredSet {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} scores for {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::UndefinedMetric("NaN score".into()));
        }
        Ok(ScoredSet { scores, labels })
    }

    fn class_counts(&self) -> Result<(usize, usize)> {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        let neg = self.labels.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::UndefinedMetric(format!(
                "need both classes, got {pos} positives and {neg} negatives"
            )));
        }
        Ok((pos, neg))
    }

    /// Indices sorted by descending score.
    fn order_desc(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        order
    }
}

/// Area under the ROC curve: the probability that a random positive
/// outscores a random negative, ties counting one half. Computed from the
/// rank-sum statistic with midranks.
pub fn auc(set: &ScoredSet) -> Result<f64> {
    let (pos, neg) = set.class_counts()?;
    let mut order: Vec<usize> = (0..set.scores.len()).collect();
    order.sort_by(|&a, &b| set.scores[a].total_cmp(&set.scores[b]));

    // ranks are 1-based; a tie group spanning ranks lo..=hi shares (lo+hi)/2
    let mut positive_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && set.scores[order[end]] == set.scores[order[start]] {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        let group_pos = order[start..end].iter().filter(|&&i| set.labels[i] == 1).count();
        positive_rank_sum += midrank * group_pos as f64;
        start = end;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Kolmogorov-Smirnov statistic: the largest `|TPR - FPR|` over all
/// thresholds, where a row is flagged when its score is at least the
/// threshold. Thresholds sweep every distinct score plus both infinities.
pub fn ks(set: &ScoredSet) -> Result<f64> {
    let (pos, neg) = set.class_counts()?;
    let order = set.order_desc();
    let (mut tp, mut fp) = (0usize, 0usize);
    // threshold +inf flags nothing: |0 - 0| = 0
    let mut best: f64 = 0.0;
    let mut k = 0;
    while k < order.len() {
        let score = set.scores[order[k]];
        while k < order.len() && set.scores[order[k]] == score {
            if set.labels[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        let diff = (tp as f64 / pos as f64 - fp as f64 / neg as f64).abs();
        best = best.max(diff);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(scores: &[f64], labels: &[u8]) -> ScoredSet {
        ScoredSet::new(scores.to_vec(), labels.to_vec()).unwrap()
    }

    #[test]
    fn perfect_and_tied_rankings() {
        let perfect = set(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        assert_eq!(auc(&perfect).unwrap(), 1.0);
        assert_eq!(ks(&perfect).unwrap(), 1.0);
        let tied = set(&[0.3; 6], &[1, 0, 1, 0, 0, 1]);
        assert_eq!(auc(&tied).unwrap(), 0.5);
        assert_eq!(ks(&tied).unwrap(), 0.0);
    }

    #[test]
    fn four_point_case() {
        let s = set(&[0.9, 0.4, 0.6, 0.1], &[1, 0, 1, 0]);
        assert_eq!(auc(&s).unwrap(), 1.0);
        // flipping the 0.1 label: positives {0.9, 0.6, 0.1}, negative {0.4};
        // pairs won 2 of 3
        let flipped = set(&[0.9, 0.4, 0.6, 0.1], &[1, 0, 1, 1]);
        assert!((auc(&flipped).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn one_class_is_undefined() {
        let s = set(&[0.1, 0.2], &[1, 1]);
        assert!(matches!(auc(&s), Err(Error::UndefinedMetric(_))));
        assert!(matches!(ks(&s), Err(Error::UndefinedMetric(_))));
        assert!(ScoredSet::new(vec![0.1], vec![]).is_err());
    }
}
