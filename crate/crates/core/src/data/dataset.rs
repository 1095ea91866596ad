use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{apply_discretizer, BinnedFeatures, DiscretizationMap, RawTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::Schema(format!("unknown split `{other}`"))),
        }
    }
}

/// Where rejected rows go when splits are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// Rejected rows are scored at test time against their hidden outcomes.
    ApprovalRejection,
    /// Rejected rows only feed training and never reach the test set.
    ApprovalOnly,
}

/// True outcomes of rejected rows.
///
/// These exist only in simulated settings and are for evaluation; no training
/// routine reads them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenLabels(Vec<Option<u8>>);

impl HiddenLabels {
    pub fn get(&self, i: usize) -> Option<u8> {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[Option<u8>] {
        &self.0
    }
}

/// Discretized credit dataset.
///
/// Outcomes of approved rows are observable through [`Dataset::observed_default`];
/// outcomes of rejected rows are reachable only through
/// [`Dataset::evaluation_labels`]. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: BinnedFeatures,
    rejected: Vec<bool>,
    observed: Vec<Option<u8>>,
    hidden: HiddenLabels,
    policy: Vec<usize>,
    n_policies: usize,
    split: Vec<Split>,
}

impl Dataset {
    /// `y[i]` must be present for every approved row; for rejected rows it is
    /// stored as a hidden evaluation label. Policy ids are 1-based.
    pub fn new(features: BinnedFeatures, r: Vec<u8>, y: Vec<Option<u8>>, policy: Vec<usize>) -> Result<Self> {
        let n = features.n_rows();
        if r.len() != n || y.len() != n || policy.len() != n {
            return Err(Error::Shape(format!(
                "labels of lengths r={}, y={}, policy={} for {n} rows",
                r.len(),
                y.len(),
                policy.len()
            )));
        }
        if r.iter().any(|&v| v > 1) || y.iter().flatten().any(|&v| v > 1) {
            return Err(Error::Shape("labels must be 0 or 1".into()));
        }
        if policy.contains(&0) {
            return Err(Error::Shape("policy ids start at 1".into()));
        }
        let mut observed = vec![None; n];
        let mut hidden = vec![None; n];
        for i in 0..n {
            if r[i] == 1 {
                hidden[i] = y[i];
            } else {
                observed[i] =
                    Some(y[i].ok_or_else(|| Error::Protocol(format!("approved row {i} has no default label")))?);
            }
        }
        let n_policies = policy.iter().copied().max().unwrap_or(1);
        Ok(Dataset {
            features,
            rejected: r.iter().map(|&v| v == 1).collect(),
            observed,
            hidden: HiddenLabels(hidden),
            policy,
            n_policies,
            split: vec![Split::Train; n],
        })
    }

    /// Discretizes a labelled raw table. Requires `r`; missing policy ids default to 1.
    pub fn from_raw(table: &RawTable, map: &DiscretizationMap) -> Result<Self> {
        let features = apply_discretizer(table, map)?;
        let r = table
            .r
            .clone()
            .ok_or_else(|| Error::Protocol("table has no rejection labels".into()))?;
        let y = table.y.clone().unwrap_or_else(|| vec![None; table.n_rows()]);
        let policy = table.policy.clone().unwrap_or_else(|| vec![1; table.n_rows()]);
        Dataset::new(features, r, y, policy)
    }

    pub fn n_rows(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_features()
    }

    pub fn cardinalities(&self) -> &[usize] {
        self.features.cardinalities()
    }

    pub fn features(&self) -> &BinnedFeatures {
        &self.features
    }

    pub fn bins(&self, i: usize) -> &[u32] {
        self.features.row(i)
    }

    pub fn is_rejected(&self, i: usize) -> bool {
        self.rejected[i]
    }

    pub fn rejection_label(&self, i: usize) -> u8 {
        u8::from(self.rejected[i])
    }

    /// Default label of an approved row; `None` for every rejected row.
    pub fn observed_default(&self, i: usize) -> Option<u8> {
        self.observed[i]
    }

    /// 1-based policy id.
    pub fn policy(&self, i: usize) -> usize {
        self.policy[i]
    }

    pub fn n_policies(&self) -> usize {
        self.n_policies
    }

    pub fn split(&self, i: usize) -> Split {
        self.split[i]
    }

    /// Ground-truth outcome of row `i` for evaluation: the observed label of
    /// an approved row or the hidden label of a rejected one.
    pub fn evaluation_label(&self, i: usize) -> Option<u8> {
        self.observed[i].or(self.hidden.get(i))
    }

    pub fn evaluation_labels(&self) -> &HiddenLabels {
        &self.hidden
    }

    pub fn has_hidden_labels(&self) -> bool {
        self.hidden.0.iter().any(Option::is_some)
    }

    /// Copy with different hidden outcomes for the rejected rows.
    pub fn with_hidden_labels(&self, hidden: Vec<Option<u8>>) -> Result<Self> {
        if hidden.len() != self.n_rows() {
            return Err(Error::Shape("hidden label count".into()));
        }
        if hidden.iter().enumerate().any(|(i, h)| h.is_some() && !self.rejected[i]) {
            return Err(Error::Contract("hidden labels belong to rejected rows only".into()));
        }
        let mut out = self.clone();
        out.hidden = HiddenLabels(hidden);
        Ok(out)
    }

    pub fn rows_where(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| pred(i)).collect()
    }

    /// Approved rows carrying the given split tag.
    pub fn approved_rows(&self, split: Split) -> Vec<usize> {
        self.rows_where(|i| !self.rejected[i] && self.split[i] == split)
    }

    pub fn rejected_rows(&self) -> Vec<usize> {
        self.rows_where(|i| self.rejected[i])
    }

    /// Rows available to training: approved training rows plus every
    /// rejected row. Rejected rows contribute features and the rejection
    /// label only, whatever their split tag.
    pub fn training_rows(&self) -> Vec<usize> {
        self.rows_where(|i| self.rejected[i] || self.split[i] == Split::Train)
    }

    /// Randomly partitions approved rows 60/20/20 into train/val/test.
    /// Rejected rows are tagged test in approval-rejection mode and train in
    /// approval-only mode.
    pub fn assign_splits(&self, seed: u64, mode: SplitMode) -> Result<Dataset> {
        let mut approved = self.rows_where(|i| !self.rejected[i]);
        if approved.len() < 5 {
            return Err(Error::Protocol(format!(
                "{} approved rows cannot be split 60/20/20",
                approved.len()
            )));
        }
        approved.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n = approved.len();
        let n_train = (n * 3 + 2) / 5;
        let n_val = (n + 2) / 5;
        let mut split = vec![Split::Test; self.n_rows()];
        for (k, &i) in approved.iter().enumerate() {
            split[i] = if k < n_train {
                Split::Train
            } else if k < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
        }
        let rejected_tag = match mode {
            SplitMode::ApprovalRejection => Split::Test,
            SplitMode::ApprovalOnly => Split::Train,
        };
        for (i, s) in split.iter_mut().enumerate() {
            if self.rejected[i] {
                *s = rejected_tag;
            }
        }
        let mut out = self.clone();
        out.split = split;
        Ok(out)
    }

    /// Rejection ratio and default ratios among approved and rejected rows of one policy.
    pub fn policy_ratios(&self, policy: usize) -> PolicyRatios {
        let rows = self.rows_where(|i| self.policy[i] == policy);
        let rejected: Vec<usize> = rows.iter().copied().filter(|&i| self.rejected[i]).collect();
        let approved: Vec<usize> = rows.iter().copied().filter(|&i| !self.rejected[i]).collect();
        let rate = |rows: &[usize]| -> Option<f64> {
            let labels: Vec<u8> = rows.iter().filter_map(|&i| self.evaluation_label(i)).collect();
            (!labels.is_empty() && labels.len() == rows.len())
                .then(|| labels.iter().map(|&v| f64::from(v)).sum::<f64>() / labels.len() as f64)
        };
        PolicyRatios {
            policy,
            rows: rows.len(),
            rejection_ratio: rejected.len() as f64 / rows.len().max(1) as f64,
            approved_default_ratio: rate(&approved),
            rejected_default_ratio: rate(&rejected),
        }
    }

    /// Writes bins, labels, policy ids and split tags. The hidden outcome of
    /// rejected rows goes to its own `y_hidden` column.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.n_features()).map(|j| format!("b{j}")).collect();
        header.extend(["r", "y", "y_hidden", "policy", "split"].map(String::from));
        out.write_record(&header).map_err(csv_error)?;
        for i in 0..self.n_rows() {
            let mut rec: Vec<String> = self.bins(i).iter().map(u32::to_string).collect();
            rec.push(self.rejection_label(i).to_string());
            rec.push(self.observed[i].map(|v| v.to_string()).unwrap_or_default());
            rec.push(self.hidden.get(i).map(|v| v.to_string()).unwrap_or_default());
            rec.push(self.policy[i].to_string());
            rec.push(self.split[i].as_str().to_string());
            out.write_record(&rec).map_err(csv_error)?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(reader: R, cardinalities: Vec<usize>) -> Result<Dataset> {
        let d = cardinalities.len();
        let mut rdr = csv::Reader::from_reader(reader);
        let header = rdr.headers().map_err(csv_error)?.clone();
        if header.len() != d + 5 {
            return Err(Error::Schema(format!(
                "dataset file has {} columns, expected {}",
                header.len(),
                d + 5
            )));
        }
        let mut bins = Vec::new();
        let (mut r, mut y, mut policy, mut split) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let bad = |what: &str| Error::Parse {
                line,
                message: format!("bad {what}"),
            };
            for j in 0..d {
                bins.push(record[j].parse::<u32>().map_err(|_| bad("bin index"))?);
            }
            let rv: u8 = record[d].parse().map_err(|_| bad("r"))?;
            let observed = parse_opt(&record[d + 1]).map_err(|_| bad("y"))?;
            let hidden = parse_opt(&record[d + 2]).map_err(|_| bad("y_hidden"))?;
            r.push(rv);
            y.push(if rv == 1 { hidden } else { observed });
            policy.push(record[d + 3].parse::<usize>().map_err(|_| bad("policy"))?);
            split.push(record[d + 4].parse::<Split>()?);
        }
        let mut ds = Dataset::new(BinnedFeatures::new(cardinalities, bins)?, r, y, policy)?;
        ds.split = split;
        Ok(ds)
    }

    pub fn load(path: impl AsRef<Path>, cardinalities: Vec<usize>) -> Result<Dataset> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Dataset::read_csv(file, cardinalities)
    }
}

fn parse_opt(field: &str) -> std::result::Result<Option<u8>, std::num::ParseIntError> {
    if field.is_empty() {
        Ok(None)
    } else {
        field.parse().map(Some)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map(|p| p.line()).unwrap_or(0),
        message: e.to_string(),
    }
}

/// One row of a rejection/default ratio table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRatios {
    pub policy: usize,
    pub rows: usize,
    pub rejection_ratio: f64,
    pub approved_default_ratio: Option<f64>,
    pub rejected_default_ratio: Option<f64>,
}
