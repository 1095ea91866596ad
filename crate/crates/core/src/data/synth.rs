use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::RawTable;
use crate::error::{Error, Result};
use crate::nncore::sigmoid;

/// Parameters of the ground-truth generator for synthetic credit data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    /// Standard deviation of the Gaussian noise added to the true logit.
    pub noise: f64,
    /// Euclidean norm of the true coefficient vector.
    pub signal: f64,
    /// Default probability at the feature origin.
    pub base_rate: f64,
    /// Share of variance every feature takes from one common factor.
    pub correlation: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n: 20_000,
            d: 20,
            noise: 0.5,
            signal: 1.5,
            base_rate: 0.15,
            correlation: 0.2,
            seed: 0,
        }
    }
}

/// A fully labelled table drawn from a logistic default model, plus the true coefficients.
#[derive(Debug, Clone)]
pub struct SyntheticTable {
    pub table: RawTable,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl SyntheticTable {
    /// Noise-free true default probability of a raw row.
    pub fn true_probability(&self, row: &[f64]) -> f64 {
        let z: f64 = row.iter().zip(&self.coefficients).map(|(x, w)| x * w).sum();
        sigmoid(z + self.intercept)
    }
}

pub fn generate_table(spec: &SyntheticSpec) -> Result<SyntheticTable> {
    if spec.d == 0 || spec.n == 0 {
        return Err(Error::Config("synthetic table needs n > 0 and d > 0".into()));
    }
    if !(0.0..1.0).contains(&spec.correlation) || !(0.0 < spec.base_rate && spec.base_rate < 1.0) {
        return Err(Error::Config(
            "correlation must be in [0,1) and base_rate in (0,1)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let raw: Vec<f64> = (0..spec.d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = raw.iter().map(|w| w * w).sum::<f64>().sqrt().max(1e-12);
    let coefficients: Vec<f64> = raw.iter().map(|w| w * spec.signal / norm).collect();
    let intercept = (spec.base_rate / (1.0 - spec.base_rate)).ln();

    let shared = spec.correlation.sqrt();
    let own = (1.0 - spec.correlation).sqrt();
    let mut values = Vec::with_capacity(spec.n * spec.d);
    let mut y = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let factor: f64 = rng.sample(StandardNormal);
        let start = values.len();
        for _ in 0..spec.d {
            let own_part: f64 = rng.sample(StandardNormal);
            values.push(shared * factor + own * own_part);
        }
        let noise: f64 = rng.sample(StandardNormal);
        let z: f64 = values[start..]
            .iter()
            .zip(&coefficients)
            .map(|(x, w)| x * w)
            .sum::<f64>()
            + intercept
            + spec.noise * noise;
        let u: f64 = rng.random();
        y.push(Some(u8::from(u < sigmoid(z))));
    }
    let names = (0..spec.d).map(|j| format!("x{j}")).collect();
    let table = RawTable::new(names, values)?.with_y(y)?;
    Ok(SyntheticTable {
        table,
        coefficients,
        intercept,
    })
}

/// A fitted synthetic approval policy: a logistic model over a random feature subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPolicy {
    pub epsilon: f64,
    /// Indices of the `ceil(epsilon * d)` features the policy sees, ascending.
    pub feature_subset: Vec<usize>,
    /// Coefficients on the raw (unstandardized) scale, aligned with `feature_subset`.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Accuracy of the policy on the rows it was fitted on.
    pub training_accuracy: f64,
    /// Share of the fitting rows labelled default, i.e. the majority-class baseline is `max(b, 1-b)`.
    pub training_default_rate: f64,
}

impl SynthPolicy {
    /// Predicted default probability of a raw row.
    pub fn score(&self, row: &[f64]) -> f64 {
        let z: f64 = self
            .feature_subset
            .iter()
            .zip(&self.coefficients)
            .map(|(&j, w)| row[j] * w)
            .sum();
        sigmoid(z + self.intercept)
    }

    pub fn better_than_chance(&self) -> bool {
        self.training_accuracy > self.training_default_rate.max(1.0 - self.training_default_rate)
    }
}

/// Logistic regression fitted by full-batch gradient descent.
#[derive(Debug, Clone, Copy)]
pub struct PolicyFit {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Ridge penalty on the standardized coefficients; keeps separable data bounded.
    pub l2: f64,
}

impl Default for PolicyFit {
    fn default() -> Self {
        PolicyFit {
            tolerance: 1e-6,
            max_iterations: 5_000,
            l2: 1e-4,
        }
    }
}

/// Number of features a policy with strength `epsilon` uses out of `d`.
pub fn policy_feature_count(epsilon: f64, d: usize) -> usize {
    // the small slack keeps products like 0.3 * 10 from rounding up
    (((epsilon * d as f64) - 1e-9).ceil() as usize).clamp(1, d)
}

fn fit_policy(
    table: &RawTable,
    rows: &[usize],
    labels: &[f64],
    features: &[usize],
    epsilon: f64,
    fit: PolicyFit,
) -> SynthPolicy {
    let n = rows.len() as f64;
    let k = features.len();
    // standardize on the fitting rows
    let mut mean = vec![0.0; k];
    let mut sd = vec![0.0; k];
    for &i in rows {
        let row = table.row(i);
        for (m, &j) in mean.iter_mut().zip(features) {
            *m += row[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    for &i in rows {
        let row = table.row(i);
        for ((s, m), &j) in sd.iter_mut().zip(&mean).zip(features) {
            *s += (row[j] - m).powi(2);
        }
    }
    sd.iter_mut().for_each(|s| *s = (*s / n).sqrt().max(1e-12));
    let design: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| {
            let row = table.row(i);
            features
                .iter()
                .zip(mean.iter().zip(&sd))
                .map(|(&j, (m, s))| (row[j] - m) / s)
                .collect()
        })
        .collect();

    // 1/L step: the mean-loss Hessian is bounded by (trace of the covariance + 1) / 4 + l2
    let step = 1.0 / ((k as f64 + 1.0) / 4.0 + fit.l2);
    let mut w = vec![0.0; k];
    let mut b = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    let mut gw = vec![0.0; k];
    while iterations < fit.max_iterations {
        iterations += 1;
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for (x, &y) in design.iter().zip(labels) {
            let z: f64 = x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b;
            let d = sigmoid(z) - y;
            for (g, xi) in gw.iter_mut().zip(x) {
                *g += d * xi;
            }
            gb += d;
        }
        let mut norm2 = (gb / n).powi(2);
        for (g, wi) in gw.iter_mut().zip(&w) {
            *g = *g / n + fit.l2 * wi;
            norm2 += *g * *g;
        }
        if norm2.sqrt() < fit.tolerance {
            converged = true;
            break;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= step * g;
        }
        b -= step * gb / n;
    }

    let correct = design
        .iter()
        .zip(labels)
        .filter(|(x, &y)| {
            let z: f64 = x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b;
            (sigmoid(z) >= 0.5) == (y == 1.0)
        })
        .count();
    let coefficients: Vec<f64> = w.iter().zip(&sd).map(|(wi, s)| wi / s).collect();
    let intercept = b - coefficients.iter().zip(&mean).map(|(c, m)| c * m).sum::<f64>();
    SynthPolicy {
        epsilon,
        feature_subset: features.to_vec(),
        coefficients,
        intercept,
        iterations,
        converged,
        training_accuracy: correct as f64 / n,
        training_default_rate: labels.iter().sum::<f64>() / n,
    }
}

/// Simulates a credit approval system on fully labelled data.
///
/// A random third of the rows (the initial samples) and `ceil(epsilon * d)`
/// random features fit a logistic policy on the default label. The policy
/// scores the remaining rows (the main samples); the three quarters with the
/// highest predicted default probability are rejected (`r = 1`), the rest
/// approved. Initial samples are dropped. Every surviving row keeps its true
/// label in `y`; for rejected rows it is only usable as an evaluation label.
pub fn generate_synthetic_rejection(table: &RawTable, epsilon: f64, seed: u64) -> Result<(RawTable, SynthPolicy)> {
    generate_synthetic_rejection_with(table, epsilon, seed, PolicyFit::default())
}

pub fn generate_synthetic_rejection_with(
    table: &RawTable,
    epsilon: f64,
    seed: u64,
    fit: PolicyFit,
) -> Result<(RawTable, SynthPolicy)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let y = table
        .y
        .as_ref()
        .ok_or_else(|| Error::Protocol("synthetic rejection needs ground-truth labels".into()))?;
    if y.iter().any(Option::is_none) {
        return Err(Error::Protocol("synthetic rejection needs a label on every row".into()));
    }
    let n = table.n_rows();
    if n < 6 {
        return Err(Error::Protocol(format!("{n} rows are too few to simulate a policy")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n_initial = n / 3;
    let (initial, main) = order.split_at(n_initial);

    let d = table.n_features();
    let mut features = index::sample(&mut rng, d, policy_feature_count(epsilon, d)).into_vec();
    features.sort_unstable();

    let labels: Vec<f64> = initial.iter().map(|&i| f64::from(y[i].unwrap())).collect();
    let policy = fit_policy(table, initial, &labels, &features, epsilon, fit);

    let mut main: Vec<usize> = main.to_vec();
    main.sort_unstable();
    let scores: Vec<f64> = main.iter().map(|&i| policy.score(table.row(i))).collect();
    let mut ranked: Vec<usize> = (0..main.len()).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let n_rejected = rejected_count(main.len());
    let mut r = vec![0u8; main.len()];
    for &k in &ranked[..n_rejected] {
        r[k] = 1;
    }

    let mut out = table.select_rows(&main);
    out.r = Some(r);
    out.policy = Some(vec![1; main.len()]);
    Ok((out, policy))
}

/// Three quarters of `n_main`, rounded half up.
pub fn rejected_count(n_main: usize) -> usize {
    (3 * n_main + 2) / 4
}

/// Result of running the synthetic policy simulation on several subsets.
#[derive(Debug, Clone)]
pub struct Composition {
    pub table: RawTable,
    pub policies: Vec<SynthPolicy>,
    pub warnings: Vec<String>,
}

impl Composition {
    pub fn n_policies(&self) -> usize {
        self.policies.len()
    }
}

/// Simulates one independent policy per subset and stacks the results,
/// tagging rows of the `m`-th subset with policy id `m` (1-based).
pub fn compose_multi_policy(subsets: &[(RawTable, f64, u64)]) -> Result<Composition> {
    if subsets.is_empty() {
        return Err(Error::Config("no subsets to compose".into()));
    }
    let mut warnings = Vec::new();
    if subsets.len() == 1 {
        warnings.push("a single subset degenerates to the single-policy setting (M = 1)".to_string());
    }
    let mut parts = Vec::with_capacity(subsets.len());
    let mut policies = Vec::with_capacity(subsets.len());
    for (m, (table, epsilon, seed)) in subsets.iter().enumerate() {
        let (mut part, policy) = generate_synthetic_rejection(table, *epsilon, *seed)?;
        part.policy = Some(vec![m + 1; part.n_rows()]);
        parts.push(part);
        policies.push(policy);
    }
    Ok(Composition {
        table: RawTable::concat(&parts)?,
        policies,
        warnings,
    })
}

/// Randomly splits a table into `parts` subsets whose sizes differ by at most one.
pub fn split_equal(table: &RawTable, parts: usize, seed: u64) -> Result<Vec<RawTable>> {
    if parts == 0 || parts > table.n_rows() {
        return Err(Error::Config(format!(
            "cannot split {} rows into {parts} parts",
            table.n_rows()
        )));
    }
    let mut order: Vec<usize> = (0..table.n_rows()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = table.n_rows() / parts;
    let extra = table.n_rows() % parts;
    let mut start = 0;
    Ok((0..parts)
        .map(|p| {
            let len = base + usize::from(p < extra);
            let mut rows = order[start..start + len].to_vec();
            rows.sort_unstable();
            start += len;
            table.select_rows(&rows)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n: 600,
            d: 6,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_table(&small_spec(4)).unwrap();
        let b = generate_table(&small_spec(4)).unwrap();
        assert_eq!(a.table, b.table);
        let c = generate_table(&small_spec(5)).unwrap();
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn coefficient_norm_matches_signal() {
        let t = generate_table(&small_spec(1)).unwrap();
        let norm: f64 = t.coefficients.iter().map(|w| w * w).sum::<f64>().sqrt();
        assert!((norm - 1.5).abs() < 1e-12);
    }

    #[test]
    fn three_quarters_of_main_rows_are_rejected() {
        let t = generate_table(&small_spec(2)).unwrap();
        let (out, policy) = generate_synthetic_rejection(&t.table, 0.5, 9).unwrap();
        assert_eq!(out.n_rows(), 400);
        let rejected = out.r.as_ref().unwrap().iter().filter(|&&r| r == 1).count();
        assert_eq!(rejected, 300);
        assert_eq!(policy.feature_subset.len(), 3);
        assert!(out.y.as_ref().unwrap().iter().all(Option::is_some));
        assert_eq!(out.policy, Some(vec![1; 400]));
    }

    #[test]
    fn feature_count_is_ceiling() {
        assert_eq!(policy_feature_count(0.5, 20), 10);
        assert_eq!(policy_feature_count(0.5, 5), 3);
        assert_eq!(policy_feature_count(0.3, 10), 3);
        assert_eq!(policy_feature_count(1.0, 7), 7);
        assert_eq!(policy_feature_count(0.01, 7), 1);
    }

    #[test]
    fn rejection_ranks_by_policy_score() {
        let t = generate_table(&small_spec(3)).unwrap();
        let (out, policy) = generate_synthetic_rejection(&t.table, 1.0, 1).unwrap();
        let r = out.r.as_ref().unwrap();
        let min_rejected = (0..out.n_rows())
            .filter(|&i| r[i] == 1)
            .map(|i| policy.score(out.row(i)))
            .fold(f64::INFINITY, f64::min);
        let max_approved = (0..out.n_rows())
            .filter(|&i| r[i] == 0)
            .map(|i| policy.score(out.row(i)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min_rejected >= max_approved);
    }

    #[test]
    fn separable_labels_push_defaults_into_rejection() {
        // y = 1 exactly when the first feature is positive
        let rows: Vec<Vec<f64>> = (0..90)
            .map(|i| {
                let v = (i as f64 - 44.5) / 10.0;
                vec![v, ((i * 7) % 13) as f64]
            })
            .collect();
        let y = rows.iter().map(|r| Some(u8::from(r[0] > 0.0))).collect();
        let table = RawTable::from_rows(vec!["a".into(), "b".into()], &rows)
            .unwrap()
            .with_y(y)
            .unwrap();
        let (out, policy) = generate_synthetic_rejection(&table, 1.0, 5).unwrap();
        assert!(policy.better_than_chance());
        let (r, y) = (out.r.unwrap(), out.y.unwrap());
        let rate = |flag: u8| {
            let ys: Vec<f64> = (0..r.len())
                .filter(|&i| r[i] == flag)
                .map(|i| f64::from(y[i].unwrap()))
                .collect();
            ys.iter().sum::<f64>() / ys.len() as f64
        };
        assert!(rate(1) > rate(0));
    }

    #[test]
    fn protocol_errors() {
        let t = generate_table(&small_spec(2)).unwrap();
        assert!(matches!(
            generate_synthetic_rejection(&t.table, 0.0, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            generate_synthetic_rejection(&t.table, 1.5, 1),
            Err(Error::Config(_))
        ));
        let mut unlabeled = t.table.clone();
        unlabeled.y = None;
        assert!(matches!(
            generate_synthetic_rejection(&unlabeled, 0.5, 1),
            Err(Error::Protocol(_))
        ));
    }

    #[test]
    fn composition_tags_policies() {
        let t = generate_table(&small_spec(8)).unwrap();
        let parts = split_equal(&t.table, 3, 2).unwrap();
        assert!(parts.iter().all(|p| p.n_rows() == 200));
        let subsets: Vec<_> = parts.into_iter().zip([10, 11, 12]).map(|(p, s)| (p, 0.5, s)).collect();
        let comp = compose_multi_policy(&subsets).unwrap();
        assert_eq!(comp.n_policies(), 3);
        assert!(comp.warnings.is_empty());
        let ids = comp.table.policy.as_ref().unwrap();
        assert_eq!(ids.iter().filter(|&&p| p == 2).count(), comp.table.n_rows() / 3);
        assert!(ids.iter().all(|p| (1..=3).contains(p)));
    }

    #[test]
    fn single_subset_matches_single_policy_pipeline() {
        let t = generate_table(&small_spec(8)).unwrap();
        let comp = compose_multi_policy(&[(t.table.clone(), 0.5, 21)]).unwrap();
        let (single, policy) = generate_synthetic_rejection(&t.table, 0.5, 21).unwrap();
        assert_eq!(comp.table, single);
        assert_eq!(comp.policies, vec![policy]);
        assert_eq!(comp.warnings.len(), 1);
    }
}
