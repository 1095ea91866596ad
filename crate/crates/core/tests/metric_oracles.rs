use proptest::prelude::*;
use rmtnet::eval::{auc, ks, phi_correlation, ContingencyTable, ScoredSet};

fn pair_count_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li == 1 && lj == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn threshold_sweep_ks(scores: &[f64], labels: &[u8]) -> f64 {
    let pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let neg = labels.len() as f64 - pos;
    let mut thresholds = scores.to_vec();
    thresholds.push(f64::INFINITY);
    thresholds.push(f64::NEG_INFINITY);
    thresholds
        .iter()
        .map(|&t| {
            let tp = scores.iter().zip(labels).filter(|(s, l)| **s >= t && **l == 1).count() as f64;
            let fp = scores.iter().zip(labels).filter(|(s, l)| **s >= t && **l == 0).count() as f64;
            (tp / pos - fp / neg).abs()
        })
        .fold(0.0, f64::max)
}

/// Scores drawn from a small grid so that ties are common.
fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..=200)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop_oneof![(0u32..12).prop_map(|k| k as f64 / 11.0), 0.0f64..1.0], n),
                prop::collection::vec(0u8..=1, n),
            )
        })
        .prop_filter("both classes", |(_, l)| l.contains(&0) && l.contains(&1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn auc_matches_pair_counting((scores, labels) in instance()) {
        let set = ScoredSet::new(scores.clone(), labels.clone()).unwrap();
        prop_assert!((auc(&set).unwrap() - pair_count_auc(&scores, &labels)).abs() < 1e-12);
    }

    #[test]
    fn ks_matches_threshold_sweep((scores, labels) in instance()) {
        let set = ScoredSet::new(scores.clone(), labels.clone()).unwrap();
        prop_assert!((ks(&set).unwrap() - threshold_sweep_ks(&scores, &labels)).abs() < 1e-12);
    }

    #[test]
    fn metrics_ignore_monotone_rescaling((scores, labels) in instance()) {
        let a = ScoredSet::new(scores.clone(), labels.clone()).unwrap();
        let b = ScoredSet::new(scores.iter().map(|s| 3.0 * s - 1.0).collect(), labels).unwrap();
        prop_assert_eq!(auc(&a).unwrap(), auc(&b).unwrap());
        prop_assert_eq!(ks(&a).unwrap(), ks(&b).unwrap());
    }
}

#[test]
fn all_tied_scores() {
    let set = ScoredSet::new(vec![0.3; 6], vec![1, 0, 1, 0, 0, 1]).unwrap();
    assert_eq!(auc(&set).unwrap(), 0.5);
    assert_eq!(ks(&set).unwrap(), 0.0);
}

#[test]
fn single_class_is_undefined() {
    let set = ScoredSet::new(vec![0.1, 0.2], vec![1, 1]).unwrap();
    assert!(auc(&set).is_err());
    assert!(ks(&set).is_err());
}

#[test]
fn phi_matches_the_product_moment_correlation() {
    let y: Vec<u8> = (0..60).map(|i| u8::from(i % 3 == 0 || i % 7 == 0)).collect();
    let r: Vec<u8> = (0..60).map(|i| u8::from(i % 2 == 0 || i % 7 == 0)).collect();
    let mean = |v: &[u8]| v.iter().map(|&x| f64::from(x)).sum::<f64>() / v.len() as f64;
    let (my, mr) = (mean(&y), mean(&r));
    let cov: f64 = y
        .iter()
        .zip(&r)
        .map(|(&a, &b)| (f64::from(a) - my) * (f64::from(b) - mr))
        .sum();
    let var = |v: &[u8], m: f64| v.iter().map(|&x| (f64::from(x) - m).powi(2)).sum::<f64>();
    let pearson = cov / (var(&y, my) * var(&r, mr)).sqrt();
    let table = ContingencyTable::from_labels(&y, &r).unwrap();
    assert!((phi_correlation(&table).unwrap() - pearson).abs() < 1e-12);
}
