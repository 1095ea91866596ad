use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmtnet::data::{prepare_synthetic, BinnedFeatures, Dataset, SplitMode, SyntheticSetup, SyntheticSpec};
use rmtnet::models::{fit, ModelConfig, ModelKind, RmtNet, RmtObjectiveOptions, RmtShape, SavedModel};
use rmtnet::nncore::{grad_check, ParamSet};

fn small_dataset(seed: u64) -> Dataset {
    let setup = SyntheticSetup {
        spec: SyntheticSpec {
            n: 900,
            d: 5,
            seed,
            base_rate: 0.4,
            signal: 2.0,
            ..Default::default()
        },
        epsilon: 1.0,
        bins: 5,
        mode: SplitMode::ApprovalRejection,
    };
    prepare_synthetic(&setup).unwrap().dataset
}

fn fixed_epochs(epochs: usize) -> ModelConfig {
    ModelConfig {
        epochs,
        patience: epochs,
        batch_size: 64,
        seed: 3,
        ..Default::default()
    }
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, cards: &[usize], policies: usize) -> Dataset {
    let mut bins = Vec::new();
    for _ in 0..n {
        for &c in cards {
            bins.push(rng.random_range(0..c as u32));
        }
    }
    let r: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.4))).collect();
    let y: Vec<Option<u8>> = (0..n).map(|_| Some(u8::from(rng.random_bool(0.3)))).collect();
    let policy: Vec<usize> = (0..n).map(|i| 1 + i % policies).collect();
    Dataset::new(BinnedFeatures::new(cards.to_vec(), bins).unwrap(), r, y, policy).unwrap()
}

#[test]
fn gradients_match_central_differences_across_depths_and_policies() {
    let cards = [3, 4, 2, 5, 3];
    for layers in 2..=4 {
        for policies in 1..=3 {
            for seed in 0..2 {
                let mut rng = ChaCha8Rng::seed_from_u64(100 * layers as u64 + 10 * policies as u64 + seed);
                let data = random_dataset(&mut rng, 16, &cards, policies);
                let shape = RmtShape {
                    embedding_dim: 2,
                    hidden: 4,
                    layers,
                    policies,
                };
                let mut net = RmtNet::init(&cards, shape, &mut rng).unwrap();
                for t in net.tensors_mut() {
                    t.iter_mut().for_each(|v| *v += rng.random_range(-0.5..0.5));
                }
                let rows: Vec<usize> = (0..16).collect();
                let options = RmtObjectiveOptions {
                    eta: 0.3,
                    share_gradient_through_gate: true,
                    strict_policy_heads: true,
                };
                let mut grads = net.zeros_like();
                net.accumulate_loss(&data, &rows, options, Some(&mut grads)).unwrap();
                let report = grad_check(
                    &net,
                    &grads,
                    |p| p.accumulate_loss(&data, &rows, options, None).unwrap().total,
                    1e-5,
                );
                assert!(report.passes(1e-4), "t={layers} M={policies}: {report:?}");
            }
        }
    }
}

#[test]
fn multi_policy_network_with_one_policy_is_the_single_policy_network() {
    let data = small_dataset(1);
    let config = fixed_epochs(50);
    let a = fit(ModelKind::RmtNet, &data, &config).unwrap();
    let b = fit(ModelKind::RmtNetPp, &data, &config).unwrap();
    assert_eq!(a.log.epochs.len(), 50);
    assert_eq!(a.log, b.log);
    assert_eq!(a.predictor, b.predictor);
    for i in 0..data.n_rows() {
        assert_eq!(
            a.predictor.prob(data.bins(i)).unwrap(),
            b.predictor.prob(data.bins(i)).unwrap()
        );
    }
}

#[test]
fn hidden_outcomes_never_reach_training() {
    let data = small_dataset(2);
    let mut hidden: Vec<Option<u8>> = data.evaluation_labels().as_slice().to_vec();
    let rejected = data.rejected_rows();
    let mut values: Vec<Option<u8>> = rejected.iter().map(|&i| hidden[i]).collect();
    values.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    values.iter_mut().step_by(3).for_each(|v| *v = v.map(|y| 1 - y));
    for (&i, v) in rejected.iter().zip(values) {
        hidden[i] = v;
    }
    let permuted = data.with_hidden_labels(hidden).unwrap();
    assert_ne!(permuted.evaluation_labels(), data.evaluation_labels());

    let config = fixed_epochs(10);
    for kind in ModelKind::ALL {
        let a = fit(kind, &data, &config).unwrap();
        let b = fit(kind, &permuted, &config).unwrap();
        assert_eq!(a.predictor, b.predictor, "{kind}");
        assert_eq!(a.log, b.log, "{kind}");
    }

    let rows = data.training_rows();
    let net = RmtNet::init(
        data.cardinalities(),
        RmtShape {
            embedding_dim: 4,
            hidden: 8,
            layers: 3,
            policies: 1,
        },
        &mut ChaCha8Rng::seed_from_u64(4),
    )
    .unwrap();
    let options = RmtObjectiveOptions {
        eta: 0.5,
        share_gradient_through_gate: true,
        strict_policy_heads: true,
    };
    let mut ga = net.zeros_like();
    let mut gb = net.zeros_like();
    let la = net.accumulate_loss(&data, &rows, options, Some(&mut ga)).unwrap();
    let lb = net.accumulate_loss(&permuted, &rows, options, Some(&mut gb)).unwrap();
    assert_eq!(la, lb);
    assert_eq!(ga.flatten(), gb.flatten());
}

#[test]
fn snapshots_restore_identical_predictions() {
    let data = small_dataset(3);
    let config = fixed_epochs(5);
    for kind in ModelKind::ALL {
        let fitted = fit(kind, &data, &config).unwrap();
        let bytes = fitted.snapshot().to_bytes();
        let snapshot = rmtnet::nncore::snapshot::Snapshot::read_from(bytes.as_slice()).unwrap();
        let saved = SavedModel::from_snapshot(&snapshot).unwrap();
        assert_eq!(saved.kind, kind);
        assert_eq!(saved.predictor, fitted.predictor, "{kind}");
        assert_eq!(snapshot.to_bytes(), bytes);
    }
}

#[test]
fn refits_are_bit_reproducible() {
    let data = small_dataset(4);
    let config = fixed_epochs(8);
    for kind in ModelKind::ALL {
        let a = fit(kind, &data, &config).unwrap();
        let b = fit(kind, &data, &config).unwrap();
        assert_eq!(a.snapshot().to_bytes(), b.snapshot().to_bytes(), "{kind}");
    }
}
