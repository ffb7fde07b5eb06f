use qbind::circuit::{AnsatzId, Encoding};
use qbind::data::{load_samples, save_samples, split_train_test, synthetic_samples, SampleSet};
use qbind::model::{read_checkpoint, write_checkpoint, Architecture, HybridModel};
use qbind::train::{ensemble_partition, evaluate_rmse, train, TrainConfig};
use qbind::Error;

fn model(arch: Architecture, seed: u64) -> HybridModel {
    let mut m = HybridModel::build(arch, AnsatzId::A1, Encoding::Amplitude).unwrap();
    m.init_parameters(seed);
    m
}

fn short(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        ..TrainConfig::default()
    }
}

#[test]
fn zero_learning_rate_freezes_parameters() {
    let data = synthetic_samples(30, 2).unwrap();
    for arch in Architecture::ALL {
        let m = model(arch, 1);
        let cfg = TrainConfig { lr_init: 0.0, ..short(5) };
        let (trained, hist) = train(m.clone(), &data, &data, &cfg).unwrap();
        assert_eq!(trained.params(), m.params());
        assert_eq!(hist.records.len(), 5);
        assert_eq!(hist.final_train_rmse, hist.records[0].train_rmse);
        assert!(hist.records.iter().all(|r| r.lr == 0.0));
    }
}

#[test]
fn history_starts_at_the_untrained_model() {
    let data = synthetic_samples(40, 3).unwrap();
    let (train_set, test_set) = split_train_test(&data, 0.2, 3).unwrap();
    let m = model(Architecture::Sequential, 4);
    let r0 = evaluate_rmse(&m, &train_set).unwrap();
    let t0 = evaluate_rmse(&m, &test_set).unwrap();
    let (_, hist) = train(m, &train_set, &test_set, &short(10)).unwrap();
    assert_eq!(hist.records[0].epoch, 0);
    assert!((hist.records[0].train_rmse - r0).abs() < 1e-12);
    assert!((hist.records[0].test_rmse.unwrap() - t0).abs() < 1e-12);
    assert!(hist.records.windows(2).all(|w| w[1].lr <= w[0].lr));
}

#[test]
fn training_is_deterministic_across_thread_counts() {
    let data = synthetic_samples(30, 5).unwrap();
    for arch in [Architecture::Parallel, Architecture::Ensemble] {
        let run = |workers| {
            let cfg = TrainConfig { workers, ..short(4) };
            train(model(arch, 9), &data, &data, &cfg).unwrap()
        };
        let (a, ha) = run(1);
        let (b, hb) = run(4);
        assert_eq!(a.params(), b.params());
        let rm = |h: &qbind::train::TrainHistory| h.records.iter().map(|r| r.train_rmse).collect::<Vec<_>>();
        assert_eq!(rm(&ha), rm(&hb));
    }
}

#[test]
fn ensemble_members_only_see_their_subset() {
    let data = synthetic_samples(45, 6).unwrap();
    let cfg = short(5);
    let subsets = ensemble_partition(&data, 9, cfg.seed).unwrap();
    let own: Vec<&String> = subsets[0].ids.iter().collect();
    let mut disturbed = data.clone();
    for (id, t) in disturbed.ids.iter().zip(disturbed.targets.iter_mut()) {
        if !own.contains(&id) {
            *t += 3.0;
        }
    }
    let (a, _) = train(model(Architecture::Ensemble, 2), &data, &data, &cfg).unwrap();
    let (b, _) = train(model(Architecture::Ensemble, 2), &disturbed, &disturbed, &cfg).unwrap();
    assert_eq!(a.member(0).unwrap().params(), b.member(0).unwrap().params());
    assert_ne!(a.member(1).unwrap().params(), b.member(1).unwrap().params());
}

#[test]
fn synthetic_training_halves_the_initial_rmse() {
    let data = synthetic_samples(200, 11).unwrap();
    let (train_set, test_set) = split_train_test(&data, 0.2, 11).unwrap();
    let (_, hist) = train(model(Architecture::Sequential, 11), &train_set, &test_set, &short(200)).unwrap();
    let first = hist.records[0].train_rmse;
    let last = hist.final_train_rmse;
    assert_eq!(hist.records.len(), 200);
    assert!(last <= 0.5 * first, "{first} -> {last}");
}

#[test]
fn linear_target_training_halves_the_initial_rmse() {
    let base = synthetic_samples(200, 21).unwrap();
    let targets = base
        .features
        .iter()
        .map(|x| x.iter().enumerate().map(|(i, v)| (1.0 + i as f64 / 16.0) * v).sum())
        .collect();
    let data = SampleSet::new(base.ids.clone(), base.features.clone(), targets).unwrap();
    let (_, hist) = train(model(Architecture::Sequential, 21), &data, &SampleSet::default(), &short(200)).unwrap();
    assert_eq!(hist.records.len(), 200);
    assert!(hist.final_train_rmse <= 0.5 * hist.records[0].train_rmse);
    assert!(hist.records.iter().all(|r| r.test_rmse.is_none()));
}

#[test]
fn divergence_is_a_numerical_error_naming_the_epoch() {
    let data = synthetic_samples(20, 1).unwrap();
    let cfg = TrainConfig { lr_init: 1e6, ..short(300) };
    match train(model(Architecture::Sequential, 1), &data, &data, &cfg) {
        Err(Error::Numerical(msg)) => assert!(msg.contains("epoch"), "{msg}"),
        other => panic!("expected a numerical error, got {other:?}"),
    }
}

#[test]
fn csv_and_checkpoint_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_samples(25, 8).unwrap();
    let csv = dir.path().join("s.csv");
    save_samples(&data, &csv).unwrap();
    let back = load_samples(&csv).unwrap();
    assert_eq!(back, data);
    save_samples(&back, &csv).unwrap();
    assert_eq!(load_samples(&csv).unwrap(), data);

    let (m, _) = train(model(Architecture::Parallel, 3), &data, &data, &short(3)).unwrap();
    let ck = dir.path().join("m.txt");
    write_checkpoint(&m, &ck).unwrap();
    let restored = read_checkpoint(&ck).unwrap();
    assert_eq!(restored, m);
    assert_eq!(restored.forward(&data.features[0]).unwrap(), m.forward(&data.features[0]).unwrap());
}
