use qbind::circuit::{build_ansatz, AnsatzId, Encoding, EncodingSpec};
use qbind::data::synthetic_samples;
use qbind::grad::{circuit_finite_difference_check, finite_difference_check};
use qbind::model::{Architecture, HybridModel};
use qbind::train::batch_gradient;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn parameter_shift_matches_finite_differences_for_every_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for ansatz in AnsatzId::ALL {
        for enc in Encoding::ALL {
            let c = build_ansatz(ansatz, EncodingSpec::standard(enc), 2).unwrap();
            for _ in 0..8 {
                let x: Vec<f64> = (0..c.feature_slots()).map(|_| rng.random_range(0.0..1.0)).collect();
                let p: Vec<f64> = (0..c.trainable_slots())
                    .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                    .collect();
                let dev = circuit_finite_difference_check(&c, &x, &p, 1e-5).unwrap();
                assert!(dev < 1e-6, "{ansatz} {enc}: {dev:e}");
            }
        }
    }
}

#[test]
fn all_model_variants_pass_the_gradient_check() {
    let samples = synthetic_samples(10, 4).unwrap();
    for arch in Architecture::ALL {
        for ansatz in AnsatzId::ALL {
            for enc in Encoding::ALL {
                let mut m = HybridModel::build(arch, ansatz, enc).unwrap();
                m.init_parameters(12);
                let dev = finite_difference_check(&m, &samples.features[0], samples.targets[0], 1e-5).unwrap();
                assert!(dev < 1e-5, "{arch} {ansatz} {enc}: {dev:e}");
            }
        }
    }
}

#[test]
fn parallel_a2_angle_every_entry_within_tolerance() {
    let mut m = HybridModel::build(Architecture::Parallel, AnsatzId::A2, Encoding::Angle).unwrap();
    assert_eq!(m.param_count(), 665);
    m.init_parameters(3);
    let s = synthetic_samples(10, 1).unwrap();
    let (x, t) = (&s.features[2], s.targets[2]);
    let (_, g) = m.backward(x, t).unwrap();
    let h = 1e-5;
    let mut probe = m.clone();
    for k in 0..m.param_count() {
        let base = m.params()[k];
        probe.params_mut()[k] = base + h;
        let plus = probe.loss(x, t).unwrap();
        probe.params_mut()[k] = base - h;
        let minus = probe.loss(x, t).unwrap();
        probe.params_mut()[k] = base;
        let numeric = (plus - minus) / (2.0 * h);
        assert!((g.0[k] - numeric).abs() < 1e-4, "entry {k}: {} vs {numeric}", g.0[k]);
    }
}

#[test]
fn small_step_along_negative_gradient_rarely_increases_loss() {
    let train = synthetic_samples(24, 8).unwrap();
    for arch in Architecture::ALL {
        let trials = 40;
        let mut descended = 0;
        for seed in 0..trials {
            let mut m = HybridModel::build(arch, AnsatzId::A4, Encoding::Amplitude).unwrap();
            m.init_parameters(seed);
            let (rmse0, grad) = batch_gradient(&m, &train).unwrap();
            for (p, g) in m.params_mut().iter_mut().zip(&grad) {
                *p -= 1e-4 * g;
            }
            let (rmse1, _) = batch_gradient(&m, &train).unwrap();
            descended += usize::from(rmse1 <= rmse0);
        }
        assert!(descended * 100 >= 95 * trials as usize, "{arch}: {descended}/{trials}");
    }
}

#[test]
fn adjoint_sweep_matches_parameter_shift_contraction() {
    use qbind::grad::{circuit_jacobian, circuit_vjp};
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    for ansatz in AnsatzId::ALL {
        for enc in Encoding::ALL {
            let c = build_ansatz(ansatz, EncodingSpec::standard(enc), 2).unwrap();
            for _ in 0..5 {
                let x: Vec<f64> = (0..c.feature_slots()).map(|_| rng.random_range(0.0..1.0)).collect();
                let p: Vec<f64> = (0..c.trainable_slots())
                    .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                    .collect();
                let w: Vec<f64> = (0..c.n_qubits()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let state = c.run(&x, &p).unwrap();
                let vjp = circuit_vjp(&c, &x, &p, &state, &w, true).unwrap();
                let jac = circuit_jacobian(&c, &x, &p, true).unwrap();
                let dot = |row: &Vec<f64>| row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                for (k, row) in jac.d_params.iter().enumerate() {
                    assert!((vjp.d_params[k] - dot(row)).abs() < 1e-12, "{ansatz} {enc} slot {k}");
                }
                for (f, row) in jac.d_features.iter().enumerate() {
                    assert!((vjp.d_features[f] - dot(row)).abs() < 1e-12, "{ansatz} {enc} feature {f}");
                }
            }
        }
    }
}

#[test]
fn model_gradient_methods_agree() {
    use qbind::grad::GradientMethod;
    let s = synthetic_samples(10, 13).unwrap();
    for arch in Architecture::ALL {
        for ansatz in AnsatzId::ALL {
            for enc in Encoding::ALL {
                let mut m = HybridModel::build(arch, ansatz, enc).unwrap();
                m.init_parameters(21);
                let (la, ga) = m.backward_with(&s.features[1], s.targets[1], GradientMethod::Adjoint).unwrap();
                let (lp, gp) = m
                    .backward_with(&s.features[1], s.targets[1], GradientMethod::ParameterShift)
                    .unwrap();
                assert_eq!(la, lp);
                let worst = ga.0.iter().zip(&gp.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(worst < 1e-10, "{arch} {ansatz} {enc}: {worst:e}");
            }
        }
    }
}
