//! Strategies and checks shared by the property tests and the acceptance
//! harness.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)] // brute-force oracles index on purpose

use dseld_core::data_io::{read_idx_images, read_idx_labels, write_idx_images, write_idx_labels, IdxImages};
use dseld_core::decoders::{decode_max_activation, decode_max_class_sum, ShallowNnModel};
use dseld_core::workload::inference_flops_real;
use dseld_core::{
    encode, energy, materialize_gramian, read_feature_matrix, soft_threshold, write_feature_matrix, Backend, Encoder,
    ExemplarDictionary, FeatureMatrix, InhibitionOperator, InputScaling, LcaConfig, OpTally, SparseCode,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CaseResult = Result<(), TestCaseError>;

pub const BUDGET: u64 = 1 << 30;
pub const BACKEND_TOL: f64 = 1e-6;
pub const ENERGY_TOL: f64 = 1e-6;
pub const GRADIENT_REL_TOL: f64 = 1e-4;
pub const WORKLOAD_REL_TOL: f64 = 0.05;

/// Rows of width `dim` with a nonzero first entry, labelled round-robin so
/// every class is present.
pub fn dictionary(max_atoms: usize, max_dim: usize) -> impl Strategy<Value = ExemplarDictionary> {
    (2..=max_atoms, 1..=max_dim, 1u32..=3).prop_flat_map(|(m, n, classes)| {
        let classes = classes.min(m as u32);
        prop::collection::vec(-1.0f32..1.0, m * n).prop_map(move |mut values| {
            for row in values.chunks_exact_mut(n) {
                row[0] = if row[0] >= 0.0 { row[0] + 0.1 } else { row[0] - 0.1 };
            }
            let labels: Vec<u32> = (0..m as u32).map(|i| i % classes).collect();
            ExemplarDictionary::build(&values, n, &labels, classes).unwrap()
        })
    })
}

pub fn dictionary_and_input(max_atoms: usize, max_dim: usize) -> impl Strategy<Value = (ExemplarDictionary, Vec<f32>)> {
    dictionary(max_atoms, max_dim).prop_flat_map(|dict| {
        let n = dict.dim();
        (Just(dict), prop::collection::vec(-3.0f32..3.0, n))
    })
}

pub fn small_lca(backend: Backend) -> LcaConfig {
    LcaConfig {
        threshold: 0.1,
        tau: 10.0,
        steps: 40,
        backend,
        input_scaling: InputScaling::Raw,
        ..LcaConfig::default()
    }
}

pub fn random_dict(rng: &mut ChaCha8Rng, atoms: usize, dim: usize, classes: u32) -> ExemplarDictionary {
    let values: Vec<f32> = (0..atoms * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    let labels: Vec<u32> = (0..atoms as u32).map(|i| i % classes).collect();
    ExemplarDictionary::build(&values, dim, &labels, classes).unwrap()
}

pub fn soft_threshold_case(u: f64, lambda: f64) -> CaseResult {
    let t = soft_threshold(u, lambda);
    if u.abs() < lambda {
        prop_assert_eq!(t, 0.0);
    } else {
        prop_assert!((t - (u - lambda * u.signum())).abs() <= 1e-12);
        prop_assert!(t == 0.0 || t.signum() == u.signum());
    }
    prop_assert!(t.abs() <= u.abs());
    prop_assert_eq!(soft_threshold(-u, lambda), -t);
    prop_assert_eq!(soft_threshold(u, 0.0), u);
    Ok(())
}

pub fn gramian_case(dict: &ExemplarDictionary) -> CaseResult {
    let g = materialize_gramian(dict, BUDGET).unwrap();
    for i in 0..dict.len() {
        prop_assert!((g.get(i, i) - 1.0).abs() <= 1e-6);
        for m in 0..dict.len() {
            prop_assert!((g.get(i, m) as f64 - g.get(m, i) as f64).abs() <= 1e-9);
            prop_assert!(g.get(i, m).abs() <= 1.0 + 1e-6);
        }
    }
    Ok(())
}

pub fn backends_case(dict: &ExemplarDictionary, s: &[f32]) -> CaseResult {
    let mut cfg = small_lca(Backend::Materialized);
    let a = Encoder::new(dict, cfg.clone()).unwrap().encode(s).unwrap().to_dense();
    cfg.backend = Backend::MatrixFree;
    let b = Encoder::new(dict, cfg).unwrap().encode(s).unwrap().to_dense();
    for (x, y) in a.iter().zip(&b) {
        prop_assert!((x - y).abs() <= BACKEND_TOL * (1.0 + x.abs()), "{} vs {}", x, y);
    }
    Ok(())
}

pub fn inhibition_case(dict: &ExemplarDictionary, mask: u64) -> CaseResult {
    let a: Vec<f64> = (0..dict.len())
        .map(|i| {
            if (mask >> (i % 64)) & 1 == 1 {
                (i as f64 * 0.37).sin()
            } else {
                0.0
            }
        })
        .collect();
    let mat = InhibitionOperator::for_dictionary(dict, Backend::Materialized, BUDGET).unwrap();
    let free = InhibitionOperator::for_dictionary(dict, Backend::MatrixFree, BUDGET).unwrap();
    for (x, y) in mat.apply(&a).unwrap().iter().zip(&free.apply(&a).unwrap()) {
        prop_assert!((x - y).abs() <= BACKEND_TOL * (1.0 + x.abs()));
    }
    Ok(())
}

/// Energy against a direct evaluation of `½‖s − Σ a_i φ_i‖² + λΣ|a_i|`.
pub fn energy_case(dict: &ExemplarDictionary, s: &[f32], lambda: f64) -> CaseResult {
    let s: Vec<f64> = s.iter().map(|&v| v as f64).collect();
    let a: Vec<f64> = (0..dict.len())
        .map(|i| if i % 3 == 0 { 0.0 } else { (i as f64).cos() })
        .collect();
    let mut direct = 0.0;
    for j in 0..dict.dim() {
        let mut recon = 0.0;
        for i in 0..dict.len() {
            recon += a[i] * dict.atom(i)[j] as f64;
        }
        direct += (s[j] - recon).powi(2);
    }
    let direct = 0.5 * direct + lambda * a.iter().map(|v| v.abs()).sum::<f64>();
    let got = energy(dict, &s, &a, lambda).unwrap();
    prop_assert!((got - direct).abs() <= ENERGY_TOL * (1.0 + direct.abs()));
    Ok(())
}

pub fn zero_input_case(dict: &ExemplarDictionary) -> CaseResult {
    let code = encode(dict, &vec![0.0; dict.dim()], &small_lca(Backend::Auto)).unwrap();
    prop_assert!(code.is_silent());
    prop_assert!(code.fired_per_step.iter().all(|&f| f == 0));
    Ok(())
}

pub fn determinism_case(dict: &ExemplarDictionary, s: &[f32]) -> CaseResult {
    let enc = Encoder::new(dict, small_lca(Backend::Auto)).unwrap();
    let bits = |c: &SparseCode| c.to_dense().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    let first = enc.encode(s).unwrap();
    let second = enc.encode(s).unwrap();
    prop_assert_eq!(bits(&first), bits(&second));
    let batch = enc.encode_batch(&[s.to_vec(), s.to_vec()]).unwrap();
    prop_assert_eq!(&batch[0], &first);
    prop_assert_eq!(&batch[1], &first);
    Ok(())
}

pub fn permutation_case(dict: &ExemplarDictionary, s: &[f32], rot: usize) -> CaseResult {
    let m = dict.len();
    let order: Vec<usize> = (0..m).map(|k| (k + rot) % m).collect();
    let permuted = dict.permuted(&order).unwrap();
    let cfg = small_lca(Backend::Materialized);
    let a = encode(dict, s, &cfg).unwrap().to_dense();
    let b = encode(&permuted, s, &cfg).unwrap().to_dense();
    for (k, &i) in order.iter().enumerate() {
        prop_assert!((b[k] - a[i]).abs() <= 1e-6);
    }
    Ok(())
}

pub fn rescaling_case(dict: &ExemplarDictionary, s: &[f32], c: f64) -> CaseResult {
    let code = encode(dict, s, &small_lca(Backend::Auto)).unwrap();
    let scaled = code.scaled(c);
    prop_assert_eq!(
        decode_max_class_sum(&code, dict).unwrap().predicted,
        decode_max_class_sum(&scaled, dict).unwrap().predicted
    );
    prop_assert_eq!(
        decode_max_activation(&code, dict).unwrap().predicted,
        decode_max_activation(&scaled, dict).unwrap().predicted
    );
    Ok(())
}

pub fn fmat_case(rows: usize, dim: usize, labelled: bool, tag: String, seed: u32) -> CaseResult {
    let values: Vec<f32> = (0..rows * dim)
        .map(|i| ((i as u32 ^ seed) % 1000) as f32 / 7.0 - 50.0)
        .collect();
    let labels = labelled.then(|| (0..rows as u32).map(|i| i % 4).collect());
    let fm = FeatureMatrix::new(dim, values, labels, tag).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.fmat");
    write_feature_matrix(&path, &fm).unwrap();
    prop_assert_eq!(read_feature_matrix(&path).unwrap(), fm);
    Ok(())
}

pub fn idx_case(count: usize, rows: usize, cols: usize, seed: u8) -> CaseResult {
    let pixels: Vec<u8> = (0..count * rows * cols)
        .map(|i| (i as u8).wrapping_mul(31) ^ seed)
        .collect();
    let images = IdxImages {
        count,
        rows,
        cols,
        pixels,
    };
    let labels: Vec<u8> = (0..count as u8).map(|i| i.wrapping_add(seed) % 10).collect();
    let dir = tempfile::tempdir().unwrap();
    write_idx_images(dir.path().join("i"), &images).unwrap();
    write_idx_labels(dir.path().join("l"), &labels).unwrap();
    prop_assert_eq!(read_idx_images(dir.path().join("i")).unwrap(), images);
    prop_assert_eq!(read_idx_labels(dir.path().join("l")).unwrap(), labels);
    Ok(())
}

/// Largest relative error between the analytic shallow-NN gradient and
/// central differences on a random 5-class, 8-input model.
pub fn gradient_max_rel_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (classes, inputs) = (5, 8);
    let weights: Vec<f64> = (0..classes * inputs).map(|_| rng.random_range(-0.5..0.5)).collect();
    let bias: Vec<f64> = (0..classes).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mut model = ShallowNnModel::from_parameters(classes, inputs, weights, bias).unwrap();
    let codes: Vec<SparseCode> = (0..6)
        .map(|_| {
            let dense: Vec<f64> = (0..inputs)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        rng.random_range(0.0..2.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            SparseCode::from_dense(&dense)
        })
        .collect();
    let refs: Vec<&SparseCode> = codes.iter().collect();
    let labels: Vec<u32> = (0..6).map(|i| i % classes as u32).collect();
    let (_, grad_w, grad_b) = model.loss_and_gradient(&refs, &labels).unwrap();

    let h = 1e-5;
    let nudge = |model: &mut ShallowNnModel, bias: bool, index: usize, delta: f64| {
        let (w, b) = model.parameters_mut();
        if bias {
            b[index] += delta;
        } else {
            w[index] += delta;
        }
    };
    let analytic = grad_w
        .iter()
        .map(|&g| (false, g))
        .chain(grad_b.iter().map(|&g| (true, g)));
    let mut worst = 0.0f64;
    for (k, (bias, g)) in analytic.enumerate() {
        let index = if bias { k - grad_w.len() } else { k };
        nudge(&mut model, bias, index, h);
        let plus = model.loss_and_gradient(&refs, &labels).unwrap().0;
        nudge(&mut model, bias, index, -2.0 * h);
        let minus = model.loss_and_gradient(&refs, &labels).unwrap().0;
        nudge(&mut model, bias, index, h);
        let numeric = (plus - minus) / (2.0 * h);
        // Relative error, with an absolute floor for near-zero entries.
        let diff = (g - numeric).abs();
        worst = worst.max(diff / g.abs().max(numeric.abs()).max(1e-6));
    }
    worst
}

/// Relative gap between instrumented arithmetic and the analytical model fed
/// the observed per-step firing, over a few random encodes.
pub fn workload_rel_gap(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (600, 64);
    let dict = random_dict(&mut rng, m, n, 10);
    let cfg = LcaConfig {
        threshold: 0.05,
        tau: 10.0,
        steps: 50,
        backend: Backend::Materialized,
        input_scaling: InputScaling::Raw,
        ..LcaConfig::default()
    };
    let enc = Encoder::new(&dict, cfg.clone()).unwrap();
    let mut total = OpTally::default();
    let mut predicted = 0.0;
    for _ in 0..5 {
        let s: Vec<f32> = (0..n).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let (code, tally) = enc.encode_instrumented(&s).unwrap();
        // Inhibition at step k uses the activations left by step k-1.
        let mut firing_in = vec![0usize];
        firing_in.extend_from_slice(&code.fired_per_step[..code.fired_per_step.len() - 1]);
        let mean = firing_in.iter().sum::<usize>() as f64 / firing_in.len() as f64;
        assert!(
            mean > 0.1 * m as f64,
            "too little firing to exercise inhibition: {mean}"
        );
        predicted += inference_flops_real(cfg.steps as u64, n as u64, m as u64, mean);
        total += tally;
    }
    let measured = total.lca_total() as f64;
    (measured - predicted).abs() / predicted
}
