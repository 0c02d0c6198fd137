//! Single-layer softmax classifier over sparse codes.
//!
//! `scores = softmax(W a + bias)`, trained with mini-batch SGD on mean
//! cross-entropy. Inputs are sparse, so both the forward pass and the
//! weight gradient only touch columns of firing atoms.
//!
//! Training can start from zeros or from the class-indicator matrix
//! (`W[c][i] = 1` when atom `i` carries label `c`), whose logits are the
//! signed per-class activation sums.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ClassScores, DecoderKind};
use crate::data_io::binio::{checked_count, BinReader, BinWriter};
use crate::error::{check_len, DseldError, Result};
use crate::lca::SparseCode;

pub const MODEL_MAGIC: &[u8; 5] = b"DSNN\0";
pub const MODEL_VERSION: u16 = 1;

/// Starting weights for training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NnInit {
    Zeros,
    ClassIndicator,
}

impl std::str::FromStr for NnInit {
    type Err = DseldError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeros" => Ok(NnInit::Zeros),
            "class-indicator" => Ok(NnInit::ClassIndicator),
            _ => Err(DseldError::invalid(
                "nn_init",
                format!("expected zeros or class-indicator, got {s:?}"),
            )),
        }
    }
}

impl std::fmt::Display for NnInit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NnInit::Zeros => "zeros",
            NnInit::ClassIndicator => "class-indicator",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShallowNnConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Mini-batch size; 0 means full batch.
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ShallowNnConfig {
    fn default() -> Self {
        ShallowNnConfig {
            epochs: 30,
            learning_rate: 1e-2,
            batch_size: 64,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub final_train_accuracy: f64,
    /// Mean training loss after each epoch.
    pub loss_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNnModel {
    classes: usize,
    inputs: usize,
    /// Row-major `classes × inputs`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    pub meta: TrainingMeta,
}

impl ShallowNnModel {
    /// A model with all-zero parameters.
    pub fn zeros(classes: usize, inputs: usize) -> Self {
        ShallowNnModel {
            classes,
            inputs,
            weights: vec![0.0; classes * inputs],
            bias: vec![0.0; classes],
            meta: TrainingMeta {
                epochs: 0,
                learning_rate: 0.0,
                batch_size: 0,
                seed: 0,
                final_train_accuracy: 0.0,
                loss_history: Vec::new(),
            },
        }
    }

    /// `W[c][i] = 1` when `atom_labels[i] == c`, zero bias.
    pub fn class_indicator(atom_labels: &[u32], classes: usize) -> Result<Self> {
        let inputs = atom_labels.len();
        let mut model = Self::zeros(classes, inputs);
        for (i, &l) in atom_labels.iter().enumerate() {
            let c = l as usize;
            if c >= classes {
                return Err(DseldError::LabelOutOfRange {
                    row: i,
                    label: l,
                    class_count: classes as u32,
                });
            }
            model.weights[c * inputs + i] = 1.0;
        }
        Ok(model)
    }

    pub fn from_parameters(classes: usize, inputs: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        check_len("weight matrix", classes * inputs, weights.len())?;
        check_len("bias", classes, bias.len())?;
        let mut model = Self::zeros(classes, inputs);
        model.weights = weights;
        model.bias = bias;
        Ok(model)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Code length the model was trained on.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn parameters_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.weights, &mut self.bias)
    }

    fn logits_into(&self, code: &SparseCode, out: &mut [f64]) {
        out.copy_from_slice(&self.bias);
        for (i, a) in code.iter() {
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.weights[c * self.inputs + i] * a;
            }
        }
    }

    /// Class probabilities for one code.
    pub fn probabilities(&self, code: &SparseCode) -> Result<Vec<f64>> {
        check_len("code length", self.inputs, code.len())?;
        let mut p = vec![0.0; self.classes];
        self.logits_into(code, &mut p);
        softmax_in_place(&mut p);
        Ok(p)
    }

    /// Mean cross-entropy over `(codes, labels)` and its gradient with
    /// respect to the weights and bias.
    pub fn loss_and_gradient(&self, codes: &[&SparseCode], labels: &[u32]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        check_len("labels", codes.len(), labels.len())?;
        if codes.is_empty() {
            return Err(DseldError::Empty("training batch"));
        }
        let mut grad_w = vec![0.0; self.weights.len()];
        let mut grad_b = vec![0.0; self.classes];
        let mut p = vec![0.0; self.classes];
        let mut loss = 0.0;
        for (code, &label) in codes.iter().zip(labels) {
            check_len("code length", self.inputs, code.len())?;
            self.logits_into(code, &mut p);
            loss += cross_entropy(&mut p, label);
            p[label as usize] -= 1.0;
            for (c, &err) in p.iter().enumerate() {
                grad_b[c] += err;
                let row = &mut grad_w[c * self.inputs..(c + 1) * self.inputs];
                for (i, a) in code.iter() {
                    row[i] += err * a;
                }
            }
        }
        let scale = 1.0 / codes.len() as f64;
        grad_w.iter_mut().for_each(|g| *g *= scale);
        grad_b.iter_mut().for_each(|g| *g *= scale);
        Ok((loss * scale, grad_w, grad_b))
    }

    fn accuracy(&self, codes: &[SparseCode], labels: &[u32]) -> f64 {
        let mut logits = vec![0.0; self.classes];
        let correct = codes
            .iter()
            .zip(labels)
            .filter(|(code, &label)| {
                self.logits_into(code, &mut logits);
                super::argmax(&logits) as u32 == label
            })
            .count();
        correct as f64 / codes.len() as f64
    }

    fn mean_loss(&self, codes: &[SparseCode], labels: &[u32]) -> f64 {
        let mut p = vec![0.0; self.classes];
        let total: f64 = codes
            .iter()
            .zip(labels)
            .map(|(code, &label)| {
                self.logits_into(code, &mut p);
                cross_entropy(&mut p, label)
            })
            .sum();
        total / codes.len() as f64
    }
}

/// Normalizes logits `x` into probabilities and returns `log Σ exp(x)`.
fn softmax_in_place(x: &mut [f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in x.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in x.iter_mut() {
        *v /= sum;
    }
    max + sum.ln()
}

/// Cross-entropy of one example; leaves the probabilities in `logits`.
fn cross_entropy(logits: &mut [f64], label: u32) -> f64 {
    let target = logits[label as usize];
    softmax_in_place(logits) - target
}

/// Trains from all-zero weights. Every class id below the largest label
/// must occur.
pub fn train_shallow_nn(codes: &[SparseCode], labels: &[u32], cfg: &ShallowNnConfig) -> Result<ShallowNnModel> {
    let classes = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut seen = vec![false; classes];
    for &l in labels {
        seen[l as usize] = true;
    }
    if let Some(c) = seen.iter().position(|s| !s) {
        return Err(DseldError::EmptyClass { class: c as u32 });
    }
    let inputs = codes.first().map_or(0, SparseCode::len);
    train_shallow_nn_from(ShallowNnModel::zeros(classes, inputs), codes, labels, cfg)
}

/// Trains starting from `initial`, whose shape fixes the class count and
/// code length. Classes absent from `labels` keep their initial weights
/// apart from the shared softmax gradient.
pub fn train_shallow_nn_from(
    initial: ShallowNnModel,
    codes: &[SparseCode],
    labels: &[u32],
    cfg: &ShallowNnConfig,
) -> Result<ShallowNnModel> {
    check_len("labels", codes.len(), labels.len())?;
    if codes.is_empty() {
        return Err(DseldError::Empty("training codes"));
    }
    let inputs = initial.inputs;
    for code in codes {
        check_len("code length", inputs, code.len())?;
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(DseldError::invalid("learning_rate", "must be > 0"));
    }
    let classes = initial.classes;
    if let Some((row, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= classes) {
        return Err(DseldError::LabelOutOfRange {
            row,
            label,
            class_count: classes as u32,
        });
    }

    let mut model = initial;
    let batch = if cfg.batch_size == 0 {
        codes.len()
    } else {
        cfg.batch_size.min(codes.len())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..codes.len()).collect();
    let mut loss_history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        if batch < codes.len() {
            order.shuffle(&mut rng);
        }
        for chunk in order.chunks(batch) {
            let batch_codes: Vec<&SparseCode> = chunk.iter().map(|&i| &codes[i]).collect();
            let batch_labels: Vec<u32> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, grad_w, grad_b) = model.loss_and_gradient(&batch_codes, &batch_labels)?;
            if !loss.is_finite() {
                return Err(DseldError::NonFiniteLoss { epoch });
            }
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= cfg.learning_rate * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&grad_b) {
                *b -= cfg.learning_rate * g;
            }
        }
        let loss = model.mean_loss(codes, labels);
        if !loss.is_finite() {
            return Err(DseldError::NonFiniteLoss { epoch });
        }
        loss_history.push(loss);
    }

    model.meta = TrainingMeta {
        epochs: cfg.epochs,
        learning_rate: cfg.learning_rate,
        batch_size: cfg.batch_size,
        seed: cfg.seed,
        final_train_accuracy: model.accuracy(codes, labels),
        loss_history,
    };
    Ok(model)
}

pub fn decode_shallow_nn(model: &ShallowNnModel, code: &SparseCode) -> Result<ClassScores> {
    let p = model.probabilities(code)?;
    Ok(ClassScores::new(p, DecoderKind::ShallowNn, false))
}

/// Model container.
///
/// ```text
/// magic "DSNN\0", version u16, classes u64, inputs u64,
/// weights classes*inputs f64, bias classes f64,
/// epochs u64, learning_rate f64, batch_size u64, seed u64,
/// final_train_accuracy f64, loss_history_len u64, loss_history f64...
/// ```
pub fn write_model(path: impl AsRef<Path>, model: &ShallowNnModel) -> Result<()> {
    let mut w = BinWriter::create(path.as_ref())?;
    w.put(MODEL_MAGIC)?;
    w.put(&MODEL_VERSION.to_le_bytes())?;
    w.put(&(model.classes as u64).to_le_bytes())?;
    w.put(&(model.inputs as u64).to_le_bytes())?;
    w.f64s_le(&model.weights)?;
    w.f64s_le(&model.bias)?;
    let m = &model.meta;
    w.put(&(m.epochs as u64).to_le_bytes())?;
    w.put(&m.learning_rate.to_le_bytes())?;
    w.put(&(m.batch_size as u64).to_le_bytes())?;
    w.put(&m.seed.to_le_bytes())?;
    w.put(&m.final_train_accuracy.to_le_bytes())?;
    w.put(&(m.loss_history.len() as u64).to_le_bytes())?;
    w.f64s_le(&m.loss_history)?;
    w.finish()
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ShallowNnModel> {
    let mut r = BinReader::open(path.as_ref())?;
    let magic: [u8; 5] = r.bytes()?;
    if &magic != MODEL_MAGIC {
        return Err(DseldError::Format {
            offset: 0,
            reason: "bad model magic".into(),
        });
    }
    let version = r.u16_le()?;
    if version != MODEL_VERSION {
        return Err(DseldError::UnsupportedVersion(version));
    }
    let classes = r.u64_le()?;
    let inputs = r.u64_le()?;
    let cells = checked_count(classes, inputs, "weight matrix")?;
    let weights = r.f64_vec_le(cells, "weights")?;
    let bias = r.f64_vec_le(classes as usize, "bias")?;
    let epochs = r.u64_le()? as usize;
    let learning_rate = f64::from_le_bytes(r.bytes()?);
    let batch_size = r.u64_le()? as usize;
    let seed = r.u64_le()?;
    let final_train_accuracy = f64::from_le_bytes(r.bytes()?);
    let history_len = checked_count(r.u64_le()?, 1, "loss history")?;
    let loss_history = r.f64_vec_le(history_len, "loss history")?;
    r.expect_end()?;
    let mut model = ShallowNnModel::from_parameters(classes as usize, inputs as usize, weights, bias)?;
    model.meta = TrainingMeta {
        epochs,
        learning_rate,
        batch_size,
        seed,
        final_train_accuracy,
        loss_history,
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot(len: usize, i: usize, v: f64) -> SparseCode {
        let mut a = vec![0.0; len];
        a[i] = v;
        SparseCode::from_dense(&a)
    }

    fn separable() -> (Vec<SparseCode>, Vec<u32>) {
        let mut codes = Vec::new();
        let mut labels = Vec::new();
        for k in 0..20 {
            let class = (k % 2) as u32;
            codes.push(one_hot(6, class as usize * 3 + k % 3, 1.0 + 0.1 * k as f64));
            labels.push(class);
        }
        (codes, labels)
    }

    #[test]
    fn separable_toy_reaches_full_accuracy() {
        let (codes, labels) = separable();
        let cfg = ShallowNnConfig {
            epochs: 50,
            learning_rate: 0.5,
            batch_size: 4,
            seed: 7,
        };
        let model = train_shallow_nn(&codes, &labels, &cfg).unwrap();
        assert_eq!(model.meta.final_train_accuracy, 1.0);
        for (code, &label) in codes.iter().zip(&labels) {
            assert_eq!(decode_shallow_nn(&model, code).unwrap().predicted, label);
        }
    }

    #[test]
    fn zero_model_is_uniform_and_picks_class_zero() {
        let model = ShallowNnModel::zeros(4, 3);
        let s = decode_shallow_nn(&model, &SparseCode::from_dense(&[1.0, 0.0, -2.0])).unwrap();
        assert_eq!(s.scores, vec![0.25; 4]);
        assert_eq!(s.predicted, 0);
        assert!(decode_shallow_nn(&model, &SparseCode::from_dense(&[1.0])).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let (codes, labels) = separable();
        let cfg = ShallowNnConfig::default();
        let a = train_shallow_nn(&codes, &labels, &cfg).unwrap();
        let b = train_shallow_nn(&codes, &labels, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_batch_loss_never_increases() {
        let (codes, labels) = separable();
        let cfg = ShallowNnConfig {
            epochs: 40,
            learning_rate: 1e-3,
            batch_size: 0,
            seed: 1,
        };
        let model = train_shallow_nn(&codes, &labels, &cfg).unwrap();
        for w in model.meta.loss_history.windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn rejects_missing_class_and_bad_input() {
        let codes = vec![one_hot(3, 0, 1.0), one_hot(3, 1, 1.0)];
        assert!(matches!(
            train_shallow_nn(&codes, &[0, 2], &ShallowNnConfig::default()),
            Err(DseldError::EmptyClass { class: 1 })
        ));
        assert!(train_shallow_nn(&[], &[], &ShallowNnConfig::default()).is_err());
        let ragged = vec![one_hot(3, 0, 1.0), one_hot(4, 1, 1.0)];
        assert!(train_shallow_nn(&ragged, &[0, 1], &ShallowNnConfig::default()).is_err());
    }

    #[test]
    fn diverging_learning_rate_is_reported() {
        let codes = vec![one_hot(2, 0, 1e200), one_hot(2, 1, 1e200)];
        let cfg = ShallowNnConfig {
            learning_rate: 1e200,
            ..ShallowNnConfig::default()
        };
        let err = train_shallow_nn(&codes, &[0, 1], &cfg).unwrap_err();
        assert!(matches!(err, DseldError::NonFiniteLoss { epoch: 0 }), "{err}");
    }

    #[test]
    fn class_indicator_start_reproduces_signed_class_sums() {
        let atom_labels = [0, 1, 1, 2];
        let model = ShallowNnModel::class_indicator(&atom_labels, 3).unwrap();
        let code = SparseCode::from_dense(&[0.5, 0.25, 0.5, 0.0]);
        let p = model.probabilities(&code).unwrap();
        assert_eq!(super::super::argmax(&p), 1);
        assert!(ShallowNnModel::class_indicator(&[0, 3], 3).is_err());

        let codes = vec![SparseCode::from_dense(&[1.0, 0.0, 0.0, 0.0]), code];
        let trained = train_shallow_nn_from(model.clone(), &codes, &[0, 1], &ShallowNnConfig::default()).unwrap();
        assert_eq!(trained.meta.final_train_accuracy, 1.0);
        // a label outside the initial model's classes is rejected
        assert!(train_shallow_nn_from(model, &codes, &[0, 3], &ShallowNnConfig::default()).is_err());
    }

    #[test]
    fn init_names_round_trip() {
        for init in [NnInit::Zeros, NnInit::ClassIndicator] {
            assert_eq!(init.to_string().parse::<NnInit>().unwrap(), init);
        }
        assert!("random".parse::<NnInit>().is_err());
    }

    #[test]
    fn model_file_round_trips() {
        let (codes, labels) = separable();
        let model = train_shallow_nn(&codes, &labels, &ShallowNnConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.dsnn");
        write_model(&path, &model).unwrap();
        assert_eq!(read_model(&path).unwrap(), model);
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(read_model(&path).is_err());
    }
}
