//! Sparse code → class decoders.
//!
//! Two label-readout decoders need no training: the class of the single
//! largest activation, and the class with the largest summed absolute
//! activation. A softmax layer trained on codes is the third option.

mod shallow_nn;

pub use shallow_nn::{
    decode_shallow_nn, read_model, train_shallow_nn, train_shallow_nn_from, write_model, NnInit, ShallowNnConfig,
    ShallowNnModel, TrainingMeta, MODEL_MAGIC, MODEL_VERSION,
};

use serde::Serialize;

use crate::dictionary::ExemplarDictionary;
use crate::error::{check_len, DseldError, Result};
use crate::lca::SparseCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    MaxActivation,
    MaxClassSum,
    ShallowNn,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 3] = [
        DecoderKind::MaxActivation,
        DecoderKind::MaxClassSum,
        DecoderKind::ShallowNn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::MaxActivation => "max-activation",
            DecoderKind::MaxClassSum => "max-class-sum",
            DecoderKind::ShallowNn => "shallow-nn",
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = DseldError;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| DseldError::invalid("decoder", format!("unknown decoder {s:?}")))
    }
}

/// Per-class scores and the resulting prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassScores {
    pub scores: Vec<f64>,
    /// Highest-scoring class; ties go to the lowest class id.
    pub predicted: u32,
    pub kind: DecoderKind,
    /// No neuron carried evidence for any class. Counted as an error in
    /// accuracy figures.
    pub abstain: bool,
}

impl ClassScores {
    fn new(scores: Vec<f64>, kind: DecoderKind, abstain: bool) -> Self {
        let predicted = argmax(&scores) as u32;
        ClassScores {
            scores,
            predicted,
            kind,
            abstain,
        }
    }

    /// Correct and not abstaining.
    pub fn is_correct(&self, label: u32) -> bool {
        !self.abstain && self.predicted == label
    }
}

/// Index of the largest value; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Class of the largest (signed) activation. Classes without a positive
/// activation score `f64::MIN`.
pub fn decode_max_activation(code: &SparseCode, dict: &ExemplarDictionary) -> Result<ClassScores> {
    check_len("code length", dict.len(), code.len())?;
    let labels = dict.labels();
    let mut scores = vec![f64::MIN; dict.class_count() as usize];
    let mut any_positive = false;
    for (i, a) in code.iter() {
        if a > 0.0 {
            let c = labels[i] as usize;
            scores[c] = scores[c].max(a);
            any_positive = true;
        }
    }
    Ok(ClassScores::new(scores, DecoderKind::MaxActivation, !any_positive))
}

/// Class with the largest `Σ |a_i|` over its atoms.
pub fn decode_max_class_sum(code: &SparseCode, dict: &ExemplarDictionary) -> Result<ClassScores> {
    check_len("code length", dict.len(), code.len())?;
    let labels = dict.labels();
    let mut scores = vec![0.0; dict.class_count() as usize];
    for (i, a) in code.iter() {
        scores[labels[i] as usize] += a.abs();
    }
    Ok(ClassScores::new(scores, DecoderKind::MaxClassSum, code.is_silent()))
}
