//! Exemplar-dictionary sparse coding with Locally Competitive Algorithm
//! dynamics.
//!
//! Every training example becomes one unit-norm atom of an over-complete
//! dictionary. A test input drives a layer of leaky integrate-and-fire
//! neurons, one per atom, whose lateral inhibition is the dictionary
//! Gramian; after `K` steps the thresholded activations form a sparse code.
//! Because atoms carry class labels, the code is decoded directly (largest
//! activation, largest per-class activation sum) or through a single
//! softmax layer. The same codes reconstruct the input, and an analytical
//! FLOP model predicts the cost of both phases.

pub mod data_io;
pub mod decoders;
pub mod dictionary;
pub mod error;
pub mod lca;
pub mod linalg;
pub mod pipeline;
pub mod reconstruction;
pub mod workload;

pub use data_io::{
    load_idx, read_feature_matrix, split_dataset, write_feature_matrix, FeatureMatrix, LabeledImages, RunConfig, Split,
};
pub use decoders::{
    decode_max_activation, decode_max_class_sum, decode_shallow_nn, read_model, train_shallow_nn, write_model,
    ClassScores, DecoderKind, ShallowNnConfig, ShallowNnModel,
};
pub use dictionary::{
    materialize_gramian, read_dictionary, write_dictionary, Backend, ExemplarDictionary, Gramian, InhibitionOperator,
};
pub use error::{DseldError, Result};
pub use lca::{encode, energy, soft_threshold, step, Encoder, InputScaling, LcaConfig, LcaState, SparseCode};
pub use pipeline::{Dataset, Mnist};
pub use reconstruction::{mse, psnr, reconstruct, ssim, ImageShape, QualityReport, SsimParams};
pub use workload::{inference_flops, measure_sparsity, training_flops, OpTally, SparsityProfile, WorkloadEstimate};
