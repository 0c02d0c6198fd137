//! Dataset ingestion, the feature-matrix interchange format, splitting and
//! run configuration.

pub(crate) mod binio;
mod config;
mod fmat;
mod idx;
mod split;

pub use config::{RunConfig, CONFIG_KEYS};
pub use fmat::{read_feature_matrix, write_feature_matrix, FeatureMatrix, FMAT_MAGIC, FMAT_VERSION};
pub use idx::{
    load_idx, read_idx_images, read_idx_labels, write_idx_images, write_idx_labels, IdxImages, LabeledImages,
};
pub use split::{split_dataset, Split};
