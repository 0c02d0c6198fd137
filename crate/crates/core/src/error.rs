use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum DseldError {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("row {row} has zero L2 norm")]
    ZeroNormRow { row: usize },

    #[error("label {label} at row {row} is out of range for {class_count} classes")]
    LabelOutOfRange { row: usize, label: u32, class_count: u32 },

    #[error("class {class} has no examples")]
    EmptyClass { class: u32 },

    #[error(
        "materialized Gramian needs {required} bytes but the budget is {allowed} bytes; \
         use the matrix-free backend"
    )]
    GramianBudget { required: u128, allowed: u64 },

    #[error("non-finite value at step {step}; the step size is probably too large")]
    Divergence { step: usize },

    #[error("non-finite training loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("requested {requested} items but only {available} are available")]
    NotEnoughRows { requested: usize, available: usize },

    #[error("malformed file at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error("non-finite value in row {row}")]
    NonFinite { row: usize },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DseldError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DseldError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        DseldError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error is a numerical blow-up rather than bad input.
    pub fn is_divergence(&self) -> bool {
        matches!(self, DseldError::Divergence { .. } | DseldError::NonFiniteLoss { .. })
    }
}

pub type Result<T, E = DseldError> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(DseldError::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
