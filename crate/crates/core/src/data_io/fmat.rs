//! Feature-matrix interchange format.
//!
//! ```text
//! magic        5 bytes  "FMAT\0"
//! version      u16
//! rows         u64
//! dim          u64
//! has_labels   u8       0 or 1
//! values       rows*dim f32, row-major
//! labels       rows u32 (only when has_labels = 1)
//! tag_len      u64
//! source_tag   tag_len bytes of UTF-8
//! ```
//! All integers and floats are little-endian; the fixed header is 24 bytes.

use std::path::Path;

use super::binio::{checked_count, BinReader, BinWriter};
use crate::error::{check_len, DseldError, Result};

pub const FMAT_MAGIC: &[u8; 5] = b"FMAT\0";
pub const FMAT_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub dim: usize,
    /// Row-major `rows × dim`.
    pub values: Vec<f32>,
    pub labels: Option<Vec<u32>>,
    /// Free-form provenance, e.g. the extractor model and preprocessing.
    pub source_tag: String,
}

impl FeatureMatrix {
    pub fn new(dim: usize, values: Vec<f32>, labels: Option<Vec<u32>>, source_tag: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(DseldError::Empty("feature dimension"));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(DseldError::invalid(
                "values",
                format!("{} values do not fill rows of width {dim}", values.len()),
            ));
        }
        let fm = FeatureMatrix {
            rows: values.len() / dim,
            dim,
            values,
            labels,
            source_tag: source_tag.into(),
        };
        fm.validate()?;
        Ok(fm)
    }

    pub fn validate(&self) -> Result<()> {
        check_len("feature values", self.rows * self.dim, self.values.len())?;
        if let Some(labels) = &self.labels {
            check_len("feature labels", self.rows, labels.len())?;
        }
        if let Some(row) = first_non_finite_row(&self.values, self.dim) {
            return Err(DseldError::NonFinite { row });
        }
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

fn first_non_finite_row(values: &[f32], dim: usize) -> Option<usize> {
    values
        .chunks_exact(dim.max(1))
        .position(|row| row.iter().any(|v| !v.is_finite()))
}

pub fn write_feature_matrix(path: impl AsRef<Path>, fm: &FeatureMatrix) -> Result<()> {
    fm.validate()?;
    let mut w = BinWriter::create(path.as_ref())?;
    w.put(FMAT_MAGIC)?;
    w.put(&FMAT_VERSION.to_le_bytes())?;
    w.put(&(fm.rows as u64).to_le_bytes())?;
    w.put(&(fm.dim as u64).to_le_bytes())?;
    w.put(&[fm.labels.is_some() as u8])?;
    w.f32s_le(&fm.values)?;
    if let Some(labels) = &fm.labels {
        w.u32s_le(labels)?;
    }
    w.put(&(fm.source_tag.len() as u64).to_le_bytes())?;
    w.put(fm.source_tag.as_bytes())?;
    w.finish()
}

pub fn read_feature_matrix(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let mut r = BinReader::open(path.as_ref())?;
    let magic: [u8; 5] = r.bytes()?;
    if &magic != FMAT_MAGIC {
        return Err(DseldError::Format {
            offset: 0,
            reason: "bad FMAT magic".into(),
        });
    }
    let version = r.u16_le()?;
    if version != FMAT_VERSION {
        return Err(DseldError::UnsupportedVersion(version));
    }
    let rows = r.u64_le()?;
    let dim = r.u64_le()?;
    let has_labels = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(r.format_err(format!("has_labels must be 0 or 1, got {other}"))),
    };
    if dim == 0 {
        return Err(r.format_err("dim must be positive"));
    }
    let cells = checked_count(rows, dim, "feature matrix")?;
    let label_bytes = if has_labels { 4 * rows as u128 } else { 0 };
    r.require(4 * cells as u128 + label_bytes + 8, "feature payload")?;
    let values = r.f32_vec_le(cells, "feature values")?;
    if let Some(row) = first_non_finite_row(&values, dim as usize) {
        return Err(DseldError::NonFinite { row });
    }
    let labels = if has_labels {
        Some(r.u32_vec_le(rows as usize, "feature labels")?)
    } else {
        None
    };
    let tag_len = r.u64_le()?;
    let tag_len = usize::try_from(tag_len).map_err(|_| r.format_err("source tag length overflows"))?;
    let tag = r.u8_vec(tag_len, "source tag")?;
    let source_tag = String::from_utf8(tag).map_err(|_| r.format_err("source tag is not UTF-8"))?;
    r.expect_end()?;
    Ok(FeatureMatrix {
        rows: rows as usize,
        dim: dim as usize,
        values,
        labels,
        source_tag,
    })
}
