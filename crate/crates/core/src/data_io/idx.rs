//! IDX files as distributed for MNIST: a big-endian magic
//! (`0x00000803` for `u8` image tensors, `0x00000801` for `u8` label
//! vectors), big-endian `u32` dimensions, then the raw bytes.

use std::path::Path;

use super::binio::{checked_count, BinReader, BinWriter};
use crate::error::{DseldError, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// A stack of `count` grayscale images of `rows × cols` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn pixels_per_image(&self) -> usize {
        self.rows * self.cols
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let n = self.pixels_per_image();
        &self.pixels[i * n..(i + 1) * n]
    }

    /// All pixels as `f32`, each multiplied by `scale` (`1/255` maps to
    /// [0, 1]).
    pub fn to_f32(&self, scale: f32) -> Vec<f32> {
        self.pixels.iter().map(|&p| p as f32 * scale).collect()
    }
}

/// Images with one label each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledImages {
    pub images: IdxImages,
    pub labels: Vec<u8>,
}

impl LabeledImages {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels_u32(&self) -> Vec<u32> {
        self.labels.iter().map(|&l| l as u32).collect()
    }
}

fn expect_magic(r: &mut BinReader, want: u32, what: &str) -> Result<()> {
    let magic = r.u32_be()?;
    if magic != want {
        return Err(DseldError::Format {
            offset: 0,
            reason: format!("bad {what} magic {magic:#010x}, expected {want:#010x}"),
        });
    }
    Ok(())
}

pub fn read_idx_images(path: impl AsRef<Path>) -> Result<IdxImages> {
    let mut r = BinReader::open(path.as_ref())?;
    expect_magic(&mut r, IMAGES_MAGIC, "IDX image")?;
    let count = r.u32_be()? as u64;
    let rows = r.u32_be()? as u64;
    let cols = r.u32_be()? as u64;
    let per_image = checked_count(rows, cols, "image")?;
    let total = checked_count(count, per_image as u64, "image tensor")?;
    let pixels = r.u8_vec(total, "image payload")?;
    r.expect_end()?;
    Ok(IdxImages {
        count: count as usize,
        rows: rows as usize,
        cols: cols as usize,
        pixels,
    })
}

pub fn read_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let mut r = BinReader::open(path.as_ref())?;
    expect_magic(&mut r, LABELS_MAGIC, "IDX label")?;
    let count = r.u32_be()? as usize;
    let labels = r.u8_vec(count, "label payload")?;
    r.expect_end()?;
    Ok(labels)
}

/// Reads an image file and its label file; the counts must agree.
pub fn load_idx(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<LabeledImages> {
    let images = read_idx_images(images)?;
    let labels = read_idx_labels(labels)?;
    if images.count != labels.len() {
        return Err(DseldError::DimensionMismatch {
            context: "IDX image/label count",
            expected: images.count,
            actual: labels.len(),
        });
    }
    Ok(LabeledImages { images, labels })
}

fn u32_field(v: usize, what: &str) -> Result<[u8; 4]> {
    u32::try_from(v)
        .map(u32::to_be_bytes)
        .map_err(|_| DseldError::invalid("idx", format!("{what} {v} does not fit in u32")))
}

pub fn write_idx_images(path: impl AsRef<Path>, images: &IdxImages) -> Result<()> {
    crate::error::check_len(
        "IDX pixel count",
        images.count * images.pixels_per_image(),
        images.pixels.len(),
    )?;
    let mut w = BinWriter::create(path.as_ref())?;
    w.put(&IMAGES_MAGIC.to_be_bytes())?;
    w.put(&u32_field(images.count, "count")?)?;
    w.put(&u32_field(images.rows, "rows")?)?;
    w.put(&u32_field(images.cols, "cols")?)?;
    w.put(&images.pixels)?;
    w.finish()
}

pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut w = BinWriter::create(path.as_ref())?;
    w.put(&LABELS_MAGIC.to_be_bytes())?;
    w.put(&u32_field(labels.len(), "count")?)?;
    w.put(labels)?;
    w.finish()
}
