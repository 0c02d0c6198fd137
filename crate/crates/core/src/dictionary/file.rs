//! Dictionary container.
//!
//! ```text
//! magic        6 bytes  "DSELD\0"
//! version      u16
//! M            u64
//! N            u64
//! class_count  u32
//! atoms        M*N f32, row-major
//! labels       M u32
//! atom_norms   M f32
//! ```
//! All integers and floats are little-endian.

use std::path::Path;

use super::ExemplarDictionary;
use crate::data_io::binio::{checked_count, BinReader, BinWriter};
use crate::error::{DseldError, Result};

pub const DICTIONARY_MAGIC: &[u8; 6] = b"DSELD\0";
pub const DICTIONARY_VERSION: u16 = 1;

pub fn write_dictionary(path: impl AsRef<Path>, dict: &ExemplarDictionary) -> Result<()> {
    let mut w = BinWriter::create(path.as_ref())?;
    w.put(DICTIONARY_MAGIC)?;
    w.put(&DICTIONARY_VERSION.to_le_bytes())?;
    w.put(&(dict.len() as u64).to_le_bytes())?;
    w.put(&(dict.dim() as u64).to_le_bytes())?;
    w.put(&dict.class_count().to_le_bytes())?;
    w.f32s_le(dict.atoms())?;
    w.u32s_le(dict.labels())?;
    w.f32s_le(dict.atom_norms())?;
    w.finish()
}

pub fn read_dictionary(path: impl AsRef<Path>) -> Result<ExemplarDictionary> {
    let mut r = BinReader::open(path.as_ref())?;
    let magic: [u8; 6] = r.bytes()?;
    if &magic != DICTIONARY_MAGIC {
        return Err(DseldError::Format {
            offset: 0,
            reason: "bad dictionary magic".into(),
        });
    }
    let version = r.u16_le()?;
    if version != DICTIONARY_VERSION {
        return Err(DseldError::UnsupportedVersion(version));
    }
    let m = r.u64_le()?;
    let n = r.u64_le()?;
    let class_count = r.u32_le()?;
    let cells = checked_count(m, n, "atom matrix")?;
    let rows = checked_count(m, 1, "label vector")?;
    // atoms + labels + norms, all 4 bytes per element
    r.require(4 * (cells as u128 + 2 * rows as u128), "dictionary payload")?;
    let atoms = r.f32_vec_le(cells, "atoms")?;
    let labels = r.u32_vec_le(rows, "labels")?;
    let norms = r.f32_vec_le(rows, "atom norms")?;
    r.expect_end()?;
    if let Some(row) = atoms
        .chunks_exact(n.max(1) as usize)
        .position(|row| row.iter().any(|v| !v.is_finite()))
    {
        return Err(DseldError::NonFinite { row });
    }
    ExemplarDictionary::from_parts(atoms, n as usize, labels, class_count, norms)
}
