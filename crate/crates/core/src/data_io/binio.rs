//! Offset-tracking binary reader/writer used by the on-disk formats.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{DseldError, Result};

pub(crate) struct BinReader {
    inner: BufReader<File>,
    path: PathBuf,
    offset: u64,
    len: u64,
}

impl BinReader {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| DseldError::io(path, e))?;
        let len = file.metadata().map_err(|e| DseldError::io(path, e))?.len();
        Ok(BinReader {
            inner: BufReader::with_capacity(1 << 16, file),
            path: path.to_path_buf(),
            offset: 0,
            len,
        })
    }

    pub fn remaining(&self) -> u64 {
        self.len.saturating_sub(self.offset)
    }

    pub fn format_err(&self, reason: impl Into<String>) -> DseldError {
        DseldError::Format {
            offset: self.offset,
            reason: reason.into(),
        }
    }

    /// Fails unless at least `bytes` remain; call before allocating buffers.
    pub fn require(&self, bytes: u128, what: &str) -> Result<()> {
        if bytes > self.remaining() as u128 {
            return Err(self.format_err(format!(
                "truncated {what}: expected {bytes} bytes, found {}",
                self.remaining()
            )));
        }
        Ok(())
    }

    pub fn bytes<const K: usize>(&mut self) -> Result<[u8; K]> {
        self.require(K as u128, "header")?;
        let mut buf = [0u8; K];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| DseldError::io(&self.path, e))?;
        self.offset += K as u64;
        Ok(buf)
    }

    pub fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.require(buf.len() as u128, "payload")?;
        self.inner.read_exact(buf).map_err(|e| DseldError::io(&self.path, e))?;
        self.offset += buf.len() as u64;
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    pub fn u16_le(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }

    pub fn u32_le(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    pub fn u64_le(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    pub fn u32_be(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.bytes()?))
    }

    fn vec_of<T, const K: usize>(&mut self, count: usize, what: &str, decode: fn([u8; K]) -> T) -> Result<Vec<T>> {
        self.require(count as u128 * K as u128, what)?;
        let mut out = Vec::with_capacity(count);
        let mut chunk = vec![0u8; (1 << 16) / K * K];
        let mut left = count;
        while left > 0 {
            let take = left.min(chunk.len() / K);
            let buf = &mut chunk[..take * K];
            self.fill(buf)?;
            out.extend(buf.chunks_exact(K).map(|b| decode(b.try_into().expect("chunk size"))));
            left -= take;
        }
        Ok(out)
    }

    pub fn f32_vec_le(&mut self, count: usize, what: &str) -> Result<Vec<f32>> {
        self.vec_of(count, what, f32::from_le_bytes)
    }

    pub fn f64_vec_le(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        self.vec_of(count, what, f64::from_le_bytes)
    }

    pub fn u32_vec_le(&mut self, count: usize, what: &str) -> Result<Vec<u32>> {
        self.vec_of(count, what, u32::from_le_bytes)
    }

    pub fn u8_vec(&mut self, count: usize, what: &str) -> Result<Vec<u8>> {
        self.require(count as u128, what)?;
        let mut out = vec![0u8; count];
        self.fill(&mut out)?;
        Ok(out)
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(self.format_err(format!("{} trailing bytes", self.remaining())));
        }
        Ok(())
    }
}

pub(crate) struct BinWriter {
    inner: BufWriter<File>,
    path: PathBuf,
}

impl BinWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| DseldError::io(path, e))?;
        Ok(BinWriter {
            inner: BufWriter::with_capacity(1 << 16, file),
            path: path.to_path_buf(),
        })
    }

    pub fn put(&mut self, bytes: &[u8]) -> Result<()> {
        self.inner.write_all(bytes).map_err(|e| DseldError::io(&self.path, e))
    }

    pub fn f32s_le(&mut self, values: &[f32]) -> Result<()> {
        for v in values {
            self.put(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn f64s_le(&mut self, values: &[f64]) -> Result<()> {
        for v in values {
            self.put(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn u32s_le(&mut self, values: &[u32]) -> Result<()> {
        for v in values {
            self.put(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| DseldError::io(&self.path, e))
    }
}

/// `a * b` as a `usize`, or a format error when it overflows.
pub(crate) fn checked_count(a: u64, b: u64, what: &str) -> Result<usize> {
    a.checked_mul(b)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| DseldError::Format {
            offset: 0,
            reason: format!("{what} size {a}x{b} overflows"),
        })
}
