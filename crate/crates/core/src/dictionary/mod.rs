//! Exemplar dictionaries: one unit-norm atom per training example.
//!
//! Atoms are stored row-major in `f32`. The pre-normalization L2 norm of
//! every atom is kept alongside so the original feature can be recovered.

mod file;
mod inhibition;

pub use file::{read_dictionary, write_dictionary, DICTIONARY_MAGIC, DICTIONARY_VERSION};
pub use inhibition::{materialize_gramian, Backend, Gramian, InhibitionOperator};

use crate::error::{check_len, DseldError, Result};
use crate::linalg;
use crate::workload::OpTally;

/// Default memory budget for a materialized Gramian (bytes).
pub const DEFAULT_GRAMIAN_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarDictionary {
    atoms: Vec<f32>,
    dim: usize,
    labels: Vec<u32>,
    class_count: u32,
    atom_norms: Vec<f32>,
    /// `<φ_i, φ_i>` of the stored (rounded) atoms, used by the matrix-free
    /// inhibition to drop the self term.
    self_inner: Vec<f64>,
    revision: u64,
}

impl ExemplarDictionary {
    /// Builds a dictionary from row-major `features` (`labels.len()` rows of
    /// width `dim`), L2-normalizing each row. Row order is preserved.
    pub fn build(features: &[f32], dim: usize, labels: &[u32], class_count: u32) -> Result<Self> {
        let mut tally = OpTally::default();
        Self::build_tallied(features, dim, labels, class_count, &mut tally)
    }

    pub(crate) fn build_tallied(
        features: &[f32],
        dim: usize,
        labels: &[u32],
        class_count: u32,
        tally: &mut OpTally,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(DseldError::Empty("feature dimension"));
        }
        if labels.is_empty() {
            return Err(DseldError::Empty("dictionary rows"));
        }
        check_len("feature matrix size", labels.len() * dim, features.len())?;
        if class_count == 0 {
            return Err(DseldError::invalid("class_count", "must be positive"));
        }
        validate_labels(labels, 0, class_count)?;
        let (atoms, atom_norms, self_inner) = normalize_rows(features, dim, 0, tally)?;
        let dict = ExemplarDictionary {
            atoms,
            dim,
            labels: labels.to_vec(),
            class_count,
            atom_norms,
            self_inner,
            revision: 0,
        };
        dict.check_class_coverage()?;
        Ok(dict)
    }

    /// Appends `P` new exemplars. Existing atoms are left untouched and the
    /// class count grows to cover any new label. The revision is bumped, so
    /// Gramians built from the old dictionary no longer validate against it.
    pub fn append_atoms(self, features: &[f32], labels: &[u32]) -> Result<Self> {
        let mut tally = OpTally::default();
        self.append_atoms_tallied(features, labels, &mut tally)
    }

    /// Same as [`append_atoms`](Self::append_atoms), recording the arithmetic
    /// spent on normalizing the new rows.
    pub fn append_atoms_tallied(mut self, features: &[f32], labels: &[u32], tally: &mut OpTally) -> Result<Self> {
        if labels.is_empty() {
            return Err(DseldError::Empty("appended rows"));
        }
        check_len("appended feature width", labels.len() * self.dim, features.len())?;
        let new_classes = labels
            .iter()
            .map(|&l| l.saturating_add(1))
            .max()
            .unwrap_or(0)
            .max(self.class_count);
        let start = self.len();
        validate_labels(labels, start, new_classes)?;
        let (atoms, norms, inner) = normalize_rows(features, self.dim, start, tally)?;

        self.atoms.extend_from_slice(&atoms);
        self.atom_norms.extend_from_slice(&norms);
        self.self_inner.extend_from_slice(&inner);
        self.labels.extend_from_slice(labels);
        self.class_count = new_classes;
        self.revision += 1;
        self.check_class_coverage()?;
        Ok(self)
    }

    pub(crate) fn from_parts(
        atoms: Vec<f32>,
        dim: usize,
        labels: Vec<u32>,
        class_count: u32,
        atom_norms: Vec<f32>,
    ) -> Result<Self> {
        if dim == 0 || labels.is_empty() {
            return Err(DseldError::Empty("dictionary"));
        }
        check_len("atom storage", labels.len() * dim, atoms.len())?;
        check_len("atom norms", labels.len(), atom_norms.len())?;
        validate_labels(&labels, 0, class_count)?;
        let self_inner = atoms.chunks_exact(dim).map(linalg::norm_sq_f32).collect();
        let dict = ExemplarDictionary {
            atoms,
            dim,
            labels,
            class_count,
            atom_norms,
            self_inner,
            revision: 0,
        };
        dict.check_class_coverage()?;
        Ok(dict)
    }

    fn check_class_coverage(&self) -> Result<()> {
        let counts = self.class_histogram();
        match counts.iter().position(|&c| c == 0) {
            Some(class) => Err(DseldError::EmptyClass { class: class as u32 }),
            None => Ok(()),
        }
    }

    /// Number of atoms `M`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Atom width `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn atom_norms(&self) -> &[f32] {
        &self.atom_norms
    }

    /// Row-major `M×N` atom storage.
    pub fn atoms(&self) -> &[f32] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &[f32] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.atoms.chunks_exact(self.dim)
    }

    pub(crate) fn self_inner(&self) -> &[f64] {
        &self.self_inner
    }

    /// Incremented by every append; used to detect stale Gramians.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// Atom count per class id.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_count as usize];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Returns a dictionary with rows reordered so that new row `k` is old
    /// row `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_len("permutation", self.len(), order.len())?;
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(DseldError::invalid("order", "not a permutation"));
            }
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for &i in order {
            atoms.extend_from_slice(self.atom(i));
        }
        Ok(ExemplarDictionary {
            atoms,
            dim: self.dim,
            labels: order.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
            atom_norms: order.iter().map(|&i| self.atom_norms[i]).collect(),
            self_inner: order.iter().map(|&i| self.self_inner[i]).collect(),
            revision: 0,
        })
    }

    /// Atoms with one row replaced in place. Used by the dictionary-learning
    /// baseline; bumps the revision.
    pub(crate) fn replace_atoms(&mut self, atoms: Vec<f32>) {
        debug_assert_eq!(atoms.len(), self.atoms.len());
        self.self_inner = atoms.chunks_exact(self.dim).map(linalg::norm_sq_f32).collect();
        self.atoms = atoms;
        self.revision += 1;
    }
}

fn validate_labels(labels: &[u32], row_offset: usize, class_count: u32) -> Result<()> {
    for (i, &label) in labels.iter().enumerate() {
        if label >= class_count {
            return Err(DseldError::LabelOutOfRange {
                row: row_offset + i,
                label,
                class_count,
            });
        }
    }
    Ok(())
}

type Normalized = (Vec<f32>, Vec<f32>, Vec<f64>);

/// L2-normalizes each row. Per row: `N` multiplies and `N-1` adds for the
/// norm, then `N` multiplies by the reciprocal.
fn normalize_rows(features: &[f32], dim: usize, row_offset: usize, tally: &mut OpTally) -> Result<Normalized> {
    let rows = features.len() / dim;
    let mut atoms = Vec::with_capacity(features.len());
    let mut norms = Vec::with_capacity(rows);
    let mut inner = Vec::with_capacity(rows);
    for (i, row) in features.chunks_exact(dim).enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(DseldError::NonFinite { row: row_offset + i });
        }
        let norm = linalg::norm_sq_f32(row).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(DseldError::ZeroNormRow { row: row_offset + i });
        }
        let start = atoms.len();
        let scale = 1.0 / norm;
        atoms.extend(row.iter().map(|&v| (v as f64 * scale) as f32));
        norms.push(norm as f32);
        inner.push(linalg::norm_sq_f32(&atoms[start..]));
        tally.normalize.mul += 2 * dim as u64;
        tally.normalize.add += dim as u64 - 1;
    }
    Ok((atoms, norms, inner))
}
