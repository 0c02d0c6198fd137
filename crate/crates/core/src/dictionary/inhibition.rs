use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExemplarDictionary;
use crate::error::{check_len, DseldError, Result};
use crate::linalg;
use crate::workload::OpTally;

/// Rows per cache block while building the Gramian.
const GRAM_BLOCK: usize = 32;

/// Which inhibition backend an encoder should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Materialize `G` when it fits the memory budget, otherwise go matrix-free.
    #[default]
    Auto,
    Materialized,
    MatrixFree,
}

impl std::str::FromStr for Backend {
    type Err = DseldError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "materialized" | "gramian" => Ok(Backend::Materialized),
            "matrix-free" | "matrixfree" => Ok(Backend::MatrixFree),
            other => Err(DseldError::invalid(
                "backend",
                format!("unknown backend {other:?} (auto, materialized, matrix-free)"),
            )),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Auto => "auto",
            Backend::Materialized => "materialized",
            Backend::MatrixFree => "matrix-free",
        })
    }
}

/// Dense symmetric `M×M` Gramian `G[i][m] = <φ_i, φ_m>`, stored in `f32`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gramian {
    size: usize,
    values: Vec<f32>,
    revision: u64,
}

impl Gramian {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, m: usize) -> f32 {
        self.values[i * self.size + m]
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.size..(i + 1) * self.size]
    }

    /// Bytes needed to hold an `m×m` Gramian.
    pub fn required_bytes(m: usize) -> u128 {
        (m as u128) * (m as u128) * std::mem::size_of::<f32>() as u128
    }

    /// Whether this Gramian was built from `dict` as it currently stands.
    pub fn matches(&self, dict: &ExemplarDictionary) -> bool {
        self.size == dict.len() && self.revision == dict.revision()
    }
}

/// Builds `G = φ φᵀ`. Each entry is a single `f64`-accumulated dot product,
/// so the result does not depend on the number of worker threads.
pub fn materialize_gramian(dict: &ExemplarDictionary, budget_bytes: u64) -> Result<Gramian> {
    let m = dict.len();
    let required = Gramian::required_bytes(m);
    if required > budget_bytes as u128 {
        return Err(DseldError::GramianBudget {
            required,
            allowed: budget_bytes,
        });
    }
    let mut values = vec![0.0f32; m * m];

    // Upper triangle, one block of rows per task.
    values
        .par_chunks_mut(GRAM_BLOCK * m)
        .enumerate()
        .for_each(|(block, rows)| {
            let i0 = block * GRAM_BLOCK;
            let block_rows = rows.len() / m;
            for j in i0..m {
                let atom_j = dict.atom(j);
                for r in 0..block_rows {
                    let i = i0 + r;
                    if i > j {
                        break;
                    }
                    rows[r * m + j] = linalg::dot_f32(dict.atom(i), atom_j) as f32;
                }
            }
        });

    for i in 0..m {
        for j in 0..i {
            values[i * m + j] = values[j * m + i];
        }
    }

    Ok(Gramian {
        size: m,
        values,
        revision: dict.revision(),
    })
}

/// Lateral inhibition `Σ_{m≠i} G[i][m] a[m]`, either from a stored Gramian
/// or computed on the fly as `φ(φᵀa) − a∘diag(G)`.
#[derive(Debug, Clone)]
pub enum InhibitionOperator<'a> {
    Materialized(Gramian),
    MatrixFree(&'a ExemplarDictionary),
}

impl<'a> InhibitionOperator<'a> {
    /// Resolves a backend choice for `dict`.
    pub fn for_dictionary(dict: &'a ExemplarDictionary, backend: Backend, budget_bytes: u64) -> Result<Self> {
        match backend {
            Backend::MatrixFree => Ok(InhibitionOperator::MatrixFree(dict)),
            Backend::Materialized => Ok(InhibitionOperator::Materialized(materialize_gramian(
                dict,
                budget_bytes,
            )?)),
            Backend::Auto => {
                if Gramian::required_bytes(dict.len()) <= budget_bytes as u128 {
                    Ok(InhibitionOperator::Materialized(materialize_gramian(
                        dict,
                        budget_bytes,
                    )?))
                } else {
                    Ok(InhibitionOperator::MatrixFree(dict))
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            InhibitionOperator::Materialized(g) => g.size(),
            InhibitionOperator::MatrixFree(d) => d.len(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            InhibitionOperator::Materialized(_) => Backend::Materialized,
            InhibitionOperator::MatrixFree(_) => Backend::MatrixFree,
        }
    }

    /// Checks that the operator still describes `dict` (no append since the
    /// Gramian was built).
    pub fn validate_for(&self, dict: &ExemplarDictionary) -> Result<()> {
        match self {
            InhibitionOperator::Materialized(g) if !g.matches(dict) => Err(DseldError::invalid(
                "inhibition operator",
                "Gramian is stale: the dictionary changed after it was built",
            )),
            InhibitionOperator::MatrixFree(d) if d.len() != dict.len() || d.revision() != dict.revision() => Err(
                DseldError::invalid("inhibition operator", "built for a different dictionary"),
            ),
            _ => Ok(()),
        }
    }

    /// Inhibition for a dense activation vector.
    pub fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        check_len("activation vector", self.size(), a.len())?;
        let active: Vec<usize> = (0..a.len()).filter(|&i| a[i] != 0.0).collect();
        let mut out = vec![0.0; a.len()];
        let mut scratch = Vec::new();
        self.apply_active(a, &active, &mut out, &mut scratch, &mut OpTally::default());
        Ok(out)
    }

    /// Hot-path form: `active` lists the indices with `a[m] != 0` in
    /// ascending order. Only those columns contribute.
    pub(crate) fn apply_active(
        &self,
        a: &[f64],
        active: &[usize],
        out: &mut [f64],
        scratch: &mut Vec<f64>,
        tally: &mut OpTally,
    ) {
        out.fill(0.0);
        if active.is_empty() {
            return;
        }
        let m_total = out.len();
        match self {
            InhibitionOperator::Materialized(g) => {
                for &m in active {
                    let alpha = a[m];
                    let row = g.row(m);
                    linalg::axpy_mixed(alpha, &row[..m], &mut out[..m]);
                    linalg::axpy_mixed(alpha, &row[m + 1..], &mut out[m + 1..]);
                }
                let terms = (active.len() * (m_total - 1)) as u64;
                tally.inhibition.mul += terms;
                tally.inhibition.add += terms;
            }
            InhibitionOperator::MatrixFree(dict) => {
                let n = dict.dim();
                scratch.clear();
                scratch.resize(n, 0.0);
                for &m in active {
                    linalg::axpy_mixed(a[m], dict.atom(m), scratch);
                }
                for (o, atom) in out.iter_mut().zip(dict.rows()) {
                    *o = linalg::dot_mixed(atom, scratch);
                }
                let diag = dict.self_inner();
                for &m in active {
                    out[m] -= a[m] * diag[m];
                }
                let k = active.len() as u64;
                let (n, mt) = (n as u64, m_total as u64);
                tally.inhibition.mul += k * n + mt * n + k;
                tally.inhibition.add += k * n + mt * (n - 1) + k;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict(rows: &[f32], dim: usize) -> ExemplarDictionary {
        let m = rows.len() / dim;
        ExemplarDictionary::build(rows, dim, &vec![0; m], 1).unwrap()
    }

    #[test]
    fn orthonormal_atoms_give_identity() {
        let d = dict(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3);
        let g = materialize_gramian(&d, DEFAULT_BUDGET).unwrap();
        for i in 0..3 {
            for m in 0..3 {
                assert_eq!(g.get(i, m), if i == m { 1.0 } else { 0.0 });
            }
        }
    }

    const DEFAULT_BUDGET: u64 = crate::dictionary::DEFAULT_GRAMIAN_BUDGET;

    #[test]
    fn duplicate_atoms_give_all_ones() {
        let d = dict(&[1.0, 0.0, 1.0, 0.0], 2);
        let g = materialize_gramian(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.row(0), &[1.0, 1.0]);
        assert_eq!(g.row(1), &[1.0, 1.0]);
    }

    #[test]
    fn hand_computed_inhibition_excludes_diagonal() {
        let d = dict(&[1.0, 0.0, 1.0, 0.0], 2);
        for op in [
            InhibitionOperator::for_dictionary(&d, Backend::Materialized, DEFAULT_BUDGET).unwrap(),
            InhibitionOperator::MatrixFree(&d),
        ] {
            assert_eq!(op.apply(&[0.5, 0.0]).unwrap(), vec![0.0, 0.5]);
            assert_eq!(op.apply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
            assert!(matches!(op.apply(&[1.0]), Err(DseldError::DimensionMismatch { .. })));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = dict(&[1.0, 0.0, 0.0, 1.0], 2);
        let err = materialize_gramian(&d, 15).unwrap_err();
        assert!(matches!(
            err,
            DseldError::GramianBudget {
                required: 16,
                allowed: 15
            }
        ));
        assert!(err.to_string().contains("matrix-free"));
        let op = InhibitionOperator::for_dictionary(&d, Backend::Auto, 15).unwrap();
        assert_eq!(op.backend(), Backend::MatrixFree);
        let op = InhibitionOperator::for_dictionary(&d, Backend::Auto, 16).unwrap();
        assert_eq!(op.backend(), Backend::Materialized);
    }

    #[test]
    fn append_invalidates_gramian() {
        let d = dict(&[1.0, 0.0, 0.0, 1.0], 2);
        let op = InhibitionOperator::for_dictionary(&d, Backend::Materialized, DEFAULT_BUDGET).unwrap();
        assert!(op.validate_for(&d).is_ok());
        let d2 = d.clone().append_atoms(&[1.0, 1.0], &[0]).unwrap();
        assert!(op.validate_for(&d2).is_err());
    }

    #[test]
    fn backend_names_parse() {
        assert_eq!("matrix-free".parse::<Backend>().unwrap(), Backend::MatrixFree);
        assert_eq!("auto".parse::<Backend>().unwrap(), Backend::Auto);
        assert!("dense".parse::<Backend>().is_err());
    }
}
