//! Analytical FLOP model for exemplar-LCA inference and Gramian
//! construction, plus the empirical counters that check it.
//!
//! Per input, the drive `b = φ s` costs `(2N-1)M` once. Each of the `K`
//! steps then costs `2M·M̂` for inhibition from the `M̂` firing neurons and
//! `M` for the leak, giving
//!
//! ```text
//! FLOPs = K((2N-1)M/K + 2M·M̂ + M) = (2N-1)M + K(2M·M̂ + M)
//! ```
//!
//! Threshold comparisons are not counted. Building the Gramian costs
//! `M(M+1)N/2` multiplies and `M(M+1)(N-1)/2` adds.

use std::ops::AddAssign;

use serde::Serialize;

use crate::error::{DseldError, Result};
use crate::lca::SparseCode;

/// Multiply and add counts for one phase of a computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCounts {
    pub mul: u64,
    pub add: u64,
}

impl PhaseCounts {
    pub fn total(&self) -> u64 {
        self.mul + self.add
    }
}

impl AddAssign for PhaseCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.mul += rhs.mul;
        self.add += rhs.add;
    }
}

/// Arithmetic executed by an instrumented run, split by phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpTally {
    /// Row / input normalization.
    pub normalize: PhaseCounts,
    /// `b = φ s`.
    pub drive: PhaseCounts,
    /// Lateral inhibition over all steps.
    pub inhibition: PhaseCounts,
    /// Leak and membrane update over all steps.
    pub update: PhaseCounts,
    /// Shrinkage of firing neurons over all steps.
    pub threshold: PhaseCounts,
}

impl OpTally {
    /// Everything the workload model covers (normalization excluded).
    pub fn lca_total(&self) -> u64 {
        self.drive.total() + self.inhibition.total() + self.update.total() + self.threshold.total()
    }

    pub fn total(&self) -> u64 {
        self.normalize.total() + self.lca_total()
    }
}

impl AddAssign for OpTally {
    fn add_assign(&mut self, rhs: Self) {
        self.normalize += rhs.normalize;
        self.drive += rhs.drive;
        self.inhibition += rhs.inhibition;
        self.update += rhs.update;
        self.threshold += rhs.threshold;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WorkloadParams {
    pub steps: u64,
    pub dim: u64,
    pub atoms: u64,
    pub firing: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkloadEstimate {
    pub label: String,
    pub params: WorkloadParams,
    pub training_flops: u64,
    pub inference_flops: u64,
}

impl WorkloadEstimate {
    pub fn new(label: impl Into<String>, params: WorkloadParams) -> Result<Self> {
        Ok(WorkloadEstimate {
            label: label.into(),
            training_flops: training_flops(params.dim, params.atoms)?,
            inference_flops: inference_flops(params.steps, params.dim, params.atoms, params.firing)?,
            params,
        })
    }

    pub fn training_tflops(&self) -> f64 {
        self.training_flops as f64 / 1e12
    }

    pub fn inference_gflops(&self) -> f64 {
        self.inference_flops as f64 / 1e9
    }
}

fn overflow() -> DseldError {
    DseldError::invalid("workload", "FLOP count overflows u64")
}

/// Exact inference FLOPs for one input.
pub fn inference_flops(steps: u64, dim: u64, atoms: u64, firing: u64) -> Result<u64> {
    if steps == 0 || dim == 0 || atoms == 0 {
        return Err(DseldError::invalid("workload", "K, N and M must be positive"));
    }
    if firing > atoms {
        return Err(DseldError::invalid(
            "firing",
            format!("expected firing count {firing} exceeds dictionary size {atoms}"),
        ));
    }
    let drive = (2 * dim - 1).checked_mul(atoms).ok_or_else(overflow)?;
    let per_step = 2u64
        .checked_mul(atoms)
        .and_then(|v| v.checked_mul(firing))
        .and_then(|v| v.checked_add(atoms))
        .ok_or_else(overflow)?;
    per_step
        .checked_mul(steps)
        .and_then(|v| v.checked_add(drive))
        .ok_or_else(overflow)
}

/// The same model for a fractional mean firing count, as measured by a run.
pub fn inference_flops_real(steps: u64, dim: u64, atoms: u64, mean_firing: f64) -> f64 {
    let (k, n, m) = (steps as f64, dim as f64, atoms as f64);
    (2.0 * n - 1.0) * m + k * (2.0 * m * mean_firing + m)
}

/// FLOPs to build the Gramian once.
pub fn training_flops(dim: u64, atoms: u64) -> Result<u64> {
    if dim == 0 || atoms == 0 {
        return Err(DseldError::invalid("workload", "N and M must be positive"));
    }
    // M(M+1) is always even.
    let pairs = atoms.checked_mul(atoms + 1).ok_or_else(overflow)? / 2;
    let mul = pairs.checked_mul(dim).ok_or_else(overflow)?;
    let add = pairs.checked_mul(dim - 1).ok_or_else(overflow)?;
    mul.checked_add(add).ok_or_else(overflow)
}

/// Penultimate-layer widths of common feature extractors.
pub const EXTRACTOR_DIMS: &[(&str, u64)] = &[
    ("Inception", 2048),
    ("ResNet-50 & ResNet-152", 2048),
    ("EfficientNet", 1280),
    ("DenseNet", 1024),
    ("MobileNet", 960),
    ("VGG-16", 512),
];

/// Estimates for every extractor at each of `steps`, with `M` atoms and a
/// firing rate of `firing_fraction`.
pub fn extractor_table(atoms: u64, firing_fraction: f64, steps: &[u64]) -> Result<Vec<WorkloadEstimate>> {
    let firing = (atoms as f64 * firing_fraction).round() as u64;
    let mut rows = Vec::new();
    for &(name, dim) in EXTRACTOR_DIMS {
        for &k in steps {
            rows.push(WorkloadEstimate::new(
                name,
                WorkloadParams {
                    steps: k,
                    dim,
                    atoms,
                    firing,
                },
            )?);
        }
    }
    Ok(rows)
}

/// Mean firing fraction per step across a set of codes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsityProfile {
    pub per_step: Vec<f64>,
    pub overall_mean: f64,
}

impl SparsityProfile {
    /// Index of the step with the most firing (first one on ties).
    pub fn peak_step(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.per_step.iter().enumerate() {
            if v > self.per_step[best] {
                best = k;
            }
        }
        best
    }
}

pub fn measure_sparsity<'a, I>(codes: I) -> Result<SparsityProfile>
where
    I: IntoIterator<Item = &'a SparseCode>,
{
    let mut per_step: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for code in codes {
        let steps = code.fired_per_step.len();
        if count == 0 {
            per_step = vec![0.0; steps];
        } else if steps != per_step.len() {
            return Err(DseldError::DimensionMismatch {
                context: "firing trace length",
                expected: per_step.len(),
                actual: steps,
            });
        }
        let m = code.len() as f64;
        for (acc, &fired) in per_step.iter_mut().zip(&code.fired_per_step) {
            *acc += fired as f64 / m;
        }
        count += 1;
    }
    if count == 0 {
        return Err(DseldError::Empty("sparsity input"));
    }
    for v in &mut per_step {
        *v /= count as f64;
    }
    let overall_mean = if per_step.is_empty() {
        0.0
    } else {
        per_step.iter().sum::<f64>() / per_step.len() as f64
    };
    Ok(SparsityProfile { per_step, overall_mean })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step_nothing_firing_is_drive_plus_leak() {
        let (n, m) = (7, 13);
        assert_eq!(inference_flops(1, n, m, 0).unwrap(), (2 * n - 1) * m + m);
    }

    #[test]
    fn single_atom_training_cost() {
        assert_eq!(training_flops(9, 1).unwrap(), 9 + 8);
    }

    #[test]
    fn large_configs_are_exact() {
        assert_eq!(inference_flops(100, 2048, 50_000, 200).unwrap(), 2_209_750_000);
        assert_eq!(inference_flops(10, 512, 50_000, 200).unwrap(), 251_650_000);
        assert_eq!(training_flops(2048, 50_000).unwrap(), 5_118_852_375_000);
    }

    #[test]
    fn rejects_firing_above_dictionary() {
        assert!(inference_flops(10, 10, 5, 6).is_err());
        assert!(inference_flops(0, 10, 5, 1).is_err());
        assert!(training_flops(0, 5).is_err());
        assert!(training_flops(u64::MAX / 2, u64::MAX / 2).is_err());
    }

    #[test]
    fn inference_cost_is_monotone() {
        let base = inference_flops(10, 64, 500, 20).unwrap();
        assert!(inference_flops(11, 64, 500, 20).unwrap() >= base);
        assert!(inference_flops(10, 65, 500, 20).unwrap() >= base);
        assert!(inference_flops(10, 64, 501, 20).unwrap() >= base);
        assert!(inference_flops(10, 64, 500, 21).unwrap() >= base);
        let real = inference_flops_real(10, 64, 500, 20.0);
        assert_eq!(real as u64, base);
    }

    #[test]
    fn table_has_two_rows_per_extractor() {
        let rows = extractor_table(50_000, 0.004, &[100, 10]).unwrap();
        assert_eq!(rows.len(), 2 * EXTRACTOR_DIMS.len());
        assert!(rows.iter().all(|r| r.params.firing == 200));
    }

    #[test]
    fn sparsity_of_constant_firing() {
        let code = SparseCode::from_dense(&vec![0.0; 1000]).with_firing(vec![5; 4]);
        let p = measure_sparsity([&code]).unwrap();
        assert_eq!(p.per_step, vec![0.005; 4]);
        assert!((p.overall_mean - 0.005).abs() < 1e-15);

        let silent = SparseCode::from_dense(&[0.0; 10]).with_firing(vec![0; 3]);
        let p = measure_sparsity([&silent, &silent]).unwrap();
        assert_eq!(p.per_step, vec![0.0; 3]);
    }

    #[test]
    fn sparsity_rejects_empty_and_ragged() {
        assert!(matches!(measure_sparsity([]), Err(DseldError::Empty(_))));
        let a = SparseCode::from_dense(&[0.0; 4]).with_firing(vec![0; 3]);
        let b = SparseCode::from_dense(&[0.0; 4]).with_firing(vec![0; 2]);
        assert!(measure_sparsity([&a, &b]).is_err());
    }

    #[test]
    fn peak_step_prefers_first_maximum() {
        let p = SparsityProfile {
            per_step: vec![0.0, 0.3, 0.3, 0.1],
            overall_mean: 0.175,
        };
        assert_eq!(p.peak_step(), 1);
    }
}
