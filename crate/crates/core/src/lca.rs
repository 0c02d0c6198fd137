//! Discrete-time LCA dynamics over an exemplar dictionary.
//!
//! Each neuron `i` integrates a constant drive `b_i = <s, φ_i>` against
//! lateral inhibition from the other firing neurons:
//!
//! ```text
//! u ← u + (dt/τ)(b − u − Σ_{m≠i} G[i][m] a_m)
//! a ← T_λ(u)
//! ```
//!
//! Forward Euler, synchronous (every neuron sees the previous step's `a`),
//! starting from `u = 0`, for exactly `K` steps unless a convergence
//! tolerance is set.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::dictionary::{Backend, ExemplarDictionary, InhibitionOperator, DEFAULT_GRAMIAN_BUDGET};
use crate::error::{check_len, DseldError, Result};
use crate::linalg;
use crate::workload::OpTally;

/// Target L2 norm for inputs in classification mode. With `λ = 2`, unit
/// inputs never reach threshold (`|b_i| ≤ 1`); at norm 22 MNIST digits
/// fire within the first fifth of a 100-step run while staying under 1%
/// active.
pub const DEFAULT_INPUT_NORM: f64 = 22.0;

/// How an input vector is scaled before the drive is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputScaling {
    /// Use the input as given (reconstruction mode).
    Raw,
    /// Rescale to the given L2 norm.
    Normalize(f64),
}

impl InputScaling {
    /// Returns the factor applied to `s`.
    fn factor(&self, s: &[f32]) -> f64 {
        match *self {
            InputScaling::Raw => 1.0,
            InputScaling::Normalize(target) => {
                let norm = linalg::norm_sq_f32(s).sqrt();
                if norm > 0.0 {
                    target / norm
                } else {
                    1.0
                }
            }
        }
    }
}

impl std::str::FromStr for InputScaling {
    type Err = DseldError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "raw" {
            return Ok(InputScaling::Raw);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(InputScaling::Normalize(v)),
            _ => Err(DseldError::invalid(
                "input_norm",
                format!("expected \"raw\" or a positive norm, got {s:?}"),
            )),
        }
    }
}

impl std::fmt::Display for InputScaling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputScaling::Raw => f.write_str("raw"),
            InputScaling::Normalize(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcaConfig {
    /// Threshold λ.
    pub threshold: f64,
    /// Leak time constant τ.
    pub tau: f64,
    /// Number of time steps K.
    pub steps: usize,
    /// Euler step dt.
    pub step_size: f64,
    pub backend: Backend,
    pub gramian_budget_bytes: u64,
    pub input_scaling: InputScaling,
    /// Record the per-step energy decomposition and keep the drive vector.
    pub record_trace: bool,
    /// Stop once `max |Δu| <` this value. Off by default.
    pub convergence_tol: Option<f64>,
}

impl Default for LcaConfig {
    fn default() -> Self {
        LcaConfig {
            threshold: 2.0,
            tau: 100.0,
            steps: 100,
            step_size: 1.0,
            backend: Backend::Auto,
            gramian_budget_bytes: DEFAULT_GRAMIAN_BUDGET,
            input_scaling: InputScaling::Normalize(DEFAULT_INPUT_NORM),
            record_trace: false,
            convergence_tol: None,
        }
    }
}

impl LcaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(DseldError::invalid("lambda", "must be a finite value >= 0"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(DseldError::invalid("tau", "must be > 0"));
        }
        if self.steps == 0 {
            return Err(DseldError::invalid("steps", "must be >= 1"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(DseldError::invalid("step_size", "must be > 0"));
        }
        if let Some(tol) = self.convergence_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(DseldError::invalid("convergence_tol", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Membrane potentials and activations between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LcaState {
    pub u: Vec<f64>,
    pub a: Vec<f64>,
    pub step: usize,
}

impl LcaState {
    pub fn zeros(m: usize) -> Self {
        LcaState {
            u: vec![0.0; m],
            a: vec![0.0; m],
            step: 0,
        }
    }

    pub fn fired(&self) -> usize {
        self.a.iter().filter(|v| **v != 0.0).count()
    }
}

/// Energy split at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySample {
    /// `½‖s − Ŝ‖²`
    pub reconstruction: f64,
    /// `λ Σ|a_i|`
    pub sparsity: f64,
}

impl EnergySample {
    pub fn total(&self) -> f64 {
        self.reconstruction + self.sparsity
    }
}

/// Final activations of one encode, stored sparsely, with its firing trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCode {
    len: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
    /// Nonzero activations after each executed step.
    pub fired_per_step: Vec<usize>,
    pub energy_trace: Option<Vec<EnergySample>>,
    /// The drive `b`, kept when tracing.
    pub drive: Option<Vec<f64>>,
    /// Factor the raw input was multiplied by before encoding.
    pub input_scale: f64,
}

impl SparseCode {
    pub fn from_dense(a: &[f64]) -> Self {
        let (indices, values) = a
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32, *v))
            .unzip();
        SparseCode {
            len: a.len(),
            indices,
            values,
            fired_per_step: Vec::new(),
            energy_trace: None,
            drive: None,
            input_scale: 1.0,
        }
    }

    pub fn with_firing(mut self, fired_per_step: Vec<usize>) -> Self {
        self.fired_per_step = fired_per_step;
        self
    }

    /// Code length `M`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_silent(&self) -> bool {
        self.indices.is_empty()
    }

    /// Nonzero `(index, activation)` pairs in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| (i as usize, v))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.len];
        for (i, v) in self.iter() {
            a[i] = v;
        }
        a
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// Same support with every activation multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Executed steps (equals `K` unless a convergence stop fired).
    pub fn steps_run(&self) -> usize {
        self.fired_per_step.len()
    }

    /// Writes the per-step trace as CSV:
    /// `step,fired_count,energy,reconstruction_term,sparsity_term`.
    /// Energy columns are empty when no energy trace was recorded.
    pub fn write_trace_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "step,fired_count,energy,reconstruction_term,sparsity_term")?;
        for (k, fired) in self.fired_per_step.iter().enumerate() {
            match self.energy_trace.as_ref().and_then(|t| t.get(k)) {
                Some(e) => writeln!(
                    out,
                    "{},{},{},{},{}",
                    k + 1,
                    fired,
                    e.total(),
                    e.reconstruction,
                    e.sparsity
                )?,
                None => writeln!(out, "{},{},,,", k + 1, fired)?,
            }
        }
        Ok(())
    }

    pub fn save_trace_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| DseldError::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_trace_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| DseldError::io(path, e))
    }
}

/// `T_λ(u)`: zero below threshold, shrunk toward zero by λ otherwise.
#[inline]
pub fn soft_threshold(u: f64, lambda: f64) -> f64 {
    if u.abs() >= lambda {
        u - lambda * u.signum()
    } else {
        0.0
    }
}

/// Drive `b_i = <s, φ_i>` for every atom.
pub fn drive(dict: &ExemplarDictionary, s: &[f64]) -> Result<Vec<f64>> {
    check_len("input dimension", dict.dim(), s.len())?;
    Ok(dict.rows().map(|atom| linalg::dot_mixed(atom, s)).collect())
}

/// `½‖s − φᵀa‖² + λ Σ|a_i|`
pub fn energy(dict: &ExemplarDictionary, s: &[f64], a: &[f64], lambda: f64) -> Result<f64> {
    check_len("input dimension", dict.dim(), s.len())?;
    check_len("activation vector", dict.len(), a.len())?;
    let sample = energy_terms(
        dict,
        s,
        a.iter().copied().enumerate().filter(|(_, v)| *v != 0.0),
        lambda,
    );
    Ok(sample.total())
}

fn energy_terms(
    dict: &ExemplarDictionary,
    s: &[f64],
    active: impl Iterator<Item = (usize, f64)>,
    lambda: f64,
) -> EnergySample {
    let mut residual = s.to_vec();
    let mut l1 = 0.0;
    for (m, v) in active {
        linalg::axpy_mixed(-v, dict.atom(m), &mut residual);
        l1 += v.abs();
    }
    EnergySample {
        reconstruction: 0.5 * linalg::norm_sq_f64(&residual),
        sparsity: lambda * l1,
    }
}

/// Reusable buffers for stepping one state.
struct Stepper {
    inhibition: Vec<f64>,
    active: Vec<usize>,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(m: usize) -> Self {
        Stepper {
            inhibition: vec![0.0; m],
            active: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// One Euler step. `self.active` must list the nonzero entries of
    /// `state.a` on entry; it is refreshed on exit. Returns `max |Δu|`.
    #[allow(clippy::needless_range_loop)] // u, a, b and inhibition are indexed in lockstep
    fn step(
        &mut self,
        state: &mut LcaState,
        b: &[f64],
        op: &InhibitionOperator<'_>,
        cfg: &LcaConfig,
        tally: &mut OpTally,
    ) -> Result<f64> {
        let m = state.u.len();
        op.apply_active(&state.a, &self.active, &mut self.inhibition, &mut self.scratch, tally);

        let rate = cfg.step_size / cfg.tau;
        let lambda = cfg.threshold;
        let mut max_delta = 0.0f64;
        let mut finite = true;
        self.active.clear();
        for i in 0..m {
            let delta = rate * ((b[i] - state.u[i]) - self.inhibition[i]);
            let u = state.u[i] + delta;
            finite &= u.is_finite();
            max_delta = max_delta.max(delta.abs());
            state.u[i] = u;
            let a = soft_threshold(u, lambda);
            state.a[i] = a;
            if a != 0.0 {
                self.active.push(i);
            }
        }
        state.step += 1;
        if !finite {
            return Err(DseldError::Divergence { step: state.step });
        }
        let m = m as u64;
        tally.update.mul += m;
        tally.update.add += 3 * m;
        if lambda > 0.0 {
            tally.threshold.add += self.active.len() as u64;
        }
        Ok(max_delta)
    }
}

/// Advances `state` by one step.
pub fn step(state: &mut LcaState, b: &[f64], op: &InhibitionOperator<'_>, cfg: &LcaConfig) -> Result<()> {
    let m = op.size();
    check_len("membrane potentials", m, state.u.len())?;
    check_len("activations", m, state.a.len())?;
    check_len("drive", m, b.len())?;
    let mut stepper = Stepper::new(m);
    stepper.active = (0..m).filter(|&i| state.a[i] != 0.0).collect();
    stepper.step(state, b, op, cfg, &mut OpTally::default())?;
    Ok(())
}

/// Encodes inputs against one dictionary with a resolved inhibition backend.
pub struct Encoder<'a> {
    dict: &'a ExemplarDictionary,
    op: InhibitionOperator<'a>,
    cfg: LcaConfig,
}

impl<'a> Encoder<'a> {
    pub fn new(dict: &'a ExemplarDictionary, cfg: LcaConfig) -> Result<Self> {
        cfg.validate()?;
        let op = InhibitionOperator::for_dictionary(dict, cfg.backend, cfg.gramian_budget_bytes)?;
        Ok(Encoder { dict, op, cfg })
    }

    /// Uses a prebuilt operator, which must describe `dict`.
    pub fn with_operator(dict: &'a ExemplarDictionary, op: InhibitionOperator<'a>, cfg: LcaConfig) -> Result<Self> {
        cfg.validate()?;
        op.validate_for(dict)?;
        Ok(Encoder { dict, op, cfg })
    }

    pub fn config(&self) -> &LcaConfig {
        &self.cfg
    }

    pub fn dictionary(&self) -> &ExemplarDictionary {
        self.dict
    }

    pub fn operator(&self) -> &InhibitionOperator<'a> {
        &self.op
    }

    pub fn encode(&self, s: &[f32]) -> Result<SparseCode> {
        self.run(s, &mut OpTally::default())
    }

    /// Encode and report the arithmetic executed, split by phase.
    pub fn encode_instrumented(&self, s: &[f32]) -> Result<(SparseCode, OpTally)> {
        let mut tally = OpTally::default();
        let code = self.run(s, &mut tally)?;
        Ok((code, tally))
    }

    /// Encodes many inputs in parallel; output order matches input order.
    pub fn encode_batch<S: AsRef<[f32]> + Sync>(&self, inputs: &[S]) -> Result<Vec<SparseCode>> {
        inputs.par_iter().map(|s| self.encode(s.as_ref())).collect()
    }

    fn run(&self, s: &[f32], tally: &mut OpTally) -> Result<SparseCode> {
        let dict = self.dict;
        let cfg = &self.cfg;
        check_len("input dimension", dict.dim(), s.len())?;
        let (m, n) = (dict.len(), dict.dim());

        let scale = cfg.input_scaling.factor(s);
        let input: Vec<f64> = s.iter().map(|&v| v as f64 * scale).collect();
        if matches!(cfg.input_scaling, InputScaling::Normalize(_)) {
            tally.normalize.mul += 2 * n as u64;
            tally.normalize.add += n as u64 - 1;
        }

        let b = drive(dict, &input)?;
        tally.drive.mul += (m * n) as u64;
        tally.drive.add += (m * (n - 1)) as u64;

        let mut state = LcaState::zeros(m);
        let mut stepper = Stepper::new(m);
        let mut fired = Vec::with_capacity(cfg.steps);
        let mut trace = cfg.record_trace.then(|| Vec::with_capacity(cfg.steps));

        for _ in 0..cfg.steps {
            let max_delta = stepper.step(&mut state, &b, &self.op, cfg, tally)?;
            fired.push(stepper.active.len());
            if let Some(trace) = trace.as_mut() {
                let active = stepper.active.iter().map(|&i| (i, state.a[i]));
                trace.push(energy_terms(dict, &input, active, cfg.threshold));
            }
            if cfg.convergence_tol.is_some_and(|tol| max_delta < tol) {
                break;
            }
        }

        let mut code = SparseCode::from_dense(&state.a);
        code.fired_per_step = fired;
        code.energy_trace = trace;
        code.drive = cfg.record_trace.then_some(b);
        code.input_scale = scale;
        Ok(code)
    }
}

/// One-shot encode. Builds the inhibition operator for this call only;
/// use [`Encoder`] to amortize a materialized Gramian across inputs.
pub fn encode(dict: &ExemplarDictionary, s: &[f32], cfg: &LcaConfig) -> Result<SparseCode> {
    let mut cfg = cfg.clone();
    if cfg.backend == Backend::Auto {
        cfg.backend = Backend::MatrixFree;
    }
    Encoder::new(dict, cfg)?.encode(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormal(m: usize) -> ExemplarDictionary {
        let mut rows = vec![0.0f32; m * m];
        for i in 0..m {
            rows[i * m + i] = 1.0;
        }
        ExemplarDictionary::build(&rows, m, &(0..m as u32).collect::<Vec<_>>(), m as u32).unwrap()
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 2.0), 1.0);
        assert_eq!(soft_threshold(-3.0, 2.0), -1.0);
        assert_eq!(soft_threshold(1.5, 2.0), 0.0);
        assert_eq!(soft_threshold(2.0, 2.0), 0.0);
        assert_eq!(soft_threshold(-0.7, 0.0), -0.7);
    }

    #[test]
    fn drive_of_atom_is_unit_vector() {
        let d = orthonormal(4);
        let s: Vec<f64> = d.atom(0).iter().map(|&v| v as f64).collect();
        assert_eq!(drive(&d, &s).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(drive(&d, &[0.0; 4]).unwrap(), vec![0.0; 4]);
        assert!(drive(&d, &[0.0; 3]).is_err());
    }

    #[test]
    fn zero_drive_is_a_fixed_point() {
        let d = orthonormal(3);
        let op = InhibitionOperator::MatrixFree(&d);
        let mut st = LcaState::zeros(3);
        for _ in 0..5 {
            step(&mut st, &[0.0; 3], &op, &LcaConfig::default()).unwrap();
        }
        assert_eq!(
            st,
            LcaState {
                u: vec![0.0; 3],
                a: vec![0.0; 3],
                step: 5
            }
        );
    }

    #[test]
    fn scalar_recurrence_matches_hand_iteration() {
        let d = ExemplarDictionary::build(&[1.0], 1, &[0], 1).unwrap();
        let op = InhibitionOperator::MatrixFree(&d);
        let cfg = LcaConfig::default();
        let mut st = LcaState::zeros(1);
        step(&mut st, &[5.0], &op, &cfg).unwrap();
        assert!((st.u[0] - 0.05).abs() < 1e-15);
        assert_eq!(st.a[0], 0.0);

        // With a single neuron there is no inhibition: u_k = 5(1 - 0.99^k).
        let mut expected = 0.05;
        for _ in 1..300 {
            step(&mut st, &[5.0], &op, &cfg).unwrap();
            expected += 0.01 * (5.0 - expected);
        }
        assert!((st.u[0] - expected).abs() < 1e-12);
        assert!((st.a[0] - soft_threshold(expected, 2.0)).abs() < 1e-12);
        assert!(st.u[0] > 4.7);
    }

    #[test]
    fn duplicate_atoms_evolve_identically() {
        let d = ExemplarDictionary::build(&[1.0, 0.0, 1.0, 0.0], 2, &[0, 0], 1).unwrap();
        let op = InhibitionOperator::for_dictionary(&d, Backend::Materialized, 1 << 20).unwrap();
        let cfg = LcaConfig {
            threshold: 0.5,
            ..LcaConfig::default()
        };
        let mut st = LcaState::zeros(2);
        for _ in 0..200 {
            step(&mut st, &[5.0, 5.0], &op, &cfg).unwrap();
            assert_eq!(st.u[0], st.u[1]);
            assert_eq!(st.a[0], st.a[1]);
        }
        assert!(st.a[0] > 0.0);
    }

    #[test]
    fn step_rejects_mismatched_shapes() {
        let d = orthonormal(2);
        let op = InhibitionOperator::MatrixFree(&d);
        let mut st = LcaState::zeros(3);
        assert!(step(&mut st, &[0.0; 3], &op, &LcaConfig::default()).is_err());
    }

    #[test]
    fn divergent_step_size_is_reported() {
        let rows = [1.0f32, 0.0, 1.0, 0.01];
        let d = ExemplarDictionary::build(&rows, 2, &[0, 0], 1).unwrap();
        let cfg = LcaConfig {
            threshold: 0.0,
            tau: 1.0,
            step_size: 50.0,
            steps: 10_000,
            input_scaling: InputScaling::Raw,
            ..LcaConfig::default()
        };
        let err = encode(&d, &[1.0, 1.0], &cfg).unwrap_err();
        assert!(matches!(err, DseldError::Divergence { .. }), "{err}");
        assert!(err.is_divergence());
    }

    #[test]
    fn atom_input_selects_that_atom() {
        let d = orthonormal(5);
        let cfg = LcaConfig {
            threshold: 0.5,
            steps: 600,
            input_scaling: InputScaling::Raw,
            ..LcaConfig::default()
        };
        let code = encode(&d, d.atom(3), &cfg).unwrap();
        let a = code.to_dense();
        assert!(a[3] > 0.0);
        assert_eq!(code.nnz(), 1);
        assert!(a.iter().enumerate().all(|(i, &v)| i == 3 || v < a[3]));
    }

    #[test]
    fn huge_threshold_never_fires() {
        let d = orthonormal(4);
        let cfg = LcaConfig {
            threshold: 1e9,
            ..LcaConfig::default()
        };
        let code = encode(&d, &[1.0, 2.0, 3.0, 4.0], &cfg).unwrap();
        assert!(code.is_silent());
        assert_eq!(code.fired_per_step, vec![0; 100]);
    }

    #[test]
    fn energy_hand_cases() {
        let d = orthonormal(3);
        assert_eq!(energy(&d, &[1.0, 2.0, 2.0], &[0.0; 3], 2.0).unwrap(), 4.5);
        assert_eq!(energy(&d, &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 2.0).unwrap(), 2.0);
        assert!(energy(&d, &[1.0, 0.0], &[0.0; 3], 2.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(LcaConfig::default().validate().is_ok());
        for bad in [
            LcaConfig {
                tau: 0.0,
                ..LcaConfig::default()
            },
            LcaConfig {
                steps: 0,
                ..LcaConfig::default()
            },
            LcaConfig {
                step_size: -1.0,
                ..LcaConfig::default()
            },
            LcaConfig {
                threshold: -0.1,
                ..LcaConfig::default()
            },
            LcaConfig {
                convergence_tol: Some(0.0),
                ..LcaConfig::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
        let d = LcaConfig::default();
        assert_eq!((d.threshold, d.tau, d.steps, d.step_size), (2.0, 100.0, 100, 1.0));
    }

    #[test]
    fn convergence_stop_ends_early() {
        let d = orthonormal(2);
        let cfg = LcaConfig {
            threshold: 0.1,
            tau: 10.0,
            steps: 10_000,
            convergence_tol: Some(1e-6),
            input_scaling: InputScaling::Raw,
            ..LcaConfig::default()
        };
        let code = encode(&d, &[1.0, 0.0], &cfg).unwrap();
        assert!(code.steps_run() < 10_000);
        assert!((code.to_dense()[0] - 0.9).abs() < 1e-4);
    }

    #[test]
    fn trace_csv_has_one_row_per_step() {
        let d = orthonormal(2);
        let cfg = LcaConfig {
            steps: 3,
            record_trace: true,
            ..LcaConfig::default()
        };
        let code = encode(&d, &[1.0, 0.5], &cfg).unwrap();
        let mut buf = Vec::new();
        code.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "step,fired_count,energy,reconstruction_term,sparsity_term");
        assert_eq!(lines.len(), 4);
        assert!(code.drive.is_some());
    }

    #[test]
    fn input_scaling_parses() {
        assert_eq!("raw".parse::<InputScaling>().unwrap(), InputScaling::Raw);
        assert_eq!("22".parse::<InputScaling>().unwrap(), InputScaling::Normalize(22.0));
        assert!("-1".parse::<InputScaling>().is_err());
    }
}
