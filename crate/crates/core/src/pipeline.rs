//! End-to-end runs: dictionary construction from a training set, encoding
//! a test set once and scoring every decoder on the shared codes, parameter
//! sweeps with a resumable checkpoint, and reconstruction comparisons.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data_io::{load_idx, split_dataset, FeatureMatrix, LabeledImages, RunConfig, Split};
use crate::decoders::{
    decode_max_activation, decode_max_class_sum, decode_shallow_nn, train_shallow_nn_from, DecoderKind, NnInit,
    ShallowNnModel,
};
use crate::dictionary::ExemplarDictionary;
use crate::error::{check_len, DseldError, Result};
use crate::lca::{Encoder, LcaConfig, SparseCode};
use crate::reconstruction::{random_dictionary, reconstruct, ImageShape, QualityReport, SsimParams};
use crate::workload::{measure_sparsity, SparsityProfile};

/// Environment variable naming a directory with the four MNIST IDX files.
pub const MNIST_DIR_ENV: &str = "DSELD_MNIST_DIR";

pub const MNIST_FILES: [&str; 4] = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
];

/// Pixel preprocessing for MNIST: `u8 → f32` in [0, 1].
pub const MNIST_PIXEL_SCALE: f32 = 1.0 / 255.0;

/// Row-major labeled features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub features: Vec<f32>,
    pub labels: Vec<u32>,
}

impl Dataset {
    pub fn new(dim: usize, features: Vec<f32>, labels: Vec<u32>) -> Result<Self> {
        if dim == 0 {
            return Err(DseldError::Empty("feature dimension"));
        }
        check_len("feature matrix size", labels.len() * dim, features.len())?;
        Ok(Dataset { dim, features, labels })
    }

    pub fn from_images(images: &LabeledImages, pixel_scale: f32) -> Result<Self> {
        Self::new(
            images.images.pixels_per_image(),
            images.images.to_f32(pixel_scale),
            images.labels_u32(),
        )
    }

    pub fn from_feature_matrix(fm: FeatureMatrix) -> Result<Self> {
        let labels = fm
            .labels
            .ok_or_else(|| DseldError::invalid("features", "feature matrix has no labels"))?;
        Self::new(fm.dim, fm.values, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<&[f32]> {
        self.features.chunks_exact(self.dim).collect()
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.dim);
        for &i in rows {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            dim: self.dim,
            features,
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// The first `n` rows (all of them when `n` is 0 or too large).
    pub fn head(&self, n: usize) -> Dataset {
        let n = if n == 0 { self.len() } else { n.min(self.len()) };
        Dataset {
            dim: self.dim,
            features: self.features[..n * self.dim].to_vec(),
            labels: self.labels[..n].to_vec(),
        }
    }

    pub fn class_count(&self) -> u32 {
        self.labels.iter().copied().max().map_or(0, |c| c + 1)
    }
}

/// MNIST training and test sets.
#[derive(Debug, Clone)]
pub struct Mnist {
    pub train: LabeledImages,
    pub test: LabeledImages,
}

impl Mnist {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = |name: &str| dir.join(name);
        Ok(Mnist {
            train: load_idx(path(MNIST_FILES[0]), path(MNIST_FILES[1]))?,
            test: load_idx(path(MNIST_FILES[2]), path(MNIST_FILES[3]))?,
        })
    }

    /// `dir` if given, else the directory named by `DSELD_MNIST_DIR`.
    /// Returns `None` unless all four files are present.
    pub fn locate(dir: Option<&Path>) -> Option<PathBuf> {
        let dir = match dir {
            Some(d) => d.to_path_buf(),
            None => PathBuf::from(std::env::var_os(MNIST_DIR_ENV)?),
        };
        MNIST_FILES.iter().all(|f| dir.join(f).is_file()).then_some(dir)
    }

    pub fn train_set(&self) -> Result<Dataset> {
        Dataset::from_images(&self.train, MNIST_PIXEL_SCALE)
    }

    pub fn test_set(&self) -> Result<Dataset> {
        Dataset::from_images(&self.test, MNIST_PIXEL_SCALE)
    }
}

/// Splits `train` and builds the dictionary from the chosen rows.
pub fn build_dictionary(train: &Dataset, cfg: &RunConfig) -> Result<(ExemplarDictionary, Split)> {
    if train.is_empty() {
        return Err(DseldError::Empty("training set"));
    }
    let split = split_dataset(&train.labels, cfg.dict_size, cfg.split_seed, cfg.stratified)?;
    let atoms = train.subset(&split.dictionary);
    let dict = ExemplarDictionary::build(&atoms.features, train.dim, &atoms.labels, train.class_count())?;
    Ok((dict, split))
}

/// Accuracy of one decoder on a test set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderAccuracy {
    pub decoder: DecoderKind,
    pub split: String,
    pub top1: f64,
    pub correct: usize,
    pub abstain_count: usize,
    pub total: usize,
    /// Mean fraction of atoms firing per step over the encoded inputs.
    pub mean_firing: f64,
    /// Decoding time plus, for the shallow NN, training time. Encoding is
    /// reported separately since it is shared.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub rows: Vec<DecoderAccuracy>,
    pub sparsity: SparsityProfile,
    /// Test inputs encoded; equals the test-set size because codes are
    /// shared across decoders.
    pub test_encodes: usize,
    pub encode_seconds: f64,
    pub nn_train_accuracy: Option<f64>,
    /// The shallow-NN model trained during this evaluation, if any.
    #[serde(skip)]
    pub trained_model: Option<ShallowNnModel>,
}

pub const EVAL_CSV_HEADER: &str = "decoder,split,top1,abstain_count,mean_firing,wall_seconds";

impl EvalReport {
    pub fn row(&self, kind: DecoderKind) -> Option<&DecoderAccuracy> {
        self.rows.iter().find(|r| r.decoder == kind)
    }

    /// One CSV line per decoder, header first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(EVAL_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.3}",
                r.decoder, r.split, r.top1, r.abstain_count, r.mean_firing, r.wall_seconds
            );
        }
        out
    }
}

/// Where the shallow-NN decoder gets its weights.
pub enum NnSource<'a> {
    /// Train on codes of these (held-out training) rows.
    Train(&'a Dataset),
    Model(&'a ShallowNnModel),
}

/// Encodes `inputs` once. When `trace_dir` is set every input's trace is
/// written to `trace_NNNNN.csv` there.
pub fn encode_all(encoder: &Encoder<'_>, inputs: &Dataset, trace_dir: Option<&Path>) -> Result<Vec<SparseCode>> {
    check_len("input dimension", encoder.dictionary().dim(), inputs.dim)?;
    let codes = encoder.encode_batch(&inputs.rows())?;
    if let Some(dir) = trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| DseldError::io(dir, e))?;
        for (i, code) in codes.iter().enumerate() {
            code.save_trace_csv(&dir.join(format!("trace_{i:05}.csv")))?;
        }
    }
    Ok(codes)
}

/// Scores already-computed codes with every decoder in `decoders`.
pub fn score_codes(
    dict: &ExemplarDictionary,
    codes: &[SparseCode],
    labels: &[u32],
    decoders: &[DecoderKind],
    nn_model: Option<&ShallowNnModel>,
    split: &str,
) -> Result<Vec<DecoderAccuracy>> {
    check_len("labels", codes.len(), labels.len())?;
    if codes.is_empty() {
        return Err(DseldError::Empty("test set"));
    }
    let mean_firing = measure_sparsity(codes)?.overall_mean;
    let mut rows = Vec::with_capacity(decoders.len());
    for &kind in decoders {
        let start = Instant::now();
        let (mut correct, mut abstain) = (0, 0);
        for (code, &label) in codes.iter().zip(labels) {
            let scores = match kind {
                DecoderKind::MaxActivation => decode_max_activation(code, dict)?,
                DecoderKind::MaxClassSum => decode_max_class_sum(code, dict)?,
                DecoderKind::ShallowNn => {
                    let model = nn_model
                        .ok_or_else(|| DseldError::invalid("decoder", "shallow-nn needs training data or a model"))?;
                    decode_shallow_nn(model, code)?
                }
            };
            correct += scores.is_correct(label) as usize;
            abstain += scores.abstain as usize;
        }
        rows.push(DecoderAccuracy {
            decoder: kind,
            split: split.to_string(),
            top1: correct as f64 / codes.len() as f64,
            correct,
            abstain_count: abstain,
            total: codes.len(),
            mean_firing,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Encodes `test` once and scores every configured decoder on the codes.
pub fn evaluate(
    dict: &ExemplarDictionary,
    test: &Dataset,
    cfg: &RunConfig,
    nn: Option<NnSource<'_>>,
    trace_dir: Option<&Path>,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(DseldError::Empty("test set"));
    }
    if test.dim != dict.dim() {
        return Err(DseldError::DimensionMismatch {
            context: "test features vs dictionary",
            expected: dict.dim(),
            actual: test.dim,
        });
    }
    let mut lca = cfg.lca.clone();
    lca.record_trace |= trace_dir.is_some();
    let encoder = Encoder::new(dict, lca)?;

    let start = Instant::now();
    let codes = encode_all(&encoder, test, trace_dir)?;
    let encode_seconds = start.elapsed().as_secs_f64();

    let wants_nn = cfg.decoders.contains(&DecoderKind::ShallowNn);
    let mut nn_seconds = 0.0;
    let trained;
    let mut trained_model = None;
    let model = match (wants_nn, nn) {
        (false, _) => None,
        (true, None) => {
            return Err(DseldError::invalid(
                "decoder",
                "shallow-nn needs held-out training rows or a saved model",
            ))
        }
        (true, Some(NnSource::Model(m))) => Some(m),
        (true, Some(NnSource::Train(rows))) => {
            let t = Instant::now();
            let rows = rows.head(cfg.nn_train_size);
            let train_codes = encode_all(&encoder, &rows, None)?;
            let classes = dict.class_count() as usize;
            let initial = match cfg.nn_init {
                NnInit::Zeros => ShallowNnModel::zeros(classes, dict.len()),
                NnInit::ClassIndicator => ShallowNnModel::class_indicator(dict.labels(), classes)?,
            };
            trained = train_shallow_nn_from(initial, &train_codes, &rows.labels, &cfg.nn)?;
            nn_seconds = t.elapsed().as_secs_f64();
            trained_model = Some(&trained);
            Some(&trained)
        }
    };

    let mut rows = score_codes(dict, &codes, &test.labels, &cfg.decoders, model, "test")?;
    for r in &mut rows {
        if r.decoder == DecoderKind::ShallowNn {
            r.wall_seconds += nn_seconds;
        }
    }
    Ok(EvalReport {
        rows,
        sparsity: measure_sparsity(&codes)?,
        test_encodes: codes.len(),
        encode_seconds,
        nn_train_accuracy: model.map(|m| m.meta.final_train_accuracy),
        trained_model: trained_model.cloned(),
    })
}

/// Grid of `(λ, τ, K, M)` points, visited in row-major order with `M`
/// varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub lambda: Vec<f64>,
    pub tau: Vec<f64>,
    pub steps: Vec<usize>,
    pub dict_size: Vec<usize>,
}

impl SweepGrid {
    /// The single point of `cfg`.
    pub fn single(cfg: &RunConfig) -> Self {
        SweepGrid {
            lambda: vec![cfg.lca.threshold],
            tau: vec![cfg.lca.tau],
            steps: vec![cfg.lca.steps],
            dict_size: vec![cfg.dict_size],
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len() * self.tau.len() * self.steps.len() * self.dict_size.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-point configs derived from `base`.
    pub fn points(&self, base: &RunConfig) -> Vec<RunConfig> {
        let mut out = Vec::with_capacity(self.len());
        for &m in &self.dict_size {
            for &k in &self.steps {
                for &tau in &self.tau {
                    for &lambda in &self.lambda {
                        let mut cfg = base.clone();
                        cfg.dict_size = m;
                        cfg.lca.steps = k;
                        cfg.lca.tau = tau;
                        cfg.lca.threshold = lambda;
                        out.push(cfg);
                    }
                }
            }
        }
        out
    }
}

pub const SWEEP_CSV_HEADER: &str = "lambda,tau,steps,dict_size,top1_max_activation,top1_max_class_sum,mean_firing";

/// Identity of a sweep point: SHA-256 of its full config text plus the
/// data shapes, so a checkpoint is never reused for different settings.
pub fn point_hash(cfg: &RunConfig, train: &Dataset, test: &Dataset) -> String {
    let mut h = Sha256::new();
    h.update(cfg.to_text().as_bytes());
    h.update(format!("train={}x{} test={}x{}", train.len(), train.dim, test.len(), test.dim).as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    /// CSV rows in grid order (no header); shorter than the grid when the
    /// run stopped early.
    pub rows: Vec<String>,
    pub computed: usize,
    pub reused: usize,
}

impl SweepOutcome {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

fn read_checkpoint(path: &Path) -> Result<HashMap<String, String>> {
    if !path.exists() {
        return Ok(HashMap::new());
    }
    let text = std::fs::read_to_string(path).map_err(|e| DseldError::io(path, e))?;
    let mut done = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (hash, row) = line.split_once('\t').ok_or_else(|| DseldError::Config {
            line: i + 1,
            reason: format!("malformed checkpoint line in {}", path.display()),
        })?;
        done.insert(hash.to_string(), row.to_string());
    }
    Ok(done)
}

/// Runs every grid point with the training-free decoders. Completed rows
/// are appended to `checkpoint` (as `hash<TAB>row`) as they finish, and
/// points already present there are not recomputed. `max_new_points`
/// stops the run after that many freshly computed points.
pub fn run_sweep(
    train: &Dataset,
    test: &Dataset,
    base: &RunConfig,
    grid: &SweepGrid,
    checkpoint: Option<&Path>,
    max_new_points: Option<usize>,
) -> Result<SweepOutcome> {
    if grid.is_empty() {
        return Err(DseldError::Empty("sweep grid"));
    }
    if test.is_empty() {
        return Err(DseldError::Empty("test set"));
    }
    let done = match checkpoint {
        Some(p) => read_checkpoint(p)?,
        None => HashMap::new(),
    };
    let mut log = match checkpoint {
        Some(p) => Some(
            std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| DseldError::io(p, e))?,
        ),
        None => None,
    };

    let decoders = [DecoderKind::MaxActivation, DecoderKind::MaxClassSum];
    let mut outcome = SweepOutcome {
        rows: Vec::new(),
        computed: 0,
        reused: 0,
    };
    for mut cfg in grid.points(base) {
        cfg.decoders = decoders.to_vec();
        cfg.validate()?;
        let hash = point_hash(&cfg, train, test);
        if let Some(row) = done.get(&hash) {
            outcome.rows.push(row.clone());
            outcome.reused += 1;
            continue;
        }
        if max_new_points.is_some_and(|n| outcome.computed >= n) {
            break;
        }
        let (dict, _) = build_dictionary(train, &cfg)?;
        let report = evaluate(&dict, test, &cfg, None, None)?;
        let top1 = |k| report.row(k).map_or(f64::NAN, |r| r.top1);
        let row = format!(
            "{},{},{},{},{},{},{}",
            cfg.lca.threshold,
            cfg.lca.tau,
            cfg.lca.steps,
            cfg.dict_size,
            top1(DecoderKind::MaxActivation),
            top1(DecoderKind::MaxClassSum),
            report.sparsity.overall_mean
        );
        if let (Some(file), Some(path)) = (log.as_mut(), checkpoint) {
            writeln!(file, "{hash}\t{row}")
                .and_then(|_| file.flush())
                .map_err(|e| DseldError::io(path, e))?;
        }
        outcome.rows.push(row);
        outcome.computed += 1;
    }
    Ok(outcome)
}

/// One input reconstructed from two dictionaries under the same LCA
/// settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionPair {
    pub dataset: QualityReport,
    pub random: QualityReport,
}

impl ReconstructionPair {
    pub fn dataset_wins(&self) -> bool {
        self.dataset.beats(&self.random)
    }
}

/// Encodes each image against `dict` and against a seeded `N(0, 1)`
/// dictionary of the same size, and scores both reconstructions.
/// `images` must be in 0–255 pixel units.
pub fn compare_reconstructions(
    dict: &ExemplarDictionary,
    images: &Dataset,
    shape: ImageShape,
    lca: &LcaConfig,
    ssim: &SsimParams,
    random_seed: u64,
) -> Result<Vec<ReconstructionPair>> {
    check_len("image size", shape.len(), images.dim)?;
    let random = random_dictionary(dict.len(), dict.dim(), dict.class_count(), random_seed)?;
    let run = |d: &ExemplarDictionary| -> Result<Vec<QualityReport>> {
        let encoder = Encoder::new(d, lca.clone())?;
        let codes = encoder.encode_batch(&images.rows())?;
        codes
            .iter()
            .zip(images.rows())
            .map(|(code, img)| {
                let original: Vec<f64> = img.iter().map(|&v| v as f64).collect();
                let recon = reconstruct(d, code)?;
                QualityReport::measure(&original, &recon, shape, ssim, code.steps_run())
            })
            .collect()
    };
    let dataset = run(dict)?;
    let baseline = run(&random)?;
    Ok(dataset
        .into_iter()
        .zip(baseline)
        .map(|(dataset, random)| ReconstructionPair { dataset, random })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lca::InputScaling;

    /// Two well-separated clusters in 4 dims.
    fn toy(n_per_class: usize, jitter: f32) -> Dataset {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per_class {
            let e = jitter * (i as f32 + 1.0) / n_per_class as f32;
            features.extend_from_slice(&[1.0, e, 0.0, 0.1]);
            labels.push(0);
            features.extend_from_slice(&[0.0, 0.1, 1.0, e]);
            labels.push(1);
        }
        Dataset::new(4, features, labels).unwrap()
    }

    fn small_cfg(m: usize) -> RunConfig {
        RunConfig {
            dict_size: m,
            lca: LcaConfig {
                threshold: 0.1,
                tau: 10.0,
                steps: 30,
                input_scaling: InputScaling::Normalize(1.0),
                ..LcaConfig::default()
            },
            decoders: vec![DecoderKind::MaxActivation, DecoderKind::MaxClassSum],
            ..RunConfig::default()
        }
    }

    #[test]
    fn toy_eval_is_perfect_and_encodes_once() {
        let train = toy(10, 0.3);
        let test = toy(5, 0.2);
        let cfg = small_cfg(8);
        let (dict, split) = build_dictionary(&train, &cfg).unwrap();
        assert_eq!(dict.class_histogram(), vec![4, 4]);
        assert_eq!(split.held_out.len(), 12);
        let report = evaluate(&dict, &test, &cfg, None, None).unwrap();
        assert_eq!(report.test_encodes, test.len());
        for r in &report.rows {
            assert_eq!(r.top1, 1.0, "{}", r.decoder);
        }
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with(EVAL_CSV_HEADER));
    }

    #[test]
    fn eval_rejects_bad_inputs() {
        let train = toy(4, 0.3);
        let cfg = small_cfg(4);
        let (dict, _) = build_dictionary(&train, &cfg).unwrap();
        let empty = Dataset::new(4, vec![], vec![]).unwrap();
        assert!(matches!(
            evaluate(&dict, &empty, &cfg, None, None),
            Err(DseldError::Empty(_))
        ));
        let wide = Dataset::new(5, vec![0.0; 5], vec![0]).unwrap();
        assert!(matches!(
            evaluate(&dict, &wide, &cfg, None, None),
            Err(DseldError::DimensionMismatch {
                expected: 4,
                actual: 5,
                ..
            })
        ));
        let mut nn_cfg = cfg.clone();
        nn_cfg.decoders = vec![DecoderKind::ShallowNn];
        assert!(evaluate(&dict, &toy(2, 0.1), &nn_cfg, None, None).is_err());
    }

    #[test]
    fn shallow_nn_trains_on_held_out_rows() {
        let train = toy(20, 0.3);
        let mut cfg = small_cfg(10);
        cfg.decoders = DecoderKind::ALL.to_vec();
        cfg.nn.learning_rate = 0.5;
        let (dict, split) = build_dictionary(&train, &cfg).unwrap();
        let held = train.subset(&split.held_out);
        let report = evaluate(&dict, &toy(5, 0.2), &cfg, Some(NnSource::Train(&held)), None).unwrap();
        assert_eq!(report.row(DecoderKind::ShallowNn).unwrap().top1, 1.0);
    }

    #[test]
    fn traces_are_written_per_input() {
        let train = toy(4, 0.3);
        let cfg = small_cfg(4);
        let (dict, _) = build_dictionary(&train, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        evaluate(&dict, &toy(2, 0.1), &cfg, None, Some(dir.path())).unwrap();
        let trace = std::fs::read_to_string(dir.path().join("trace_00003.csv")).unwrap();
        assert_eq!(trace.lines().count(), 31);
        assert!(!trace.lines().nth(1).unwrap().ends_with(",,,"));
    }

    #[test]
    fn sweep_resumes_from_checkpoint() {
        let train = toy(10, 0.3);
        let test = toy(3, 0.2);
        let base = small_cfg(4);
        let grid = SweepGrid {
            lambda: vec![0.05, 0.1],
            tau: vec![10.0],
            steps: vec![10, 20],
            dict_size: vec![4],
        };
        let dir = tempfile::tempdir().unwrap();
        let ckpt = dir.path().join("sweep.ckpt");
        let first = run_sweep(&train, &test, &base, &grid, Some(&ckpt), Some(2)).unwrap();
        assert_eq!((first.computed, first.reused, first.rows.len()), (2, 0, 2));
        let second = run_sweep(&train, &test, &base, &grid, Some(&ckpt), None).unwrap();
        assert_eq!((second.computed, second.reused), (2, 2));
        let fresh = run_sweep(&train, &test, &base, &grid, None, None).unwrap();
        assert_eq!(second.rows, fresh.rows);
        assert!(run_sweep(&train, &test, &base, &SweepGrid { lambda: vec![], ..grid }, None, None).is_err());
    }

    #[test]
    fn single_point_sweep_matches_eval() {
        let train = toy(10, 0.3);
        let test = toy(3, 0.2);
        let cfg = small_cfg(6);
        let sweep = run_sweep(&train, &test, &cfg, &SweepGrid::single(&cfg), None, None).unwrap();
        let (dict, _) = build_dictionary(&train, &cfg).unwrap();
        let report = evaluate(&dict, &test, &cfg, None, None).unwrap();
        let fields: Vec<&str> = sweep.rows[0].split(',').collect();
        assert_eq!(
            fields[5],
            report.row(DecoderKind::MaxClassSum).unwrap().top1.to_string()
        );
    }

    #[test]
    fn dataset_helpers() {
        let d = toy(3, 0.1);
        assert_eq!(d.len(), 6);
        assert_eq!(d.class_count(), 2);
        assert_eq!(d.head(2).len(), 2);
        assert_eq!(d.head(0).len(), 6);
        assert_eq!(d.subset(&[1]).row(0), d.row(1));
        assert!(Dataset::new(3, vec![0.0; 4], vec![0]).is_err());
    }
}
