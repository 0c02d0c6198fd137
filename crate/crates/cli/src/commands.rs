//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use dseld_core::decoders::{decode_max_activation, decode_max_class_sum, decode_shallow_nn};
use dseld_core::pipeline::{
    build_dictionary, compare_reconstructions, evaluate, run_sweep, NnSource, ReconstructionPair, SweepGrid,
};
use dseld_core::reconstruction::{append_quality_csv, reconstruct as reconstruct_code, write_pgm, write_ppm};
use dseld_core::workload::{extractor_table, WorkloadEstimate, WorkloadParams};
use dseld_core::{
    read_dictionary, read_model, write_dictionary, write_model, Dataset, DecoderKind, Encoder, ExemplarDictionary,
    ImageShape, QualityReport, RunConfig, ShallowNnModel,
};

use crate::source::{parse_list, parse_shape, Pixels, Source};
use crate::{usage, CliError, CliResult};

fn check_parent(path: &Path) -> CliResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(usage(format!("output directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

fn check_file(path: &Path, what: &str) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} {} does not exist", path.display())))
    }
}

fn write_text(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn limit(set: Dataset, n: usize) -> CliResult<Dataset> {
    if set.is_empty() {
        return Err(CliError::Core(dseld_core::DseldError::Empty("input set")));
    }
    Ok(set.head(n))
}

fn check_dims(dict: &ExemplarDictionary, set: &Dataset) -> CliResult {
    if dict.dim() != set.dim {
        return Err(usage(format!(
            "input dimension {} does not match dictionary dimension {}",
            set.dim,
            dict.dim()
        )));
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct BuildDictArgs {
    /// Training data: an MNIST directory or a feature-matrix file.
    #[arg(long)]
    data: PathBuf,
    /// Dictionary file to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn build_dict(args: &BuildDictArgs, cfg: &RunConfig, as_json: bool) -> CliResult {
    let source = Source::parse(&args.data)?;
    check_parent(&args.out)?;
    let train = source.train(Pixels::Unit)?;
    let (dict, split) = build_dictionary(&train, cfg)?;
    write_dictionary(&args.out, &dict)?;
    let histogram = dict.class_histogram();
    if as_json {
        println!(
            "{}",
            serde_json::json!({
                "atoms": dict.len(),
                "dim": dict.dim(),
                "class_histogram": histogram,
                "held_out": split.held_out.len(),
                "path": args.out,
            })
        );
    } else {
        println!("atoms (M): {}", dict.len());
        println!("dim (N): {}", dict.dim());
        println!("held-out rows: {}", split.held_out.len());
        println!("class histogram:");
        for (c, n) in histogram.iter().enumerate() {
            println!("  {c}: {n}");
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    dict: PathBuf,
    /// Inputs: an MNIST directory (test split) or a feature-matrix file.
    #[arg(long)]
    input: PathBuf,
    /// Encode the first N inputs (0 = all).
    #[arg(long, default_value_t = 1)]
    limit: usize,
    /// Write one per-step trace CSV per input into this directory.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

pub fn encode(args: &EncodeArgs, cfg: &RunConfig, as_json: bool) -> CliResult {
    check_file(&args.dict, "dictionary")?;
    let source = Source::parse(&args.input)?;
    let dict = read_dictionary(&args.dict)?;
    let inputs = limit(source.test(Pixels::Unit)?, args.limit)?;
    check_dims(&dict, &inputs)?;
    let mut lca = cfg.lca.clone();
    lca.record_trace |= args.trace_dir.is_some();
    let encoder = Encoder::new(&dict, lca)?;
    let codes = dseld_core::pipeline::encode_all(&encoder, &inputs, args.trace_dir.as_deref())?;
    if as_json {
        let rows: Vec<_> = codes
            .iter()
            .zip(&inputs.labels)
            .enumerate()
            .map(|(i, (code, label))| {
                serde_json::json!({
                    "input": i,
                    "label": label,
                    "nnz": code.nnz(),
                    "active": code.iter().collect::<Vec<_>>(),
                    "fired_per_step": code.fired_per_step,
                })
            })
            .collect();
        println!("{}", serde_json::Value::Array(rows));
    } else {
        let mut out = String::from("input,atom,atom_label,activation\n");
        for (i, code) in codes.iter().enumerate() {
            for (atom, a) in code.iter() {
                let _ = writeln!(out, "{i},{atom},{},{a}", dict.labels()[atom]);
            }
        }
        print!("{out}");
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    dict: PathBuf,
    /// Inputs: an MNIST directory (test split) or a feature-matrix file.
    #[arg(long)]
    input: PathBuf,
    /// Decoder to use.
    #[arg(long = "with", default_value = "max-class-sum")]
    with: DecoderKind,
    /// Saved shallow-NN model (required for `--with shallow-nn`).
    #[arg(long)]
    nn_model: Option<PathBuf>,
}

pub fn classify(args: &ClassifyArgs, cfg: &RunConfig, as_json: bool) -> CliResult {
    check_file(&args.dict, "dictionary")?;
    let source = Source::parse(&args.input)?;
    let model = match (args.with, &args.nn_model) {
        (DecoderKind::ShallowNn, None) => return Err(usage("--with shallow-nn needs --nn-model")),
        (DecoderKind::ShallowNn, Some(p)) => {
            check_file(p, "model")?;
            Some(read_model(p)?)
        }
        _ => None,
    };
    let dict = read_dictionary(&args.dict)?;
    let inputs = limit(source.test(Pixels::Unit)?, cfg.test_limit)?;
    check_dims(&dict, &inputs)?;
    let encoder = Encoder::new(&dict, cfg.lca.clone())?;
    let codes = dseld_core::pipeline::encode_all(&encoder, &inputs, None)?;

    let mut rows = Vec::with_capacity(codes.len());
    for code in &codes {
        let scores = match args.with {
            DecoderKind::MaxActivation => decode_max_activation(code, &dict)?,
            DecoderKind::MaxClassSum => decode_max_class_sum(code, &dict)?,
            DecoderKind::ShallowNn => decode_shallow_nn(model.as_ref().expect("checked above"), code)?,
        };
        rows.push(scores);
    }
    let correct = rows
        .iter()
        .zip(&inputs.labels)
        .filter(|(s, &l)| s.is_correct(l))
        .count();
    if as_json {
        let items: Vec<_> = rows
            .iter()
            .zip(&inputs.labels)
            .enumerate()
            .map(|(i, (s, label))| {
                serde_json::json!({"input": i, "label": label, "predicted": s.predicted, "abstain": s.abstain})
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "decoder": args.with.name(),
                "top1": correct as f64 / rows.len() as f64,
                "predictions": items,
            })
        );
    } else {
        let mut out = String::from("input,label,predicted,abstain\n");
        for (i, (s, label)) in rows.iter().zip(&inputs.labels).enumerate() {
            let _ = writeln!(out, "{i},{label},{},{}", s.predicted, s.abstain);
        }
        print!("{out}");
        eprintln!("{}: top1 {}/{}", args.with, correct, rows.len());
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    dict: PathBuf,
    /// Images: an MNIST directory (test split) or a feature-matrix file of
    /// 0–255 pixel values.
    #[arg(long)]
    input: PathBuf,
    /// Reconstruct the first N inputs (0 = all).
    #[arg(long, default_value_t = 20)]
    limit: usize,
    /// Image shape `WxH` or `WxHxC` (defaults to 28x28 for MNIST).
    #[arg(long)]
    shape: Option<String>,
    /// Write original and reconstructed images (PGM/PPM) here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Append quality rows to this CSV file.
    #[arg(long)]
    quality_csv: Option<PathBuf>,
    /// Also reconstruct from a seeded N(0, 1) dictionary of the same size.
    #[arg(long)]
    compare_random: bool,
}

fn export_image(dir: &Path, name: &str, shape: ImageShape, pixels: &[f64]) -> CliResult {
    let result = match shape.channels {
        1 => write_pgm(dir.join(format!("{name}.pgm")), shape.width, shape.height, pixels),
        3 => write_ppm(dir.join(format!("{name}.ppm")), shape.width, shape.height, pixels),
        c => return Err(usage(format!("image export supports 1 or 3 channels, not {c}"))),
    };
    Ok(result?)
}

pub fn reconstruct(args: &ReconstructArgs, cfg: &RunConfig, as_json: bool) -> CliResult {
    check_file(&args.dict, "dictionary")?;
    let source = Source::parse(&args.input)?;
    let shape = match (&args.shape, source.image_shape()) {
        (Some(text), _) => parse_shape(text)?,
        (None, Some(shape)) => shape,
        (None, None) => return Err(usage("--shape is required for feature-matrix input")),
    };
    if args.compare_random && args.out_dir.is_some() {
        return Err(usage("--out-dir cannot be combined with --compare-random"));
    }
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
    }
    if let Some(p) = &args.quality_csv {
        check_parent(p)?;
    }
    let dict = read_dictionary(&args.dict)?;
    let images = limit(source.test(Pixels::Byte)?, args.limit)?;
    check_dims(&dict, &images)?;
    if shape.len() != images.dim {
        return Err(usage(format!(
            "shape {}x{}x{} does not match input dimension {}",
            shape.width, shape.height, shape.channels, images.dim
        )));
    }

    let mut reports: Vec<(String, QualityReport)> = Vec::new();
    let mut pairs: Vec<ReconstructionPair> = Vec::new();
    if args.compare_random {
        pairs = compare_reconstructions(&dict, &images, shape, &cfg.lca, &cfg.ssim, cfg.random_dict_seed)?;
        for (i, p) in pairs.iter().enumerate() {
            reports.push((format!("dataset-{i}"), p.dataset));
            reports.push((format!("random-{i}"), p.random));
        }
    } else {
        let encoder = Encoder::new(&dict, cfg.lca.clone())?;
        let codes = encoder.encode_batch(&images.rows())?;
        for (i, (code, img)) in codes.iter().zip(images.rows()).enumerate() {
            let original: Vec<f64> = img.iter().map(|&v| v as f64).collect();
            let recon = reconstruct_code(&dict, code)?;
            let report = QualityReport::measure(&original, &recon, shape, &cfg.ssim, code.steps_run())?;
            if let Some(dir) = &args.out_dir {
                export_image(dir, &format!("original_{i:05}"), shape, &original)?;
                export_image(dir, &format!("recon_{i:05}"), shape, &recon)?;
            }
            reports.push((format!("dataset-{i}"), report));
        }
    }
    if let Some(p) = &args.quality_csv {
        append_quality_csv(p, &reports)?;
    }

    if as_json {
        let rows: Vec<_> = reports
            .iter()
            .map(|(label, r)| serde_json::json!({"label": label, "report": r}))
            .collect();
        println!("{}", serde_json::Value::Array(rows));
    } else {
        println!("{}", QualityReport::CSV_HEADER);
        for (label, r) in &reports {
            println!("{}", r.csv_row(label));
        }
    }
    if !pairs.is_empty() {
        let wins = pairs.iter().filter(|p| p.dataset_wins()).count();
        eprintln!("dataset dictionary better on all metrics: {wins}/{}", pairs.len());
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct FlopsArgs {
    /// Dictionary size M.
    #[arg(long, default_value_t = 50_000)]
    atoms: u64,
    /// Expected firing fraction (M̂ = fraction·M).
    #[arg(long, default_value_t = 0.004)]
    firing_fraction: f64,
    /// Comma-separated step counts K.
    #[arg(long, default_value = "100,10")]
    step_counts: String,
    /// Evaluate a single feature dimension instead of the extractor table.
    #[arg(long)]
    dim: Option<u64>,
    /// Explicit firing count M̂ (overrides --firing-fraction).
    #[arg(long)]
    firing: Option<u64>,
}

pub fn flops(args: &FlopsArgs, as_json: bool) -> CliResult {
    if !(0.0..=1.0).contains(&args.firing_fraction) {
        return Err(usage("--firing-fraction must be within [0, 1]"));
    }
    let steps: Vec<u64> = parse_list("step-counts", &args.step_counts)?;
    let firing = args
        .firing
        .unwrap_or((args.atoms as f64 * args.firing_fraction).round() as u64);
    let rows: Vec<WorkloadEstimate> = match args.dim {
        Some(dim) => steps
            .iter()
            .map(|&k| {
                WorkloadEstimate::new(
                    format!("N={dim}"),
                    WorkloadParams {
                        steps: k,
                        dim,
                        atoms: args.atoms,
                        firing,
                    },
                )
            })
            .collect::<Result<_, _>>()?,
        None if args.firing.is_some() => return Err(usage("--firing needs --dim; the table uses --firing-fraction")),
        None => extractor_table(args.atoms, args.firing_fraction, &steps)?,
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("estimates serialize"));
    } else {
        println!(
            "{:<24} {:>6} {:>5} {:>18} {:>18}",
            "Feature extractor", "N", "K", "Training (TFLOPs)", "Inference (GFLOPs)"
        );
        for r in &rows {
            println!(
                "{:<24} {:>6} {:>5} {:>18.2} {:>18.2}",
                r.label,
                r.params.dim,
                r.params.steps,
                r.training_tflops(),
                r.inference_gflops()
            );
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Training data: an MNIST directory or a feature-matrix file.
    #[arg(long)]
    train: PathBuf,
    /// Test data (defaults to the MNIST test split of `--train`).
    #[arg(long)]
    test: Option<PathBuf>,
    /// Comma-separated λ values (defaults to the configured λ).
    #[arg(long)]
    lambdas: Option<String>,
    /// Comma-separated τ values.
    #[arg(long)]
    taus: Option<String>,
    /// Comma-separated K values.
    #[arg(long)]
    step_counts: Option<String>,
    /// Comma-separated dictionary sizes M.
    #[arg(long)]
    dict_sizes: Option<String>,
    /// Completed-point checkpoint; existing rows are reused.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn sweep(args: &SweepArgs, cfg: &RunConfig, as_json: bool) -> CliResult {
    let train_src = Source::parse(&args.train)?;
    let test_src = match &args.test {
        Some(p) => Source::parse(p)?,
        None => match &train_src {
            Source::Mnist(_) => train_src.clone(),
            Source::Features(_) => return Err(usage("--test is required for feature-matrix training data")),
        },
    };
    for p in [&args.checkpoint, &args.out].into_iter().flatten() {
        check_parent(p)?;
    }
    let single = SweepGrid::single(cfg);
    let grid = SweepGrid {
        lambda: args
            .lambdas
            .as_deref()
            .map_or(Ok(single.lambda), |t| parse_list("lambdas", t))?,
        tau: args.taus.as_deref().map_or(Ok(single.tau), |t| parse_list("taus", t))?,
        steps: args
            .step_counts
            .as_deref()
            .map_or(Ok(single.steps), |t| parse_list("step-counts", t))?,
        dict_size: args
            .dict_sizes
            .as_deref()
            .map_or(Ok(single.dict_size), |t| parse_list("dict-sizes", t))?,
    };
    if grid.is_empty() {
        return Err(usage("sweep grid is empty"));
    }
    let train = train_src.train(Pixels::Unit)?;
    let test = limit(test_src.test(Pixels::Unit)?, cfg.test_limit)?;
    let outcome = run_sweep(&train, &test, cfg, &grid, args.checkpoint.as_deref(), None)?;
    let text = if as_json {
        serde_json::json!({
            "rows": outcome.rows,
            "computed": outcome.computed,
            "reused": outcome.reused,
        })
        .to_string()
    } else {
        outcome.to_csv()
    };
    match &args.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    eprintln!("sweep: {} computed, {} reused", outcome.computed, outcome.reused);
    Ok(())
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Dictionary file. Without it the dictionary is built from `--train`.
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Training data the dictionary was drawn from; its held-out rows
    /// (the complement of the configured split) train the shallow NN.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Test data: an MNIST directory (test split) or a feature-matrix file.
    #[arg(long)]
    test: PathBuf,
    /// Saved shallow-NN model; skips training.
    #[arg(long)]
    nn_model: Option<PathBuf>,
    /// Save the shallow-NN model trained during this run.
    #[arg(long)]
    save_nn_model: Option<PathBuf>,
    /// Write the accuracy CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one per-step trace CSV per test input into this directory.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

pub fn eval(args: &EvalArgs, cfg: &RunConfig, as_json: bool) -> CliResult {
    let test_src = Source::parse(&args.test)?;
    let train_src = args.train.as_deref().map(Source::parse).transpose()?;
    if let Some(p) = &args.dict {
        check_file(p, "dictionary")?;
    }
    if let Some(p) = &args.nn_model {
        check_file(p, "model")?;
    }
    for p in [&args.out, &args.save_nn_model].into_iter().flatten() {
        check_parent(p)?;
    }
    let wants_nn = cfg.decoders.contains(&DecoderKind::ShallowNn);
    if args.dict.is_none() && train_src.is_none() {
        return Err(usage("eval needs --dict or --train"));
    }
    if wants_nn && args.nn_model.is_none() && train_src.is_none() {
        return Err(usage(
            "the shallow-nn decoder needs --train (held-out rows) or --nn-model; \
             or pass --decoder max-activation,max-class-sum",
        ));
    }

    let train = train_src.as_ref().map(|s| s.train(Pixels::Unit)).transpose()?;
    let (dict, held_out) = match (&args.dict, &train) {
        (Some(p), train) => {
            let dict = read_dictionary(p)?;
            let held = match train {
                Some(t) => Some(dseld_core::split_dataset(
                    &t.labels,
                    cfg.dict_size,
                    cfg.split_seed,
                    cfg.stratified,
                )?),
                None => None,
            };
            (dict, held)
        }
        (None, Some(t)) => {
            let (dict, split) = build_dictionary(t, cfg)?;
            (dict, Some(split))
        }
        (None, None) => unreachable!("checked above"),
    };
    let test = limit(test_src.test(Pixels::Unit)?, cfg.test_limit)?;
    check_dims(&dict, &test)?;

    let model: Option<ShallowNnModel> = args.nn_model.as_deref().map(read_model).transpose()?;
    let held_rows = match (&train, &held_out) {
        (Some(t), Some(split)) if wants_nn && model.is_none() => Some(t.subset(&split.held_out)),
        _ => None,
    };
    if held_rows.as_ref().is_some_and(|h| h.is_empty()) {
        return Err(usage("no held-out training rows are left to train the shallow NN"));
    }
    let nn = match (&model, &held_rows) {
        (Some(m), _) => Some(NnSource::Model(m)),
        (None, Some(rows)) => Some(NnSource::Train(rows)),
        _ => None,
    };
    let report = evaluate(&dict, &test, cfg, nn, args.trace_dir.as_deref())?;
    if let (Some(path), Some(m)) = (&args.save_nn_model, &report.trained_model) {
        write_model(path, m)?;
    }

    let text = if as_json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        )
    } else {
        report.to_csv()
    };
    match &args.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "encoded {} test inputs in {:.1}s; mean firing {:.4}",
        report.test_encodes, report.encode_seconds, report.sparsity.overall_mean
    );
    Ok(())
}
