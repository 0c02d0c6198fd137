//! `dseld`: build exemplar dictionaries, encode, classify, reconstruct,
//! evaluate, sweep and estimate FLOPs.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 numerical divergence.

mod commands;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dseld_core::{DseldError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] DseldError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(DseldError::InvalidParameter { .. } | DseldError::Config { .. }) => 2,
            CliError::Core(DseldError::Divergence { .. } | DseldError::NonFiniteLoss { .. }) => 4,
            CliError::Core(_) | CliError::Io { .. } => 3,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

macro_rules! config_flags {
    ($($key:ident),* $(,)?) => {
        /// One optional flag per run-configuration key. Flags override the
        /// config file, which overrides the defaults.
        #[derive(Debug, Default, Args)]
        pub struct ConfigFlags {
            $(
                #[arg(long, global = true, value_name = "VALUE", help_heading = "Run configuration")]
                $key: Option<String>,
            )*
        }

        impl ConfigFlags {
            #[cfg(test)]
            const KEYS: &'static [&'static str] = &[$(stringify!($key)),*];

            fn overrides(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$key {
                        out.push((stringify!($key), v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

config_flags!(
    lambda,
    tau,
    steps,
    step_size,
    backend,
    gramian_budget_bytes,
    input_norm,
    convergence_tol,
    dict_size,
    split_seed,
    stratified,
    test_limit,
    decoder,
    nn_train_size,
    nn_init,
    nn_epochs,
    nn_learning_rate,
    nn_batch_size,
    nn_seed,
    random_dict_seed,
    ssim_window,
    ssim_sigma,
    ssim_k1,
    ssim_k2,
);

#[derive(Debug, Parser)]
#[command(
    name = "dseld",
    version,
    about = "Exemplar-dictionary LCA sparse coding and decoding"
)]
pub struct Cli {
    /// Flat `key = value` run-configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON instead of text/CSV.
    #[arg(long, global = true)]
    json: bool,

    #[command(flatten)]
    flags: ConfigFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a training set and write its exemplar dictionary.
    BuildDict(commands::BuildDictArgs),
    /// Encode inputs and print their sparse codes.
    Encode(commands::EncodeArgs),
    /// Predict a class for each input with one decoder.
    Classify(commands::ClassifyArgs),
    /// Reconstruct inputs and score reconstruction quality.
    Reconstruct(commands::ReconstructArgs),
    /// Print the analytical FLOP table.
    Flops(commands::FlopsArgs),
    /// Evaluate a grid of (lambda, tau, steps, dict_size) points.
    Sweep(commands::SweepArgs),
    /// Encode a test set once and report accuracy for each decoder.
    Eval(commands::EvalArgs),
}

impl Cli {
    fn run_config(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                if !path.is_file() {
                    return Err(usage(format!("config file {} does not exist", path.display())));
                }
                RunConfig::load(path)?
            }
            None => RunConfig::default(),
        };
        for (key, value) in self.flags.overrides() {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = cli.run_config()?;
    let json = cli.json;
    match &cli.command {
        Command::BuildDict(args) => commands::build_dict(args, &cfg, json),
        Command::Encode(args) => commands::encode(args, &cfg, json),
        Command::Classify(args) => commands::classify(args, &cfg, json),
        Command::Reconstruct(args) => commands::reconstruct(args, &cfg, json),
        Command::Flops(args) => commands::flops(args, json),
        Command::Sweep(args) => commands::sweep(args, &cfg, json),
        Command::Eval(args) => commands::eval(args, &cfg, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
