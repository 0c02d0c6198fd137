//! Run configuration as a flat `key = value` text file.
//!
//! Blank lines and lines starting with `#` are ignored. Later assignments
//! win, so callers apply the file first and command-line overrides after.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::decoders::{DecoderKind, NnInit, ShallowNnConfig};
use crate::dictionary::Backend;
use crate::error::{DseldError, Result};
use crate::lca::{InputScaling, LcaConfig};
use crate::reconstruction::SsimParams;

/// Every recognized key, in the order `to_text` writes them.
pub const CONFIG_KEYS: &[&str] = &[
    "lambda",
    "tau",
    "steps",
    "step_size",
    "backend",
    "gramian_budget_bytes",
    "input_norm",
    "convergence_tol",
    "dict_size",
    "split_seed",
    "stratified",
    "test_limit",
    "decoder",
    "nn_train_size",
    "nn_init",
    "nn_epochs",
    "nn_learning_rate",
    "nn_batch_size",
    "nn_seed",
    "random_dict_seed",
    "ssim_window",
    "ssim_sigma",
    "ssim_k1",
    "ssim_k2",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub lca: LcaConfig,
    /// Atoms drawn from the training set.
    pub dict_size: usize,
    pub split_seed: u64,
    /// Stratify the dictionary split by class.
    pub stratified: bool,
    /// Evaluate at most this many test inputs; 0 means all.
    pub test_limit: usize,
    pub decoders: Vec<DecoderKind>,
    /// Held-out training rows encoded to train the shallow NN; 0 means all.
    pub nn_train_size: usize,
    pub nn_init: NnInit,
    pub nn: ShallowNnConfig,
    /// Seed of the `N(0, 1)` baseline dictionary.
    pub random_dict_seed: u64,
    pub ssim: SsimParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lca: LcaConfig::default(),
            dict_size: 10_000,
            split_seed: 0,
            stratified: true,
            test_limit: 0,
            decoders: DecoderKind::ALL.to_vec(),
            nn_train_size: 5_000,
            nn_init: NnInit::ClassIndicator,
            nn: ShallowNnConfig::default(),
            random_dict_seed: 7,
            ssim: SsimParams::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {value:?} for key {key}"))
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("cannot parse {value:?} for key {key} as a boolean")),
    }
}

impl RunConfig {
    /// Parses a config file's text over the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DseldError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| DseldError::Config {
                line: i + 1,
                reason: format!("expected key = value, got {line:?}"),
            })?;
            self.set_inner(key.trim(), value.trim())
                .map_err(|reason| DseldError::Config { line: i + 1, reason })?;
        }
        self.validate()
    }

    /// Sets one key, as a command-line override would.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_inner(key, value)
            .map_err(|reason| DseldError::Config { line: 0, reason })?;
        self.validate()
    }

    fn set_inner(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "lambda" => self.lca.threshold = parse(key, value)?,
            "tau" => self.lca.tau = parse(key, value)?,
            "steps" => self.lca.steps = parse(key, value)?,
            "step_size" => self.lca.step_size = parse(key, value)?,
            "backend" => self.lca.backend = value.parse::<Backend>().map_err(|e| e.to_string())?,
            "gramian_budget_bytes" => self.lca.gramian_budget_bytes = parse(key, value)?,
            "input_norm" => self.lca.input_scaling = value.parse::<InputScaling>().map_err(|e| e.to_string())?,
            "convergence_tol" => {
                self.lca.convergence_tol = match value {
                    "none" | "" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "dict_size" => self.dict_size = parse(key, value)?,
            "split_seed" => self.split_seed = parse(key, value)?,
            "stratified" => self.stratified = parse_bool(key, value)?,
            "test_limit" => self.test_limit = parse(key, value)?,
            "decoder" => {
                self.decoders = if value == "all" {
                    DecoderKind::ALL.to_vec()
                } else {
                    value
                        .split(',')
                        .map(|v| v.trim().parse::<DecoderKind>().map_err(|e| e.to_string()))
                        .collect::<std::result::Result<_, _>>()?
                }
            }
            "nn_train_size" => self.nn_train_size = parse(key, value)?,
            "nn_init" => self.nn_init = value.parse::<NnInit>().map_err(|e| e.to_string())?,
            "nn_epochs" => self.nn.epochs = parse(key, value)?,
            "nn_learning_rate" => self.nn.learning_rate = parse(key, value)?,
            "nn_batch_size" => self.nn.batch_size = parse(key, value)?,
            "nn_seed" => self.nn.seed = parse(key, value)?,
            "random_dict_seed" => self.random_dict_seed = parse(key, value)?,
            "ssim_window" => self.ssim.window = parse(key, value)?,
            "ssim_sigma" => self.ssim.sigma = parse(key, value)?,
            "ssim_k1" => self.ssim.k1 = parse(key, value)?,
            "ssim_k2" => self.ssim.k2 = parse(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.lca.validate()?;
        if self.dict_size == 0 {
            return Err(DseldError::invalid("dict_size", "must be positive"));
        }
        if self.decoders.is_empty() {
            return Err(DseldError::invalid("decoder", "at least one decoder is required"));
        }
        if !(self.nn.learning_rate > 0.0 && self.nn.learning_rate.is_finite()) {
            return Err(DseldError::invalid("nn_learning_rate", "must be > 0"));
        }
        Ok(())
    }

    /// Current value of `key` in config-file syntax.
    pub fn get(&self, key: &str) -> Option<String> {
        let v = match key {
            "lambda" => self.lca.threshold.to_string(),
            "tau" => self.lca.tau.to_string(),
            "steps" => self.lca.steps.to_string(),
            "step_size" => self.lca.step_size.to_string(),
            "backend" => self.lca.backend.to_string(),
            "gramian_budget_bytes" => self.lca.gramian_budget_bytes.to_string(),
            "input_norm" => self.lca.input_scaling.to_string(),
            "convergence_tol" => self.lca.convergence_tol.map_or("none".into(), |t| t.to_string()),
            "dict_size" => self.dict_size.to_string(),
            "split_seed" => self.split_seed.to_string(),
            "stratified" => self.stratified.to_string(),
            "test_limit" => self.test_limit.to_string(),
            "decoder" => self.decoders.iter().map(|d| d.name()).collect::<Vec<_>>().join(","),
            "nn_train_size" => self.nn_train_size.to_string(),
            "nn_init" => self.nn_init.to_string(),
            "nn_epochs" => self.nn.epochs.to_string(),
            "nn_learning_rate" => self.nn.learning_rate.to_string(),
            "nn_batch_size" => self.nn.batch_size.to_string(),
            "nn_seed" => self.nn.seed.to_string(),
            "random_dict_seed" => self.random_dict_seed.to_string(),
            "ssim_window" => self.ssim.window.to_string(),
            "ssim_sigma" => self.ssim.sigma.to_string(),
            "ssim_k1" => self.ssim.k1.to_string(),
            "ssim_k2" => self.ssim.k2.to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// Serializes every key; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("listed key"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::DEFAULT_GRAMIAN_BUDGET;
    use crate::lca::DEFAULT_INPUT_NORM;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.lca.threshold, 2.0);
        assert_eq!(cfg.lca.tau, 100.0);
        assert_eq!(cfg.lca.steps, 100);
        assert_eq!(cfg.lca.step_size, 1.0);
        assert_eq!(cfg.lca.gramian_budget_bytes, DEFAULT_GRAMIAN_BUDGET);
        assert_eq!(cfg.lca.input_scaling, InputScaling::Normalize(DEFAULT_INPUT_NORM));
        assert_eq!(cfg.nn, ShallowNnConfig::default());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("lambda", "0.3").unwrap();
        cfg.set("decoder", "max-class-sum,shallow-nn").unwrap();
        cfg.set("convergence_tol", "1e-6").unwrap();
        cfg.set("input_norm", "raw").unwrap();
        cfg.set("backend", "matrix-free").unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        for key in CONFIG_KEYS {
            assert!(cfg.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn later_assignments_override() {
        let mut cfg = RunConfig::parse("# comment\n\nsteps = 10\ntau=50\n").unwrap();
        assert_eq!(cfg.lca.steps, 10);
        assert_eq!(cfg.lca.tau, 50.0);
        cfg.set("steps", "20").unwrap();
        assert_eq!(cfg.lca.steps, 20);
    }

    #[test]
    fn errors_name_the_line() {
        let err = RunConfig::parse("steps = 3\nlambda = banana\n").unwrap_err();
        assert!(matches!(err, DseldError::Config { line: 2, .. }), "{err}");
        assert!(matches!(
            RunConfig::parse("nonsense"),
            Err(DseldError::Config { line: 1, .. })
        ));
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("tau = -1").is_err());
    }
}
