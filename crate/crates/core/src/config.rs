//! Flat key-value configuration: `key = value` lines, `#` comments.
//!
//! Every tunable in the toolkit has a dotted key in [`KEYS`]; unknown keys are
//! rejected both when reading a file and when applying overrides, so a typo
//! fails loudly instead of silently training with defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::MappingKind;
use crate::losses::{LossConfig, LossWeights};
use crate::networks::ArchConfig;
use crate::trainer::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Float,
    Int,
    Bool,
    Path,
    /// `optimal` or `majority`
    Mapping,
}

/// Registry of every config key: (name, kind, one-line description).
pub const KEYS: &[(&str, ValueKind, &str)] = &[
    ("data.train_images", ValueKind::Path, "IDX3 file of training images (optionally .gz)"),
    ("data.train_labels", ValueKind::Path, "IDX1 file of training labels (unused by training; evaluation only)"),
    ("data.test_images", ValueKind::Path, "IDX3 file of test images"),
    ("data.test_labels", ValueKind::Path, "IDX1 file of test labels"),
    ("arch.enc_c1", ValueKind::Int, "encoder conv1 output channels"),
    ("arch.enc_c2", ValueKind::Int, "encoder conv2 output channels"),
    ("arch.enc_c3", ValueKind::Int, "encoder conv3 output channels"),
    ("arch.enc_k1", ValueKind::Int, "encoder conv1 kernel size"),
    ("arch.enc_k2", ValueKind::Int, "encoder conv2 kernel size"),
    ("arch.enc_k3", ValueKind::Int, "encoder conv3 kernel size"),
    ("arch.dec_base", ValueKind::Int, "decoder dense output channels (at 7x7)"),
    ("arch.dec_mid", ValueKind::Int, "decoder mid transpose-conv channels"),
    ("arch.dec_k", ValueKind::Int, "decoder transpose-conv kernel size"),
    ("arch.gen_hidden", ValueKind::Int, "generator hidden width"),
    ("arch.cls_hidden", ValueKind::Int, "classifier hidden width"),
    ("arch.critic_feat", ValueKind::Int, "critic per-branch feature width"),
    ("arch.critic_hidden", ValueKind::Int, "critic joint hidden width"),
    ("arch.init_std", ValueKind::Float, "weight init standard deviation"),
    ("arch.leaky_slope", ValueKind::Float, "leaky rectifier negative slope"),
    ("arch.bn_momentum", ValueKind::Float, "batch-norm running-average momentum"),
    ("loss.alpha", ValueKind::Float, "weight on the two classification losses"),
    ("loss.beta", ValueKind::Float, "weight on the encoder/decoder adversarial losses"),
    ("loss.gamma", ValueKind::Float, "weight on the reconstruction loss"),
    ("loss.non_saturating", ValueKind::Bool, "use -log p instead of log(1-p) for E, D, G"),
    ("loss.epsilon", ValueKind::Float, "probability clamp before logarithms"),
    ("train.learning_rate", ValueKind::Float, "Adam learning rate for all networks"),
    ("train.adam_beta1", ValueKind::Float, "Adam first-moment decay"),
    ("train.adam_beta2", ValueKind::Float, "Adam second-moment decay"),
    ("train.batch_size", ValueKind::Int, "training batch size"),
    ("train.epochs", ValueKind::Int, "number of passes over the training set"),
    ("train.seed", ValueKind::Int, "master seed for init, shuffling and noise"),
    ("train.checkpoint_every", ValueKind::Int, "checkpoint period in steps (0 = final only)"),
    ("train.max_steps", ValueKind::Int, "hard cap on total steps (0 = no cap)"),
    ("train.out_dir", ValueKind::Path, "directory for checkpoints and the metrics log"),
    ("eval.mapping", ValueKind::Mapping, "cluster-to-label mapping: optimal | majority"),
    ("eval.n_styles", ValueKind::Int, "rows in the sample grid"),
    ("eval.n_steps", ValueKind::Int, "interpolation steps n (emits n+1 frames)"),
    ("eval.idx_a", ValueKind::Int, "test-set index of the first interpolation endpoint"),
    ("eval.idx_b", ValueKind::Int, "test-set index of the second interpolation endpoint"),
];

fn kind_of(key: &str) -> Option<ValueKind> {
    KEYS.iter().find(|(k, _, _)| *k == key).map(|(_, kind, _)| *kind)
}

fn check_value(key: &str, kind: ValueKind, value: &str) -> Result<()> {
    let bad = |what: &str| {
        Err(Error::Config(format!(
            "key `{key}` expects {what}, got `{value}`"
        )))
    };
    match kind {
        ValueKind::Float => {
            if value.parse::<f64>().map_or(true, |v| !v.is_finite()) {
                return bad("a finite number");
            }
        }
        ValueKind::Int => {
            if value.parse::<u64>().is_err() {
                return bad("a nonnegative integer");
            }
        }
        ValueKind::Bool => {
            if !matches!(value, "true" | "false" | "0" | "1" | "on" | "off") {
                return bad("a boolean (true/false/0/1/on/off)");
            }
        }
        ValueKind::Path => {}
        ValueKind::Mapping => {
            if !matches!(value, "optimal" | "majority") {
                return bad("`optimal` or `majority`");
            }
        }
    }
    Ok(())
}

/// A validated set of key-value overrides on top of built-in defaults.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Set one key, rejecting unknown keys and unparseable values.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let kind = kind_of(key)
            .ok_or_else(|| Error::Config(format!("unknown config key `{key}`")))?;
        check_value(key, kind, value)?;
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Apply `key=value` pairs as given on a command line.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for pair in pairs {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Error::Config(format!("override `{pair}` is not of the form key=value"))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn f64_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).map_or(default, |v| v.parse().unwrap())
    }

    fn usize_or(&self, key: &str, default: usize) -> usize {
        self.get(key).map_or(default, |v| v.parse().unwrap())
    }

    fn u64_or(&self, key: &str, default: u64) -> u64 {
        self.get(key).map_or(default, |v| v.parse().unwrap())
    }

    fn bool_or(&self, key: &str, default: bool) -> bool {
        self.get(key)
            .map_or(default, |v| matches!(v, "true" | "1" | "on"))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    /// Path value that must be present (data files for eval/export).
    pub fn required_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key)
            .ok_or_else(|| Error::Config(format!("required key `{key}` is not set")))
    }

    pub fn arch_config(&self) -> ArchConfig {
        let d = ArchConfig::default();
        ArchConfig {
            enc_channels: [
                self.usize_or("arch.enc_c1", d.enc_channels[0]),
                self.usize_or("arch.enc_c2", d.enc_channels[1]),
                self.usize_or("arch.enc_c3", d.enc_channels[2]),
            ],
            enc_kernels: [
                self.usize_or("arch.enc_k1", d.enc_kernels[0]),
                self.usize_or("arch.enc_k2", d.enc_kernels[1]),
                self.usize_or("arch.enc_k3", d.enc_kernels[2]),
            ],
            dec_base: self.usize_or("arch.dec_base", d.dec_base),
            dec_mid: self.usize_or("arch.dec_mid", d.dec_mid),
            dec_kernel: self.usize_or("arch.dec_k", d.dec_kernel),
            gen_hidden: self.usize_or("arch.gen_hidden", d.gen_hidden),
            cls_hidden: self.usize_or("arch.cls_hidden", d.cls_hidden),
            critic_feat: self.usize_or("arch.critic_feat", d.critic_feat),
            critic_hidden: self.usize_or("arch.critic_hidden", d.critic_hidden),
            init_std: self.f64_or("arch.init_std", d.init_std),
            leaky_slope: self.f64_or("arch.leaky_slope", d.leaky_slope),
            bn_momentum: self.f64_or("arch.bn_momentum", d.bn_momentum),
            ..d
        }
    }

    pub fn loss_config(&self) -> LossConfig {
        let d = LossConfig::default();
        LossConfig {
            weights: LossWeights {
                alpha: self.f64_or("loss.alpha", d.weights.alpha),
                beta: self.f64_or("loss.beta", d.weights.beta),
                gamma: self.f64_or("loss.gamma", d.weights.gamma),
            },
            non_saturating: self.bool_or("loss.non_saturating", d.non_saturating),
            epsilon: self.f64_or("loss.epsilon", d.epsilon),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig {
            loss: self.loss_config(),
            learning_rate: self.f64_or("train.learning_rate", d.learning_rate),
            adam_beta1: self.f64_or("train.adam_beta1", d.adam_beta1),
            adam_beta2: self.f64_or("train.adam_beta2", d.adam_beta2),
            batch_size: self.usize_or("train.batch_size", d.batch_size),
            epochs: self.usize_or("train.epochs", d.epochs),
            seed: self.u64_or("train.seed", d.seed),
            checkpoint_every: self.u64_or("train.checkpoint_every", d.checkpoint_every),
            max_steps: self.u64_or("train.max_steps", d.max_steps),
            train_images: self.path("data.train_images"),
            out_dir: self
                .path("train.out_dir")
                .unwrap_or_else(|| d.out_dir.clone()),
        }
    }

    pub fn mapping_kind(&self) -> MappingKind {
        match self.get("eval.mapping") {
            Some("majority") => MappingKind::Majority,
            _ => MappingKind::Optimal,
        }
    }

    pub fn n_styles(&self) -> usize {
        self.usize_or("eval.n_styles", 10)
    }

    pub fn n_steps(&self) -> usize {
        self.usize_or("eval.n_steps", 8)
    }

    pub fn interp_indices(&self) -> (usize, usize) {
        (self.usize_or("eval.idx_a", 0), self.usize_or("eval.idx_b", 1))
    }
}

/// Render the key registry as help text, one `key  (kind)  description` per line.
pub fn describe_keys() -> String {
    let mut out = String::new();
    for (key, kind, doc) in KEYS {
        let kind = match kind {
            ValueKind::Float => "float",
            ValueKind::Int => "int",
            ValueKind::Bool => "bool",
            ValueKind::Path => "path",
            ValueKind::Mapping => "optimal|majority",
        };
        let _ = writeln!(out, "  {key:24} {kind:18} {doc}");
    }
    out
}
