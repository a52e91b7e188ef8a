use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?}")]
    BadValue { key: String, value: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Training hyperparameters. Serialized as `key=value` lines in field order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Adam learning rate for both networks.
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Decision threshold: a flow is normal iff its score is strictly above it.
    pub alpha: f64,
    /// R stops training once an epoch's mean reconstruction MSE is at or below this.
    /// Zero disables the freeze.
    pub r_stop_mse: f64,
    /// R updates per A update within each batch.
    pub r_updates_per_a_update: usize,
    pub seed: u64,
    pub latent_dim: usize,
    /// Width of R's two hidden layers and A's first hidden layer; A's second is half of it.
    pub hidden_dim: usize,
    /// Weight of an optional reconstruction term added to R's adversarial loss.
    pub recon_weight: f64,
    /// Epochs of plain MSE training of R before adversarial training starts.
    pub pretrain_epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.001,
            batch_size: 128,
            max_epochs: 50,
            alpha: 0.5,
            r_stop_mse: 0.02,
            r_updates_per_a_update: 1,
            seed: 0,
            latent_dim: 32,
            hidden_dim: 64,
            recon_weight: 0.0,
            pretrain_epochs: 0,
        }
    }
}

pub const CONFIG_KEYS: [&str; 11] = [
    "lr",
    "batch_size",
    "max_epochs",
    "alpha",
    "r_stop_mse",
    "r_updates_per_a_update",
    "seed",
    "latent_dim",
    "hidden_dim",
    "recon_weight",
    "pretrain_epochs",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail(format!("lr must be positive, got {}", self.lr));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must lie in (0,1), got {}", self.alpha));
        }
        if !(self.r_stop_mse >= 0.0 && self.r_stop_mse.is_finite()) {
            return fail(format!("r_stop_mse must be >= 0, got {}", self.r_stop_mse));
        }
        if !(self.recon_weight >= 0.0 && self.recon_weight.is_finite()) {
            return fail(format!("recon_weight must be >= 0, got {}", self.recon_weight));
        }
        for (name, v) in [
            ("batch_size", self.batch_size),
            ("max_epochs", self.max_epochs),
            ("r_updates_per_a_update", self.r_updates_per_a_update),
            ("latent_dim", self.latent_dim),
        ] {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.hidden_dim < 2 {
            return fail("hidden_dim must be at least 2".into());
        }
        Ok(())
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "lr" => self.lr = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "max_epochs" => self.max_epochs = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "r_stop_mse" => self.r_stop_mse = parse(key, value)?,
            "r_updates_per_a_update" => self.r_updates_per_a_update = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "latent_dim" => self.latent_dim = parse(key, value)?,
            "hidden_dim" => self.hidden_dim = parse(key, value)?,
            "recon_weight" => self.recon_weight = parse(key, value)?,
            "pretrain_epochs" => self.pretrain_epochs = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "lr" => self.lr.to_string(),
            "batch_size" => self.batch_size.to_string(),
            "max_epochs" => self.max_epochs.to_string(),
            "alpha" => self.alpha.to_string(),
            "r_stop_mse" => self.r_stop_mse.to_string(),
            "r_updates_per_a_update" => self.r_updates_per_a_update.to_string(),
            "seed" => self.seed.to_string(),
            "latent_dim" => self.latent_dim.to_string(),
            "hidden_dim" => self.hidden_dim.to_string(),
            "recon_weight" => self.recon_weight.to_string(),
            "pretrain_epochs" => self.pretrain_epochs.to_string(),
            _ => return None,
        })
    }

    /// Applies `key=value` lines on top of `self`. Blank lines and `#` comments are ignored.
    /// Returns the keys that were set, in file order.
    pub fn apply_kv(&mut self, text: &str) -> Result<Vec<String>, ConfigError> {
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let k = k.trim();
            self.set(k, v)?;
            seen.push(k.to_string());
        }
        Ok(seen)
    }

    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = TrainConfig::default();
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let _ = writeln!(out, "{key}={}", self.get(key).expect("known key"));
        }
        out
    }
}
