use std::fmt;
use std::io;
use std::path::Path;

use advids_core::bundle::BundleError;
use advids_core::detect::DetectError;
use advids_core::eval::EvalError;
use advids_core::train::{ConfigError, TrainError};

/// A failure reported as a single `error[CODE]: message` line.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        let code = if err.kind() == io::ErrorKind::NotFound { "E_NOT_FOUND" } else { "E_IO" };
        CliError::new(code, format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self.code {
            "E_CONFIG" => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep it on one line whatever the source error contained
        let msg = self.message.replace(['\n', '\r'], " ");
        write!(f, "error[{}]: {msg}", self.code)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::new("E_CONFIG", e.to_string())
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(c) => c.into(),
            TrainError::DimensionMismatch { .. } => CliError::new("E_DIM", e.to_string()),
            other => CliError::new("E_TRAIN", other.to_string()),
        }
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        match e {
            BundleError::Io(io) if io.kind() == io::ErrorKind::NotFound => CliError::new("E_NOT_FOUND", io.to_string()),
            other => CliError::new("E_BUNDLE", other.to_string()),
        }
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::BadThreshold(_) => CliError::new("E_CONFIG", e.to_string()),
            other => CliError::new("E_DETECT", other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::TooFewFlows { .. } => CliError::new("E_TOO_FEW_FLOWS", e.to_string()),
            EvalError::Detect(d) => d.into(),
            other => CliError::new("E_EVAL", other.to_string()),
        }
    }
}
