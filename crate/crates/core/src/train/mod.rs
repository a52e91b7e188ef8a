//! Joint adversarial training of the reconstructor R and the detector A.

mod adversarial;
mod config;
mod trace;

pub use adversarial::{
    build_detector, build_reconstructor, held_out_diagnostics, should_freeze_r, train,
    AdversarialTrainer, HeldOutDiagnostics, TrainError, TrainedModels, ANOMALY_CLASS, NORMAL_CLASS,
};
pub use config::{ConfigError, TrainConfig, CONFIG_KEYS};
pub use trace::{EpochRecord, TrainTrace, TRACE_HEADER};
