//! Detection metrics (Anomaly = positive class), reports, and scoring benchmarks.

mod bench;
mod metrics;
mod report;

use thiserror::Error;

pub use bench::{
    bench_end_to_end, bench_latency, bench_throughput, read_lines, LatencyReport, ThroughputReport,
    MIN_BENCH_FLOWS,
};
pub use metrics::{metrics, reconstruct_confusion, tally, Confusion, MetricWarning, Metrics, Reconstruction};
pub use report::EvalReport;

use crate::detect::DetectError;
use crate::flow::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{predictions} predictions but {truth} ground-truth labels")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("flow {index} has no ground truth")]
    MissingGroundTruth { index: usize },
    #[error("no flows were evaluated")]
    EmptyConfusion,
    #[error("infeasible input: {0}")]
    Infeasible(String),
    #[error("benchmark needs at least {needed} flows, got {found}")]
    TooFewFlows { found: usize, needed: usize },
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
