//! `advids`: prepare NSL-KDD data, train the adversarial detector, then score, evaluate
//! and benchmark it.

mod cmd;
mod data;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "advids", version, about = "Adversarially trained anomaly-based intrusion detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the feature codec on normal flows and write an encoded cache.
    Prepare {
        /// Labeled NSL-KDD CSV.
        input: PathBuf,
        /// Cache path; the codec is written to `<out>.codec`.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Train the reconstructor and detector on normal flows and write a model bundle.
    Train(Box<TrainArgs>),
    /// Score a labeled file and report ACC/PR/RE/FS with Anomaly as the positive class.
    Eval {
        #[arg(short, long)]
        bundle: PathBuf,
        /// Labeled NSL-KDD CSV or a prepared cache.
        input: PathBuf,
        /// Override the bundle's decision threshold.
        #[arg(long)]
        alpha: Option<f64>,
        /// Also write the key=value report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print `<seq>,<decision>,<likelihood>` for each flow.
    Score {
        #[arg(short, long)]
        bundle: PathBuf,
        /// Flow file; standard input when omitted.
        input: Option<PathBuf>,
        /// Emit each verdict as soon as its line is read.
        #[arg(long)]
        stream: bool,
        #[arg(long)]
        alpha: Option<f64>,
        /// Append R's reconstruction MSE per flow. Diagnostic only; verdicts never use it.
        #[arg(long)]
        recon: bool,
    },
    /// Time encode + score + classify per flow.
    Bench {
        #[arg(short, long)]
        bundle: PathBuf,
        /// At least 1000 flows.
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        /// Also measure aggregate throughput with this many worker threads.
        #[arg(long)]
        threads: Option<usize>,
        /// Also time the path including CSV parsing.
        #[arg(long)]
        end_to_end: bool,
    },
    /// Describe a bundle, cache, codec or model file.
    Inspect { path: PathBuf },
}

#[derive(Args)]
pub(crate) struct TrainArgs {
    /// Normal-only training data: labeled CSV (anomalies are dropped) or a prepared cache.
    #[arg(short, long)]
    data: PathBuf,
    /// Bundle path; the trace is written to `<out>.trace.csv`.
    #[arg(short, long)]
    out: PathBuf,
    /// key=value config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Omit the reconstructor from the bundle.
    #[arg(long)]
    no_reconstructor: bool,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    batch_size: Option<String>,
    #[arg(long)]
    max_epochs: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    r_stop_mse: Option<String>,
    #[arg(long)]
    r_updates_per_a_update: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    latent_dim: Option<String>,
    #[arg(long)]
    hidden_dim: Option<String>,
    #[arg(long)]
    recon_weight: Option<String>,
    #[arg(long)]
    pretrain_epochs: Option<String>,
}

impl TrainArgs {
    pub(crate) fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("lr", &self.lr),
            ("batch_size", &self.batch_size),
            ("max_epochs", &self.max_epochs),
            ("alpha", &self.alpha),
            ("r_stop_mse", &self.r_stop_mse),
            ("r_updates_per_a_update", &self.r_updates_per_a_update),
            ("seed", &self.seed),
            ("latent_dim", &self.latent_dim),
            ("hidden_dim", &self.hidden_dim),
            ("recon_weight", &self.recon_weight),
            ("pretrain_epochs", &self.pretrain_epochs),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prepare { input, out } => cmd::prepare(&input, &out),
        Command::Train(args) => cmd::train(&args),
        Command::Eval { bundle, input, alpha, report } => cmd::eval(&bundle, &input, alpha, report.as_deref()),
        Command::Score { bundle, input, stream, alpha, recon } => {
            cmd::score(&bundle, input.as_deref(), stream, alpha, recon)
        }
        Command::Bench { bundle, input, repetitions, threads, end_to_end } => {
            cmd::bench(&bundle, &input, repetitions, threads, end_to_end)
        }
        Command::Inspect { path } => cmd::inspect(&path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
