use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::{ConfigError, TrainConfig};
use super::trace::{EpochRecord, TrainTrace};
use crate::flow::{Dataset, TrafficClass};
use crate::nn::loss::{cross_entropy, mse, row_mse};
use crate::nn::{Activation, AdamConfig, AdamState, DenseNet, Gradients, NetError};

/// Index of the "normal" unit in A's two-way softmax.
pub const NORMAL_CLASS: usize = 0;
/// Index of the "anomaly" unit in A's two-way softmax.
pub const ANOMALY_CLASS: usize = 1;

const R_SEED_SALT: u64 = 0x5245_434f_4e53_5452;
const A_SEED_SALT: u64 = 0x4445_5445_4354_4f52;
const SHUFFLE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("training set is empty")]
    EmptyDataset,
    #[error("training row {row} is tagged as an anomaly; training uses normal flows only")]
    AnomalyInTraining { row: usize },
    #[error("latent_dim {latent} must be smaller than the input width {dim}")]
    NoCompression { latent: usize, dim: usize },
    #[error("input width {found} does not match the networks ({expected})")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite loss in epoch {epoch}")]
    NonFiniteLoss { epoch: usize, trace: TrainTrace },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// `d → hidden → latent → hidden → d`, sigmoid throughout.
pub fn build_reconstructor(dim: usize, cfg: &TrainConfig) -> Result<DenseNet<f32>, TrainError> {
    if cfg.latent_dim >= dim {
        return Err(TrainError::NoCompression { latent: cfg.latent_dim, dim });
    }
    let h = cfg.hidden_dim;
    Ok(DenseNet::init(
        &[dim, h, cfg.latent_dim, h, dim],
        &[Activation::Sigmoid; 4],
        cfg.seed ^ R_SEED_SALT,
    )?)
}

/// `d → hidden → hidden/2 → 2` with a softmax head; unit `NORMAL_CLASS` is A(X).
pub fn build_detector(dim: usize, cfg: &TrainConfig) -> Result<DenseNet<f32>, TrainError> {
    let h = cfg.hidden_dim;
    Ok(DenseNet::init(
        &[dim, h, h / 2, 2],
        &[Activation::Sigmoid, Activation::Sigmoid, Activation::Softmax],
        cfg.seed ^ A_SEED_SALT,
    )?)
}

/// Latching freeze rule: once any recorded epoch reached `r_stop_mse` (or R was already
/// frozen), R stays frozen. A zero floor never freezes.
pub fn should_freeze_r(trace: &TrainTrace, cfg: &TrainConfig) -> bool {
    trace
        .records
        .iter()
        .any(|r| r.r_frozen || (cfg.r_stop_mse > 0.0 && r.recon_mse <= cfg.r_stop_mse))
}

fn one_hot_rows(batch: usize, class: usize) -> Vec<f32> {
    let mut t = vec![0.0; batch * 2];
    for row in t.chunks_exact_mut(2) {
        row[class] = 1.0;
    }
    t
}

fn add_into(acc: &mut Gradients<f32>, other: &Gradients<f32>) {
    for (a, b) in acc.layers.iter_mut().zip(&other.layers) {
        for (x, y) in a.weights.iter_mut().zip(&b.weights) {
            *x += y;
        }
        for (x, y) in a.biases.iter_mut().zip(&b.biases) {
            *x += y;
        }
    }
}

/// Final networks and the per-epoch history of a run.
#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub reconstructor: DenseNet<f32>,
    pub detector: DenseNet<f32>,
    pub trace: TrainTrace,
}

/// Joint R + A training state.
#[derive(Debug, Clone)]
pub struct AdversarialTrainer {
    cfg: TrainConfig,
    dim: usize,
    reconstructor: DenseNet<f32>,
    detector: DenseNet<f32>,
    r_opt: AdamState<f32>,
    a_opt: AdamState<f32>,
    trace: TrainTrace,
}

impl AdversarialTrainer {
    pub fn new(dim: usize, cfg: TrainConfig) -> Result<Self, TrainError> {
        cfg.validate()?;
        let reconstructor = build_reconstructor(dim, &cfg)?;
        let detector = build_detector(dim, &cfg)?;
        Self::from_nets(reconstructor, detector, cfg)
    }

    pub fn from_nets(
        reconstructor: DenseNet<f32>,
        detector: DenseNet<f32>,
        cfg: TrainConfig,
    ) -> Result<Self, TrainError> {
        cfg.validate()?;
        let dim = detector.input_dim();
        if reconstructor.input_dim() != dim || reconstructor.output_dim() != dim {
            return Err(TrainError::DimensionMismatch {
                expected: dim,
                found: reconstructor.input_dim(),
            });
        }
        if detector.output_dim() != 2 {
            return Err(NetError::InvalidDims("detector must have two outputs".into()).into());
        }
        let adam = AdamConfig { lr: cfg.lr, ..AdamConfig::default() };
        Ok(AdversarialTrainer {
            r_opt: AdamState::new(&reconstructor, adam)?,
            a_opt: AdamState::new(&detector, adam)?,
            cfg,
            dim,
            reconstructor,
            detector,
            trace: TrainTrace::default(),
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn reconstructor(&self) -> &DenseNet<f32> {
        &self.reconstructor
    }

    pub fn detector(&self) -> &DenseNet<f32> {
        &self.detector
    }

    pub fn trace(&self) -> &TrainTrace {
        &self.trace
    }

    pub fn r_frozen(&self) -> bool {
        should_freeze_r(&self.trace, &self.cfg)
    }

    pub fn into_models(self) -> TrainedModels {
        TrainedModels {
            reconstructor: self.reconstructor,
            detector: self.detector,
            trace: self.trace,
        }
    }

    fn check_data(&self, data: &Dataset) -> Result<(), TrainError> {
        if data.is_empty() {
            return Err(TrainError::EmptyDataset);
        }
        if data.dim() != self.dim {
            return Err(TrainError::DimensionMismatch { expected: self.dim, found: data.dim() });
        }
        if let Some(row) = data.tags().iter().position(|t| *t == Some(TrafficClass::Anomaly)) {
            return Err(TrainError::AnomalyInTraining { row });
        }
        Ok(())
    }

    fn epoch_order(&self, n: usize, epoch: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ epoch.wrapping_mul(SHUFFLE_SALT));
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        order
    }

    fn gather(data: &Dataset, idx: &[usize]) -> Vec<f32> {
        let mut out = Vec::with_capacity(idx.len() * data.dim());
        for &i in idx {
            out.extend_from_slice(data.row(i));
        }
        out
    }

    /// Trains R alone to reconstruct its input (plain MSE). Returns the mean MSE of each epoch.
    pub fn pretrain_reconstructor(&mut self, data: &Dataset, epochs: usize) -> Result<Vec<f64>, TrainError> {
        self.check_data(data)?;
        let mut history = Vec::with_capacity(epochs);
        for e in 0..epochs {
            let order = self.epoch_order(data.len(), u64::MAX - e as u64);
            let mut total = 0.0;
            for idx in order.chunks(self.cfg.batch_size) {
                let x = Self::gather(data, idx);
                let acts = self.reconstructor.forward_batch(&x, idx.len())?;
                let (loss, grad) = mse(acts.output(), &x)?;
                let g = self.reconstructor.backward(&x, &acts, &grad, false)?;
                self.r_opt.step(&mut self.reconstructor, &g)?;
                total += loss * idx.len() as f64;
            }
            history.push(total / data.len() as f64);
        }
        Ok(history)
    }

    /// One pass over the shuffled training set. Per batch: A is updated first on real
    /// flows (target normal) and their reconstructions (target anomaly); then, unless
    /// frozen, R is updated to minimise `-ln A(R(X))`.
    pub fn train_epoch(&mut self, data: &Dataset) -> Result<EpochRecord, TrainError> {
        self.check_data(data)?;
        let epoch = self.trace.len() + 1;
        let frozen = self.r_frozen();
        let order = self.epoch_order(data.len(), epoch as u64);

        let (mut sum_real, mut sum_fake, mut sum_adv, mut sum_mse) = (0.0, 0.0, 0.0, 0.0);
        let mut adv_rows = 0usize;

        for idx in order.chunks(self.cfg.batch_size) {
            let n = idx.len();
            let x = Self::gather(data, idx);

            // A step
            let r_out = self.reconstructor.forward_batch(&x, n)?.layers.pop().unwrap_or_default();
            sum_mse += mse(&r_out, &x)?.0 * n as f64;
            let real = self.detector.forward_batch(&x, n)?;
            let fake = self.detector.forward_batch(&r_out, n)?;
            let (l_real, g_real) = cross_entropy(real.output(), &one_hot_rows(n, NORMAL_CLASS), n)?;
            let (l_fake, g_fake) = cross_entropy(fake.output(), &one_hot_rows(n, ANOMALY_CLASS), n)?;
            let mut g = self.detector.backward(&x, &real, &g_real, false)?;
            add_into(&mut g, &self.detector.backward(&r_out, &fake, &g_fake, false)?);
            self.a_opt.step(&mut self.detector, &g)?;
            sum_real += l_real * n as f64;
            sum_fake += l_fake * n as f64;

            if frozen {
                continue;
            }
            // R step(s)
            for _ in 0..self.cfg.r_updates_per_a_update {
                let r_acts = self.reconstructor.forward_batch(&x, n)?;
                let x_hat = r_acts.output();
                let a_acts = self.detector.forward_batch(x_hat, n)?;
                let (l_adv, g_adv) = cross_entropy(a_acts.output(), &one_hot_rows(n, NORMAL_CLASS), n)?;
                let through_a = self.detector.backward(x_hat, &a_acts, &g_adv, true)?;
                let mut d_xhat = through_a.input.unwrap_or_default();
                if self.cfg.recon_weight > 0.0 {
                    let w = self.cfg.recon_weight as f32;
                    // mse() divides by n·d; rescale to a per-row mean like the CE term
                    let (_, g_rec) = mse(x_hat, &x)?;
                    let scale = w * self.dim as f32;
                    for (d, r) in d_xhat.iter_mut().zip(&g_rec) {
                        *d += scale * r;
                    }
                }
                let g_r = self.reconstructor.backward(&x, &r_acts, &d_xhat, false)?;
                self.r_opt.step(&mut self.reconstructor, &g_r)?;
                sum_adv += l_adv * n as f64;
                adv_rows += n;
            }
        }

        let rows = data.len() as f64;
        let record = EpochRecord {
            epoch,
            a_loss_real: sum_real / rows,
            a_loss_fake: sum_fake / rows,
            r_adv_loss: if adv_rows > 0 { sum_adv / adv_rows as f64 } else { 0.0 },
            recon_mse: sum_mse / rows,
            r_frozen: frozen,
        };
        self.trace.records.push(record);
        if !record.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch, trace: self.trace.clone() });
        }
        Ok(record)
    }

    /// Optional pretraining followed by `max_epochs` adversarial epochs.
    pub fn run(mut self, data: &Dataset) -> Result<TrainedModels, TrainError> {
        self.check_data(data)?;
        if self.cfg.pretrain_epochs > 0 {
            self.pretrain_reconstructor(data, self.cfg.pretrain_epochs)?;
        }
        for _ in 0..self.cfg.max_epochs {
            let rec = self.train_epoch(data)?;
            log::debug!(
                "epoch {}: a_real={:.4} a_fake={:.4} r_adv={:.4} mse={:.5} frozen={}",
                rec.epoch,
                rec.a_loss_real,
                rec.a_loss_fake,
                rec.r_adv_loss,
                rec.recon_mse,
                rec.r_frozen
            );
        }
        Ok(self.into_models())
    }
}

/// Trains R and A on normal-only data. Deterministic for a fixed config.
pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<TrainedModels, TrainError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    AdversarialTrainer::new(data.dim(), cfg.clone())?.run(data)
}

/// End-of-training statistics over a set of flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldOutDiagnostics {
    /// Mean A(X).
    pub mean_score_real: f64,
    /// Mean A(R(X)).
    pub mean_score_recon: f64,
    /// Mean MSE(R(X), X).
    pub mean_recon_mse: f64,
}

pub fn held_out_diagnostics(
    reconstructor: &DenseNet<f32>,
    detector: &DenseNet<f32>,
    data: &Dataset,
) -> Result<HeldOutDiagnostics, NetError> {
    let (mut real, mut recon, mut err) = (0.0, 0.0, 0.0);
    for x in data.rows() {
        let x_hat = reconstructor.predict(x)?;
        real += detector.predict(x)?[NORMAL_CLASS] as f64;
        recon += detector.predict(&x_hat)?[NORMAL_CLASS] as f64;
        err += row_mse(&x_hat, x);
    }
    let n = data.len().max(1) as f64;
    Ok(HeldOutDiagnostics {
        mean_score_real: real / n,
        mean_score_recon: recon / n,
        mean_recon_mse: err / n,
    })
}
