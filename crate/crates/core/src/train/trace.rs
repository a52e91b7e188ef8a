use std::fmt::Write as _;

use sha2::{Digest, Sha256};

/// What happened during one training epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// A's cross-entropy on real flows (target: normal).
    pub a_loss_real: f64,
    /// A's cross-entropy on reconstructions (target: anomaly).
    pub a_loss_fake: f64,
    /// R's non-saturating loss `-ln A(R(X))`.
    pub r_adv_loss: f64,
    /// Mean squared reconstruction error over the epoch.
    pub recon_mse: f64,
    /// R received no updates this epoch.
    pub r_frozen: bool,
}

impl EpochRecord {
    pub fn is_finite(&self) -> bool {
        [self.a_loss_real, self.a_loss_fake, self.r_adv_loss, self.recon_mse]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.9},{:.9},{:.9},{:.9},{}",
            self.epoch,
            self.a_loss_real,
            self.a_loss_fake,
            self.r_adv_loss,
            self.recon_mse,
            self.r_frozen as u8
        )
    }
}

pub const TRACE_HEADER: &str = "epoch,a_loss_real,a_loss_fake,r_adv_loss,recon_mse,r_frozen";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub records: Vec<EpochRecord>,
}

impl TrainTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    /// Epoch (1-based) during which R was first frozen.
    pub fn freeze_epoch(&self) -> Option<usize> {
        self.records.iter().find(|r| r.r_frozen).map(|r| r.epoch)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{}", r.csv_row());
        }
        out
    }

    /// SHA-256 of the CSV form.
    pub fn digest(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        out.copy_from_slice(&Sha256::digest(self.to_csv().as_bytes()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_one_row_per_epoch() {
        let rec = |e| EpochRecord {
            epoch: e,
            a_loss_real: 0.5,
            a_loss_fake: 0.25,
            r_adv_loss: 1.0,
            recon_mse: 0.125,
            r_frozen: e > 1,
        };
        let trace = TrainTrace { records: vec![rec(1), rec(2)] };
        let csv = trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines[2], "2,0.500000000,0.250000000,1.000000000,0.125000000,1");
        assert_eq!(trace.freeze_epoch(), Some(2));
        assert_ne!(trace.digest(), TrainTrace::default().digest());
    }
}
