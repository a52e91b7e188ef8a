use std::fmt;

use super::EvalError;
use crate::detect::Decision;
use crate::flow::TrafficClass;

/// Binary confusion counts with Anomaly as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// The same counts with Normal treated as the positive class.
    pub fn normal_positive(&self) -> Confusion {
        Confusion {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }

    pub fn record(&mut self, predicted: Decision, truth: TrafficClass) {
        match (predicted, truth) {
            (Decision::Anomaly, TrafficClass::Anomaly) => self.tp += 1,
            (Decision::Anomaly, TrafficClass::Normal) => self.fp += 1,
            (Decision::Normal, TrafficClass::Normal) => self.tn += 1,
            (Decision::Normal, TrafficClass::Anomaly) => self.fn_ += 1,
        }
    }
}

/// Counts predictions against ground truth.
pub fn tally(predicted: &[Decision], truth: &[Option<TrafficClass>]) -> Result<Confusion, EvalError> {
    if predicted.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predicted.len(),
            truth: truth.len(),
        });
    }
    let mut c = Confusion::default();
    for (i, (&p, t)) in predicted.iter().zip(truth).enumerate() {
        let t = t.ok_or(EvalError::MissingGroundTruth { index: i })?;
        c.record(p, t);
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricWarning {
    /// No positive predictions; precision reported as 0.
    PrecisionUndefined,
    /// No positive ground truth; recall reported as 0.
    RecallUndefined,
    /// Precision and recall both 0; F-score reported as 0.
    FScoreUndefined,
}

impl fmt::Display for MetricWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricWarning::PrecisionUndefined => "precision undefined (no anomaly predictions); reported as 0",
            MetricWarning::RecallUndefined => "recall undefined (no anomalies in ground truth); reported as 0",
            MetricWarning::FScoreUndefined => "f-score undefined (precision + recall = 0); reported as 0",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub acc: f64,
    pub pr: f64,
    pub re: f64,
    pub fs: f64,
    pub warnings: Vec<MetricWarning>,
}

/// ACC, PR, RE and FS (harmonic mean of PR and RE). Zero denominators give 0 plus a warning.
pub fn metrics(c: &Confusion) -> Result<Metrics, EvalError> {
    let total = c.total();
    if total == 0 {
        return Err(EvalError::EmptyConfusion);
    }
    let mut warnings = Vec::new();
    let ratio = |num: u64, den: u64, w: MetricWarning, warnings: &mut Vec<MetricWarning>| {
        if den == 0 {
            warnings.push(w);
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let acc = (c.tp + c.tn) as f64 / total as f64;
    let pr = ratio(c.tp, c.tp + c.fp, MetricWarning::PrecisionUndefined, &mut warnings);
    let re = ratio(c.tp, c.tp + c.fn_, MetricWarning::RecallUndefined, &mut warnings);
    let fs = if pr + re > 0.0 {
        2.0 * pr * re / (pr + re)
    } else {
        warnings.push(MetricWarning::FScoreUndefined);
        0.0
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Metrics { acc, pr, re, fs, warnings })
}

/// Counts solved from reported rates and class totals.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub confusion: Confusion,
    /// Metrics recomputed from the rounded counts.
    pub recomputed: Metrics,
    /// `recomputed.acc - acc`; the check the solve did not use.
    pub residual: f64,
}

/// Solves for the confusion matrix behind `(acc, pr, re)` given the class totals.
///
/// `tp = re·n_anomaly`, `fp = tp·(1-pr)/pr`; ACC is then the independent check. When
/// `tp = 0` precision carries no information and ACC is used to place the false positives.
pub fn reconstruct_confusion(
    acc: f64,
    pr: f64,
    re: f64,
    n_normal: u64,
    n_anomaly: u64,
) -> Result<Reconstruction, EvalError> {
    for (name, v) in [("acc", acc), ("pr", pr), ("re", re)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(EvalError::Infeasible(format!("{name} = {v} is outside [0,1]")));
        }
    }
    if n_normal + n_anomaly == 0 {
        return Err(EvalError::EmptyConfusion);
    }
    let tp = (re * n_anomaly as f64).round();
    let fn_ = n_anomaly as f64 - tp;
    let fp = if tp > 0.0 {
        if pr == 0.0 {
            return Err(EvalError::Infeasible("pr = 0 with true positives".into()));
        }
        (tp * (1.0 - pr) / pr).round()
    } else {
        let tn = (acc * (n_normal + n_anomaly) as f64).round() - tp;
        n_normal as f64 - tn
    };
    let tn = n_normal as f64 - fp;
    if fp < 0.0 || tn < 0.0 || fn_ < 0.0 {
        return Err(EvalError::Infeasible(format!(
            "negative counts: tp={tp} fp={fp} tn={tn} fn={fn_}"
        )));
    }
    let confusion = Confusion {
        tp: tp as u64,
        fp: fp as u64,
        tn: tn as u64,
        fn_: fn_ as u64,
    };
    let recomputed = metrics(&confusion)?;
    Ok(Reconstruction {
        residual: recomputed.acc - acc,
        confusion,
        recomputed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdicts(c: &Confusion) -> (Vec<Decision>, Vec<Option<TrafficClass>>) {
        let mut p = Vec::new();
        let mut t = Vec::new();
        let mut add = |n: u64, d, c| {
            for _ in 0..n {
                p.push(d);
                t.push(Some(c));
            }
        };
        add(c.tp, Decision::Anomaly, TrafficClass::Anomaly);
        add(c.fp, Decision::Anomaly, TrafficClass::Normal);
        add(c.tn, Decision::Normal, TrafficClass::Normal);
        add(c.fn_, Decision::Normal, TrafficClass::Anomaly);
        (p, t)
    }

    #[test]
    fn all_correct_anomalies() {
        let c = tally(&[Decision::Anomaly; 10], &[Some(TrafficClass::Anomaly); 10]).unwrap();
        assert_eq!(c, Confusion { tp: 10, ..Default::default() });
    }

    #[test]
    fn inverted_predictions_swap_cells() {
        let want = Confusion { tp: 8, fp: 2, tn: 9, fn_: 1 };
        let (p, t) = verdicts(&want);
        assert_eq!(tally(&p, &t).unwrap(), want);
        let flipped: Vec<Decision> = p
            .iter()
            .map(|d| match d {
                Decision::Normal => Decision::Anomaly,
                Decision::Anomaly => Decision::Normal,
            })
            .collect();
        let inv = tally(&flipped, &t).unwrap();
        assert_eq!(inv, Confusion { tp: want.fn_, fn_: want.tp, tn: want.fp, fp: want.tn });
    }

    #[test]
    fn tally_errors() {
        assert!(matches!(
            tally(&[Decision::Normal], &[]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert!(matches!(
            tally(&[Decision::Normal], &[None]),
            Err(EvalError::MissingGroundTruth { index: 0 })
        ));
    }

    #[test]
    fn hand_case() {
        let m = metrics(&Confusion { tp: 8, fp: 2, tn: 9, fn_: 1 }).unwrap();
        assert!((m.acc - 0.85).abs() < 1e-12);
        assert!((m.pr - 0.8).abs() < 1e-12);
        assert!((m.re - 8.0 / 9.0).abs() < 1e-12);
        // 2·0.8·(8/9) / (0.8 + 8/9) = 16/19
        assert!((m.fs - 16.0 / 19.0).abs() < 1e-12);
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn degenerate_denominators() {
        let m = metrics(&Confusion { tp: 0, fp: 0, tn: 5, fn_: 3 }).unwrap();
        assert_eq!(m.pr, 0.0);
        assert!(m.warnings.contains(&MetricWarning::PrecisionUndefined));
        assert!(m.warnings.contains(&MetricWarning::FScoreUndefined));
        let no_pos = metrics(&Confusion { tp: 0, fp: 2, tn: 5, fn_: 0 }).unwrap();
        assert!(no_pos.warnings.contains(&MetricWarning::RecallUndefined));
        assert_eq!(metrics(&Confusion::default()).unwrap_err(), EvalError::EmptyConfusion);
    }

    #[test]
    fn reference_fscore_is_consistent() {
        let (pr, re): (f64, f64) = (0.8994, 0.9556);
        let fs = 2.0 * pr * re / (pr + re);
        assert!((fs - 0.9267).abs() < 1e-4);
    }

    #[test]
    fn reconstruction_edge_cases() {
        let perfect = reconstruct_confusion(1.0, 1.0, 1.0, 9711, 12833).unwrap();
        assert_eq!(perfect.confusion, Confusion { tp: 12833, fp: 0, tn: 9711, fn_: 0 });
        let zero_re = reconstruct_confusion(9711.0 / 22544.0, 0.0, 0.0, 9711, 12833).unwrap();
        assert_eq!(zero_re.confusion.tp, 0);
        assert_eq!(zero_re.confusion.tn, 9711);
        assert!(matches!(
            reconstruct_confusion(0.5, 0.01, 1.0, 10, 100),
            Err(EvalError::Infeasible(_))
        ));
        assert!(reconstruct_confusion(1.5, 0.5, 0.5, 10, 10).is_err());
    }

    #[test]
    fn normal_positive_relabeling() {
        let c = Confusion { tp: 8, fp: 2, tn: 9, fn_: 1 };
        let a = metrics(&c).unwrap();
        let b = metrics(&c.normal_positive()).unwrap();
        assert_eq!(a.acc, b.acc);
        assert_ne!(a.pr, b.pr);
        assert_ne!(a.re, b.re);
        assert_ne!(a.fs, b.fs);
    }
}
