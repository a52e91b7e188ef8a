//! Inference: A(X) as a likelihood score and the strict-threshold decision rule.

use std::fmt;
use std::io::BufRead;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::flow::{FeatureCodec, FlowReader, RawFlow, ReadError};
use crate::nn::{softmax_f64, DenseNet, NetError};
use crate::train::{ANOMALY_CLASS, NORMAL_CLASS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    BadThreshold(f64),
    #[error("likelihood must lie in [0,1], got {0}")]
    BadLikelihood(f64),
    #[error("detector must have two softmax outputs, found {0}")]
    NotADetector(usize),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// A(X): probability that a flow follows the normal-traffic distribution.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AnomalyScore {
    likelihood: f64,
}

impl AnomalyScore {
    pub fn new(likelihood: f64) -> Result<Self, DetectError> {
        if (0.0..=1.0).contains(&likelihood) {
            Ok(AnomalyScore { likelihood })
        } else {
            Err(DetectError::BadLikelihood(likelihood))
        }
    }

    pub fn likelihood(self) -> f64 {
        self.likelihood
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Normal,
    Anomaly,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Normal => "normal",
            Decision::Anomaly => "anomaly",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub decision: Decision,
    pub score: AnomalyScore,
    pub threshold_used: f64,
}

pub fn check_threshold(alpha: f64) -> Result<f64, DetectError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(DetectError::BadThreshold(alpha))
    }
}

/// Normal iff the likelihood is strictly greater than `alpha`; ties go to Anomaly.
pub fn classify(score: AnomalyScore, alpha: f64) -> Result<Verdict, DetectError> {
    let alpha = check_threshold(alpha)?;
    let decision = if score.likelihood > alpha {
        Decision::Normal
    } else {
        Decision::Anomaly
    };
    Ok(Verdict { decision, score, threshold_used: alpha })
}

/// Both softmax probabilities `(normal, anomaly)` computed in f64 from A's logits.
pub fn class_probabilities(detector: &DenseNet<f32>, x: &[f32]) -> Result<(f64, f64), DetectError> {
    if detector.output_dim() != 2 {
        return Err(DetectError::NotADetector(detector.output_dim()));
    }
    let p = softmax_f64(&detector.logits(x)?);
    Ok((p[NORMAL_CLASS], p[ANOMALY_CLASS]))
}

pub fn score(detector: &DenseNet<f32>, x: &[f32]) -> Result<AnomalyScore, DetectError> {
    let (normal, _) = class_probabilities(detector, x)?;
    AnomalyScore::new(normal)
}

/// Scores `rows.len() / input_dim` row-major inputs; identical to calling `score` per row.
pub fn score_batch(detector: &DenseNet<f32>, rows: &[f32]) -> Result<Vec<AnomalyScore>, DetectError> {
    let d = detector.input_dim();
    if !rows.len().is_multiple_of(d) {
        return Err(NetError::DimensionMismatch {
            expected: (rows.len() / d + 1) * d,
            found: rows.len(),
        }
        .into());
    }
    rows.chunks_exact(d).map(|x| score(detector, x)).collect()
}

/// A trained detector paired with the codec its input was fitted with.
#[derive(Debug, Clone)]
pub struct Detector {
    net: DenseNet<f32>,
    codec: FeatureCodec,
    alpha: f64,
}

impl Detector {
    pub fn new(net: DenseNet<f32>, codec: FeatureCodec, alpha: f64) -> Result<Self, DetectError> {
        check_threshold(alpha)?;
        if net.output_dim() != 2 {
            return Err(DetectError::NotADetector(net.output_dim()));
        }
        if net.input_dim() != codec.output_dim() {
            return Err(NetError::DimensionMismatch {
                expected: net.input_dim(),
                found: codec.output_dim(),
            }
            .into());
        }
        Ok(Detector { net, codec, alpha })
    }

    pub fn net(&self) -> &DenseNet<f32> {
        &self.net
    }

    pub fn codec(&self) -> &FeatureCodec {
        &self.codec
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, DetectError> {
        self.alpha = check_threshold(alpha)?;
        Ok(self)
    }

    /// Encode, score and classify one flow, reusing `buf` for the encoded vector.
    pub fn verdict_with(&self, flow: &RawFlow, buf: &mut Vec<f32>) -> Result<Verdict, DetectError> {
        buf.resize(self.codec.output_dim(), 0.0);
        self.codec.encode_into(flow, buf);
        classify(score(&self.net, buf)?, self.alpha)
    }

    pub fn verdict(&self, flow: &RawFlow) -> Result<Verdict, DetectError> {
        self.verdict_with(flow, &mut Vec::new())
    }

    /// Lazily classifies records read from `input`, in input order.
    pub fn classify_stream<R: BufRead>(&self, input: R) -> VerdictStream<'_, R> {
        VerdictStream {
            detector: self,
            reader: FlowReader::new(input),
            buf: Vec::new(),
        }
    }
}

/// One record of a verdict stream. `seq` is the input line number.
#[derive(Debug)]
pub struct StreamItem {
    pub seq: usize,
    pub outcome: Result<Verdict, ReadError>,
    /// Encode + score + classify time; zero for rejected lines.
    pub latency: Duration,
}

pub struct VerdictStream<'a, R> {
    detector: &'a Detector,
    reader: FlowReader<R>,
    buf: Vec<f32>,
}

impl<R: BufRead> Iterator for VerdictStream<'_, R> {
    type Item = StreamItem;

    fn next(&mut self) -> Option<StreamItem> {
        let (seq, parsed) = self.reader.next()?;
        Some(match parsed {
            Ok(flow) => {
                let start = Instant::now();
                let verdict = self
                    .detector
                    .verdict_with(&flow, &mut self.buf)
                    .expect("detector and codec dimensions were checked at construction");
                StreamItem { seq, outcome: Ok(verdict), latency: start.elapsed() }
            }
            Err(e) => StreamItem { seq, outcome: Err(e), latency: Duration::ZERO },
        })
    }
}

/// `<seq>,<decision>,<likelihood>`
pub fn format_verdict(seq: usize, v: &Verdict) -> String {
    format!("{seq},{},{:.6}", v.decision, v.score.likelihood())
}
