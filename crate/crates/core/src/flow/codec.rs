use std::collections::HashMap;
use std::io::{self, Read, Write};

use thiserror::Error;

use super::record::{RawFlow, TrafficClass};
use super::schema::{CATEGORICAL_COLUMNS, FEATURE_NAMES, NUMERIC_COLUMNS, NUMERIC_COUNT};
use crate::wire;

pub const CODEC_MAGIC: &[u8; 4] = b"ADVK";
pub const CODEC_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("cannot fit a codec on zero flows")]
    EmptyInput,
    #[error("invalid range for {column}: min {min} > max {max}")]
    BadRange { column: &'static str, min: f64, max: f64 },
    #[error("duplicate token {token:?} in {column} vocabulary")]
    DuplicateToken { column: &'static str, token: String },
}

/// Fitted encoding state: one vocabulary per token column and a min/max per numeric column.
///
/// Vector layout is the 38 scaled numeric features in file order, followed by the
/// one-hot blocks for `protocol_type`, `service` and `flag`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCodec {
    vocab: [Vec<String>; 3],
    ranges: [(f64, f64); NUMERIC_COUNT],
    index: [HashMap<String, usize>; 3],
}

/// An encoded flow: the network input `X` (or a reconstruction of it).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowVector {
    pub values: Vec<f32>,
    pub ground_truth: Option<TrafficClass>,
}

impl FlowVector {
    pub fn new(values: Vec<f32>) -> Self {
        FlowVector { values, ground_truth: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn build_index(vocab: &[String], column: &'static str) -> Result<HashMap<String, usize>, CodecError> {
    let mut index = HashMap::with_capacity(vocab.len());
    for (i, tok) in vocab.iter().enumerate() {
        if index.insert(tok.clone(), i).is_some() {
            return Err(CodecError::DuplicateToken { column, token: tok.clone() });
        }
    }
    Ok(index)
}

impl FeatureCodec {
    /// Learns vocabularies (first-seen order) and exact numeric ranges from the training flows.
    pub fn fit<'a, I>(flows: I) -> Result<Self, CodecError>
    where
        I: IntoIterator<Item = &'a RawFlow>,
    {
        let mut vocab: [Vec<String>; 3] = Default::default();
        let mut index: [HashMap<String, usize>; 3] = Default::default();
        let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); NUMERIC_COUNT];
        let mut seen = 0usize;

        for flow in flows {
            seen += 1;
            for (k, tok) in flow.tokens.iter().enumerate() {
                if !index[k].contains_key(tok) {
                    index[k].insert(tok.clone(), vocab[k].len());
                    vocab[k].push(tok.clone());
                }
            }
            for (range, &v) in ranges.iter_mut().zip(flow.numeric.iter()) {
                range.0 = range.0.min(v);
                range.1 = range.1.max(v);
            }
        }
        if seen == 0 {
            return Err(CodecError::EmptyInput);
        }
        Ok(FeatureCodec { vocab, ranges, index })
    }

    /// Rebuilds a codec from stored parts, checking its invariants.
    pub fn from_parts(
        vocab: [Vec<String>; 3],
        ranges: [(f64, f64); NUMERIC_COUNT],
    ) -> Result<Self, CodecError> {
        for (k, &(min, max)) in ranges.iter().enumerate() {
            if min.is_nan() || max.is_nan() || min > max {
                return Err(CodecError::BadRange {
                    column: FEATURE_NAMES[NUMERIC_COLUMNS[k]],
                    min,
                    max,
                });
            }
        }
        let index = [
            build_index(&vocab[0], FEATURE_NAMES[CATEGORICAL_COLUMNS[0]])?,
            build_index(&vocab[1], FEATURE_NAMES[CATEGORICAL_COLUMNS[1]])?,
            build_index(&vocab[2], FEATURE_NAMES[CATEGORICAL_COLUMNS[2]])?,
        ];
        Ok(FeatureCodec { vocab, ranges, index })
    }

    pub fn vocab(&self, block: usize) -> &[String] {
        &self.vocab[block]
    }

    pub fn vocabularies(&self) -> &[Vec<String>; 3] {
        &self.vocab
    }

    pub fn ranges(&self) -> &[(f64, f64); NUMERIC_COUNT] {
        &self.ranges
    }

    pub fn output_dim(&self) -> usize {
        NUMERIC_COUNT + self.vocab.iter().map(Vec::len).sum::<usize>()
    }

    /// Encodes into a caller-provided slice of length `output_dim`.
    pub fn encode_into(&self, flow: &RawFlow, out: &mut [f32]) {
        debug_assert_eq!(out.len(), self.output_dim());
        for ((slot, &v), &(min, max)) in out.iter_mut().zip(&flow.numeric).zip(&self.ranges) {
            *slot = if max > min {
                ((v - min) / (max - min)).clamp(0.0, 1.0) as f32
            } else {
                0.0
            };
        }
        let mut offset = NUMERIC_COUNT;
        for (k, tok) in flow.tokens.iter().enumerate() {
            let width = self.vocab[k].len();
            let block = &mut out[offset..offset + width];
            block.fill(0.0);
            if let Some(&i) = self.index[k].get(tok) {
                block[i] = 1.0;
            }
            offset += width;
        }
    }

    /// Numeric features are min-max scaled and clamped to [0,1]; token columns are one-hot,
    /// with unseen tokens leaving their block all zero.
    pub fn encode(&self, flow: &RawFlow) -> FlowVector {
        let mut values = vec![0.0; self.output_dim()];
        self.encode_into(flow, &mut values);
        FlowVector {
            values,
            ground_truth: Some(flow.class()),
        }
    }

    /// Standalone codec file: magic, version, then the codec section.
    pub fn save<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(CODEC_MAGIC)?;
        wire::put_u32(w, CODEC_VERSION)?;
        self.write_to(w)
    }

    pub fn load<R: Read>(r: &mut R) -> io::Result<Self> {
        wire::expect_magic(r, CODEC_MAGIC)?;
        let version = wire::get_u32(r)?;
        if version != CODEC_VERSION {
            return Err(wire::invalid(format!("unsupported codec version {version}")));
        }
        Self::read_from(r)
    }

    pub(crate) fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        wire::put_u32(w, self.vocab.len() as u32)?;
        for (k, vocab) in self.vocab.iter().enumerate() {
            wire::put_u32(w, CATEGORICAL_COLUMNS[k] as u32)?;
            wire::put_u32(w, vocab.len() as u32)?;
            for tok in vocab {
                wire::put_str(w, tok)?;
            }
        }
        wire::put_u32(w, NUMERIC_COUNT as u32)?;
        for (k, &(min, max)) in self.ranges.iter().enumerate() {
            wire::put_u32(w, NUMERIC_COLUMNS[k] as u32)?;
            wire::put_f64(w, min)?;
            wire::put_f64(w, max)?;
        }
        Ok(())
    }

    pub(crate) fn read_from<R: Read>(r: &mut R) -> io::Result<Self> {
        if wire::get_u32(r)? as usize != CATEGORICAL_COLUMNS.len() {
            return Err(wire::invalid("codec: unexpected number of token columns"));
        }
        let mut vocab: [Vec<String>; 3] = Default::default();
        for (k, slot) in vocab.iter_mut().enumerate() {
            if wire::get_u32(r)? as usize != CATEGORICAL_COLUMNS[k] {
                return Err(wire::invalid("codec: token column order mismatch"));
            }
            let n = wire::get_u32(r)? as usize;
            if n > 1 << 20 {
                return Err(wire::invalid("codec: vocabulary too large"));
            }
            for _ in 0..n {
                slot.push(wire::get_str(r, 4096)?);
            }
        }
        if wire::get_u32(r)? as usize != NUMERIC_COUNT {
            return Err(wire::invalid("codec: unexpected number of numeric columns"));
        }
        let mut ranges = [(0.0, 0.0); NUMERIC_COUNT];
        for (k, range) in ranges.iter_mut().enumerate() {
            if wire::get_u32(r)? as usize != NUMERIC_COLUMNS[k] {
                return Err(wire::invalid("codec: numeric column order mismatch"));
            }
            *range = (wire::get_f64(r)?, wire::get_f64(r)?);
        }
        FeatureCodec::from_parts(vocab, ranges).map_err(|e| wire::invalid(e.to_string()))
    }
}

/// Result of separating a labeled training file into the normal-only training set and the rest.
#[derive(Debug, Default)]
pub struct NormalSplit {
    pub train_normals: Vec<RawFlow>,
    pub held_out: Vec<RawFlow>,
}

impl NormalSplit {
    /// True when the input had no normal flows, leaving nothing to train on.
    pub fn has_no_normals(&self) -> bool {
        self.train_normals.is_empty()
    }
}

/// Keeps only `normal`-labeled flows for training; everything else goes to `held_out`.
pub fn split_normal_only(flows: Vec<RawFlow>) -> NormalSplit {
    let (train_normals, held_out): (Vec<_>, Vec<_>) = flows.into_iter().partition(RawFlow::is_normal);
    let split = NormalSplit { train_normals, held_out };
    if split.has_no_normals() {
        log::warn!("no normal flows in input; training set is empty");
    }
    split
}
