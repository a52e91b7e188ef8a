use std::io::{self, Read, Write};

use super::codec::{FeatureCodec, FlowVector};
use super::record::{RawFlow, TrafficClass};
use crate::wire;

pub const CACHE_MAGIC: &[u8; 4] = b"ADVC";
pub const CACHE_VERSION: u32 = 1;

const TAG_NORMAL: u8 = 0;
const TAG_ANOMALY: u8 = 1;
const TAG_UNKNOWN: u8 = 0xff;

/// A row-major matrix of encoded flows with an optional ground-truth tag per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f32>,
    tags: Vec<Option<TrafficClass>>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Dataset { dim, values: Vec::new(), tags: Vec::new() }
    }

    /// Panics if `values.len()` is not `dim * tags.len()`.
    pub fn from_parts(dim: usize, values: Vec<f32>, tags: Vec<Option<TrafficClass>>) -> Self {
        assert_eq!(values.len(), dim * tags.len(), "dataset shape mismatch");
        Dataset { dim, values, tags }
    }

    pub fn encode(codec: &FeatureCodec, flows: &[RawFlow]) -> Self {
        let dim = codec.output_dim();
        let mut values = vec![0.0; dim * flows.len()];
        for (row, flow) in values.chunks_exact_mut(dim).zip(flows) {
            codec.encode_into(flow, row);
        }
        let tags = flows.iter().map(|f| Some(f.class())).collect();
        Dataset { dim, values, tags }
    }

    pub fn push(&mut self, row: &[f32], tag: Option<TrafficClass>) {
        assert_eq!(row.len(), self.dim, "row length mismatch");
        self.values.extend_from_slice(row);
        self.tags.push(tag);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn tag(&self, i: usize) -> Option<TrafficClass> {
        self.tags[i]
    }

    pub fn tags(&self) -> &[Option<TrafficClass>] {
        &self.tags
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.values.chunks_exact(self.dim.max(1)).take(self.len())
    }

    pub fn vector(&self, i: usize) -> FlowVector {
        FlowVector {
            values: self.row(i).to_vec(),
            ground_truth: self.tags[i],
        }
    }

    /// Rows whose tag equals `class`.
    pub fn filter_class(&self, class: TrafficClass) -> Dataset {
        let mut out = Dataset::new(self.dim);
        for i in 0..self.len() {
            if self.tags[i] == Some(class) {
                out.push(self.row(i), self.tags[i]);
            }
        }
        out
    }

    /// Writes the encoded-dataset cache: magic, version, `d`, row count, all rows as
    /// little-endian f32 in row-major order, then one tag byte per row.
    pub fn write_cache<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(CACHE_MAGIC)?;
        wire::put_u32(w, CACHE_VERSION)?;
        wire::put_u32(w, self.dim as u32)?;
        wire::put_u64(w, self.len() as u64)?;
        wire::put_f32s(w, &self.values)?;
        let tags: Vec<u8> = self
            .tags
            .iter()
            .map(|t| match t {
                Some(TrafficClass::Normal) => TAG_NORMAL,
                Some(TrafficClass::Anomaly) => TAG_ANOMALY,
                None => TAG_UNKNOWN,
            })
            .collect();
        w.write_all(&tags)
    }

    pub fn read_cache<R: Read>(r: &mut R) -> io::Result<Self> {
        wire::expect_magic(r, CACHE_MAGIC)?;
        let version = wire::get_u32(r)?;
        if version != CACHE_VERSION {
            return Err(wire::invalid(format!("unsupported cache version {version}")));
        }
        let dim = wire::get_u32(r)? as usize;
        let rows = wire::get_u64(r)? as usize;
        let count = dim
            .checked_mul(rows)
            .filter(|&n| n <= 1 << 32)
            .ok_or_else(|| wire::invalid("cache dimensions too large"))?;
        let values = wire::get_f32s(r, count)?;
        let mut raw_tags = vec![0u8; rows];
        r.read_exact(&mut raw_tags)?;
        let tags = raw_tags
            .into_iter()
            .map(|t| match t {
                TAG_NORMAL => Ok(Some(TrafficClass::Normal)),
                TAG_ANOMALY => Ok(Some(TrafficClass::Anomaly)),
                TAG_UNKNOWN => Ok(None),
                other => Err(wire::invalid(format!("bad row tag {other}"))),
            })
            .collect::<io::Result<Vec<_>>>()?;
        Ok(Dataset { dim, values, tags })
    }

    /// True if the stream starts with the cache magic.
    pub fn sniff_cache(head: &[u8]) -> bool {
        head.starts_with(CACHE_MAGIC)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_layout_is_header_rows_tags() {
        let mut ds = Dataset::new(2);
        ds.push(&[0.25, 1.0], Some(TrafficClass::Normal));
        ds.push(&[0.5, 0.0], None);
        let mut buf = Vec::new();
        ds.write_cache(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 2 * 2 * 4 + 2);
        assert_eq!(&buf[..4], b"ADVC");
        assert_eq!(&buf[8..12], &2u32.to_le_bytes());
        assert_eq!(&buf[12..20], &2u64.to_le_bytes());
        assert_eq!(&buf[20..24], &0.25f32.to_le_bytes());
        assert_eq!(&buf[buf.len() - 2..], &[TAG_NORMAL, TAG_UNKNOWN]);
        let back = Dataset::read_cache(&mut buf.as_slice()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn truncated_cache_is_rejected() {
        let mut ds = Dataset::new(3);
        ds.push(&[0.1, 0.2, 0.3], Some(TrafficClass::Anomaly));
        let mut buf = Vec::new();
        ds.write_cache(&mut buf).unwrap();
        buf.pop();
        assert!(Dataset::read_cache(&mut buf.as_slice()).is_err());
        assert!(Dataset::read_cache(&mut &b"NOPE"[..]).is_err());
    }

    #[test]
    fn filter_by_class() {
        let mut ds = Dataset::new(1);
        ds.push(&[0.0], Some(TrafficClass::Normal));
        ds.push(&[1.0], Some(TrafficClass::Anomaly));
        ds.push(&[0.5], Some(TrafficClass::Normal));
        let n = ds.filter_class(TrafficClass::Normal);
        assert_eq!(n.len(), 2);
        assert_eq!(n.row(1), &[0.5]);
    }
}
