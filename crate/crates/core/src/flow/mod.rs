//! NSL-KDD records: parsing, feature encoding, and the encoded-dataset cache.

mod codec;
mod dataset;
mod record;
pub mod schema;

pub use codec::{split_normal_only, CodecError, CODEC_MAGIC, CODEC_VERSION, FeatureCodec, FlowVector, NormalSplit};
pub use dataset::{Dataset, CACHE_MAGIC, CACHE_VERSION};
pub use record::{
    parse_records, FlowReader, ParseError, ParseErrorKind, ParsedRecords, RawFlow, ReadError,
    TrafficClass,
};
