//! Anomaly-based intrusion detection trained adversarially on normal traffic only.
//!
//! A reconstructor network `R` (encoder-decoder) turns normal NSL-KDD flows into
//! near-miss imitations, and a detector network `A` learns to tell real normal flows
//! from those imitations. At inference only `A` is used: its softmax probability of
//! the normal class is the flow's likelihood score, and a flow is normal iff that
//! score is strictly above the threshold α.

pub mod bundle;
pub mod detect;
pub mod eval;
pub mod flow;
pub mod nn;
pub mod synth;
pub mod train;
mod wire;
