mod bench;
mod eval;
mod inspect;
mod prepare;
mod score;
mod train;

pub use bench::bench;
pub use eval::eval;
pub use inspect::inspect;
pub use prepare::prepare;
pub use score::score;
pub use train::train;

use std::path::Path;

use advids_core::bundle::ModelBundle;
use advids_core::detect::Detector;

use crate::error::CliResult;

/// Loads a bundle and builds its detector, optionally with a different threshold.
fn load_detector(path: &Path, alpha: Option<f64>) -> CliResult<(ModelBundle, Detector)> {
    let bundle = ModelBundle::load(path)?;
    let mut detector = bundle.detector()?;
    if let Some(a) = alpha {
        detector = detector.with_alpha(a)?;
    }
    Ok((bundle, detector))
}
