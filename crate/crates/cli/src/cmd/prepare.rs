use std::path::Path;

use advids_core::flow::{Dataset, FeatureCodec};

use crate::data;
use crate::error::{CliError, CliResult};

pub fn prepare(input: &Path, out: &Path) -> CliResult<()> {
    let parsed = data::read_csv(input)?;
    let normals = parsed.normal_count();
    let codec = FeatureCodec::fit(parsed.flows.iter().filter(|f| f.is_normal()))
        .map_err(|_| CliError::new("E_NO_NORMALS", format!("{} contains no normal flows", input.display())))?;
    let encoded = Dataset::encode(&codec, &parsed.flows);

    let codec_out = data::codec_path(out);
    data::write_atomic(&codec_out, |mut w| codec.save(&mut w))?;
    data::write_atomic(out, |mut w| encoded.write_cache(&mut w))?;

    println!(
        "{} records parsed ({} normal, {} anomaly, {} malformed)",
        parsed.flows.len(),
        normals,
        parsed.anomaly_count(),
        parsed.errors.len()
    );
    println!("{normals} normal flows retained for training");
    println!("output_dim {}", codec.output_dim());
    println!("wrote {} and {}", out.display(), codec_out.display());
    Ok(())
}
