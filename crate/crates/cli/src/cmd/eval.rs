use std::path::Path;

use advids_core::detect::{classify, score, Decision};
use advids_core::eval::{metrics, tally, EvalReport};
use advids_core::flow::Dataset;

use super::load_detector;
use crate::data;
use crate::error::{CliError, CliResult};

pub fn eval(bundle: &Path, input: &Path, alpha: Option<f64>, report: Option<&Path>) -> CliResult<()> {
    let (_, detector) = load_detector(bundle, alpha)?;
    let (decisions, truth) = if data::is_cache(input)? {
        let ds = Dataset::read_cache(&mut data::open(input)?)
            .map_err(|e| CliError::new("E_CACHE", format!("{}: {e}", input.display())))?;
        let want = detector.codec().output_dim();
        if ds.dim() != want {
            return Err(CliError::new(
                "E_DIM",
                format!("{} has {} features but the bundle's codec produces {want}", input.display(), ds.dim()),
            ));
        }
        let mut decisions = Vec::with_capacity(ds.len());
        for row in ds.rows() {
            decisions.push(classify(score(detector.net(), row)?, detector.alpha())?.decision);
        }
        (decisions, ds.tags().to_vec())
    } else {
        let parsed = data::read_csv(input)?;
        let mut buf = Vec::new();
        let decisions = parsed
            .flows
            .iter()
            .map(|f| detector.verdict_with(f, &mut buf).map(|v| v.decision))
            .collect::<Result<Vec<Decision>, _>>()?;
        let truth = parsed.flows.iter().map(|f| Some(f.class())).collect::<Vec<_>>();
        (decisions, truth)
    };

    let confusion = tally(&decisions, &truth)?;
    let m = metrics(&confusion)?;
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    let report_data = EvalReport::new(confusion, m);
    println!("evaluated {} flows at alpha {}", decisions.len(), detector.alpha());
    print!("{}", report_data.to_table());
    println!();
    print!("{}", report_data.to_kv());
    if let Some(path) = report {
        data::write_atomic(path, |w| w.write_all(report_data.to_kv().as_bytes()))?;
    }
    Ok(())
}
