use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;

use advids_core::detect::format_verdict;
use advids_core::flow::{FlowReader, ReadError};
use advids_core::nn::loss::row_mse;

use super::load_detector;
use crate::data;
use crate::error::{CliError, CliResult};

pub fn score(bundle: &Path, input: Option<&Path>, stream: bool, alpha: Option<f64>, recon: bool) -> CliResult<()> {
    let (bundle, detector) = load_detector(bundle, alpha)?;
    let reconstructor = match (recon, bundle.reconstructor) {
        (false, _) => None,
        (true, Some(r)) => Some(r),
        (true, None) => return Err(CliError::new("E_BUNDLE", "bundle was saved without a reconstructor")),
    };
    let reader: Box<dyn BufRead> = match input {
        Some(path) => Box::new(data::open(path)?),
        None => Box::new(io::stdin().lock()),
    };
    let stdout = io::stdout().lock();
    let mut out = BufWriter::new(stdout);
    let write_err = |e: io::Error| CliError::new("E_IO", format!("writing output: {e}"));

    let mut buf = Vec::new();
    let mut malformed = 0usize;
    for (seq, item) in FlowReader::new(reader) {
        match item {
            Ok(flow) => {
                let v = detector.verdict_with(&flow, &mut buf)?;
                let mut line = format_verdict(seq, &v);
                if let Some(r) = &reconstructor {
                    let x_hat = r.predict(&buf).map_err(|e| CliError::new("E_DETECT", e.to_string()))?;
                    line.push_str(&format!(",{:.6}", row_mse(&x_hat, &buf)));
                }
                writeln!(out, "{line}").map_err(write_err)?;
            }
            Err(ReadError::Malformed(e)) => {
                malformed += 1;
                writeln!(out, "{seq},error,{}", e.kind.to_string().replace(',', ";")).map_err(write_err)?;
            }
            Err(ReadError::Io { line, source }) => {
                out.flush().map_err(write_err)?;
                return Err(CliError::new("E_IO", format!("reading line {line}: {source}")));
            }
        }
        if stream {
            out.flush().map_err(write_err)?;
        }
    }
    out.flush().map_err(write_err)?;
    if malformed > 0 {
        eprintln!("warning: {malformed} malformed lines");
    }
    Ok(())
}
