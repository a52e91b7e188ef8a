//! Loading inputs shared by several subcommands.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use advids_core::flow::{parse_records, Dataset, FeatureCodec, ParsedRecords, CACHE_MAGIC};

use crate::error::{CliError, CliResult};

pub fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

/// Parses a labeled CSV, logging each malformed line.
pub fn read_csv(path: &Path) -> CliResult<ParsedRecords> {
    let parsed = parse_records(open(path)?).map_err(|e| CliError::io(path, e))?;
    for e in &parsed.errors {
        log::warn!("{}: skipped {e}", path.display());
    }
    if !parsed.errors.is_empty() {
        eprintln!("warning: {} malformed lines skipped in {}", parsed.errors.len(), path.display());
    }
    Ok(parsed)
}

pub fn is_cache(path: &Path) -> CliResult<bool> {
    let mut head = [0u8; 4];
    let mut f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let n = f.read(&mut head).map_err(|e| CliError::io(path, e))?;
    Ok(n == 4 && &head == CACHE_MAGIC)
}

pub fn codec_path(cache: &Path) -> PathBuf {
    sibling(cache, "codec")
}

pub fn trace_path(bundle: &Path) -> PathBuf {
    sibling(bundle, "trace.csv")
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// A prepared cache together with the codec written next to it.
pub fn read_prepared(path: &Path) -> CliResult<(Dataset, FeatureCodec)> {
    let data = Dataset::read_cache(&mut open(path)?)
        .map_err(|e| CliError::new("E_CACHE", format!("{}: {e}", path.display())))?;
    let cpath = codec_path(path);
    let codec = FeatureCodec::load(&mut open(&cpath)?)
        .map_err(|e| CliError::new("E_CACHE", format!("{}: {e}", cpath.display())))?;
    if codec.output_dim() != data.dim() {
        return Err(CliError::new(
            "E_DIM",
            format!("cache has {} features but its codec produces {}", data.dim(), codec.output_dim()),
        ));
    }
    Ok((data, codec))
}

/// Writes through a temp file in the destination directory, renaming only on success.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e| CliError::io(path, e);
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        write(&mut w).map_err(err)?;
        w.flush().map_err(err)?;
    }
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
