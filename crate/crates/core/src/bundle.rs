//! A self-contained deployable model: codec, detector, optional reconstructor, the
//! training configuration and a digest of the training trace.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::detect::{DetectError, Detector};
use crate::flow::FeatureCodec;
use crate::nn::DenseNet;
use crate::train::{ConfigError, TrainConfig, TrainedModels};
use crate::wire;

pub const BUNDLE_MAGIC: &[u8; 4] = b"ADVB";
pub const BUNDLE_VERSION: u32 = 1;
const MAX_CONFIG_BYTES: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported bundle version {0}")]
    Version(u32),
    #[error("stored config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Detect(#[from] DetectError),
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub format_version: u32,
    pub codec: FeatureCodec,
    pub reconstructor: Option<DenseNet<f32>>,
    pub detector: DenseNet<f32>,
    pub train_config: TrainConfig,
    pub trace_digest: [u8; 32],
}

impl ModelBundle {
    pub fn new(codec: FeatureCodec, models: TrainedModels, config: TrainConfig) -> Result<Self, BundleError> {
        let bundle = ModelBundle {
            format_version: BUNDLE_VERSION,
            codec,
            trace_digest: models.trace.digest(),
            reconstructor: Some(models.reconstructor),
            detector: models.detector,
            train_config: config,
        };
        bundle.check()?;
        Ok(bundle)
    }

    /// Drops the reconstructor, which scoring does not need.
    pub fn without_reconstructor(mut self) -> Self {
        self.reconstructor = None;
        self
    }

    fn check(&self) -> Result<(), BundleError> {
        let d = self.codec.output_dim();
        if self.detector.input_dim() != d || self.detector.output_dim() != 2 {
            return Err(BundleError::Inconsistent(format!(
                "detector maps {}->{} but the codec produces {d} features",
                self.detector.input_dim(),
                self.detector.output_dim()
            )));
        }
        if let Some(r) = &self.reconstructor {
            if r.input_dim() != d || r.output_dim() != d {
                return Err(BundleError::Inconsistent(format!(
                    "reconstructor maps {}->{} but the codec produces {d} features",
                    r.input_dim(),
                    r.output_dim()
                )));
            }
        }
        Ok(())
    }

    /// Detector using the stored threshold.
    pub fn detector(&self) -> Result<Detector, BundleError> {
        Ok(Detector::new(self.detector.clone(), self.codec.clone(), self.train_config.alpha)?)
    }

    pub fn trace_digest_hex(&self) -> String {
        self.trace_digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(BUNDLE_MAGIC)?;
        wire::put_u32(w, self.format_version)?;
        self.codec.write_to(w)?;
        wire::put_str(w, &self.train_config.to_kv())?;
        self.detector.write_to(w)?;
        match &self.reconstructor {
            Some(r) => {
                wire::put_u8(w, 1)?;
                r.write_to(w)?;
            }
            None => wire::put_u8(w, 0)?,
        }
        w.write_all(&self.trace_digest)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, BundleError> {
        wire::expect_magic(r, BUNDLE_MAGIC)?;
        let format_version = wire::get_u32(r)?;
        if format_version != BUNDLE_VERSION {
            return Err(BundleError::Version(format_version));
        }
        let codec = FeatureCodec::read_from(r)?;
        let train_config = TrainConfig::from_kv(&wire::get_str(r, MAX_CONFIG_BYTES)?)?;
        let detector = DenseNet::<f32>::read_from(r)?;
        let reconstructor = match wire::get_u8(r)? {
            0 => None,
            1 => Some(DenseNet::<f32>::read_from(r)?),
            t => return Err(wire::invalid(format!("bad reconstructor flag {t}")).into()),
        };
        let mut trace_digest = [0u8; 32];
        r.read_exact(&mut trace_digest)?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(wire::invalid("trailing bytes after bundle").into());
        }
        let bundle = ModelBundle {
            format_version,
            codec,
            reconstructor,
            detector,
            train_config,
            trace_digest,
        };
        bundle.check()?;
        Ok(bundle)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_to(&mut v).expect("writing to a Vec cannot fail");
        v
    }

    /// Writes to a sibling temp file then renames, so readers never see a partial bundle.
    pub fn save_atomic(&self, path: &Path) -> Result<(), BundleError> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let tmp = tempfile::NamedTempFile::new_in(dir)?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            self.write_to(&mut w)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, BundleError> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}
