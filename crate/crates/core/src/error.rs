use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error on {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("manifest parse error at line {line}: {reason}")]
    ManifestParse { line: usize, reason: String },

    #[error("manifest is empty")]
    EmptyManifest,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("empty mask: {0}")]
    EmptyMask(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("coarse mask degradation failed after {attempts} attempts (target IoU band [{lo}, {hi}])")]
    DegradationFailure { attempts: u32, lo: f64, hi: f64 },

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Checks that two rasters share dimensions before a pixelwise operation.
pub(crate) fn check_same_dims(
    what: &str,
    (wa, ha): (usize, usize),
    (wb, hb): (usize, usize),
) -> Result<()> {
    if (wa, ha) != (wb, hb) {
        return Err(Error::shape(format!(
            "{what}: {wa}x{ha} vs {wb}x{hb}"
        )));
    }
    Ok(())
}
