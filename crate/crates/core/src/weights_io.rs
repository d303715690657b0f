//! Weight file format: a JSON shape header followed by the flat
//! little-endian f32 parameter stream, in walk order.
//!
//! Layout: magic `VNSW`, u32 LE header length, header JSON, then values.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decoder::{DecoderConfig, DecoderWeights};
use crate::error::{Error, Result};
use crate::nn::{Module, TensorInfo, Walker};
use crate::nsfm::{NsfmConfig, NsfmWeights};
use crate::rng::Rng;

const MAGIC: &[u8; 4] = b"VNSW";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    kind: String,
    nsfm: Option<NsfmConfig>,
    decoder: Option<DecoderConfig>,
    value_count: usize,
    tensors: Vec<TensorEntry>,
}

fn write_file(path: &Path, header: &Header, values: &[f32]) -> Result<()> {
    let header_json = serde_json::to_vec(header).expect("header serializes");
    let mut bytes = Vec::with_capacity(8 + header_json.len() + values.len() * 4);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(header_json.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&header_json);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<(Header, Vec<f32>)> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let fail = |reason: &str| Error::Format {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if bytes.len() < 8 || &bytes[0..4] != MAGIC {
        return Err(fail("bad magic"));
    }
    let hlen = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if bytes.len() < 8 + hlen {
        return Err(fail("truncated header"));
    }
    let header: Header =
        serde_json::from_slice(&bytes[8..8 + hlen]).map_err(|e| fail(&e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(fail(&format!("unsupported version {}", header.format_version)));
    }
    let body = &bytes[8 + hlen..];
    if body.len() != header.value_count * 4 {
        return Err(fail(&format!(
            "value bytes {} != {} expected",
            body.len(),
            header.value_count * 4
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

fn collect<M: Module>(module: &mut M) -> (Vec<TensorInfo>, Vec<f32>) {
    let mut manifest = Vec::new();
    let mut values = Vec::new();
    module
        .walk("", &mut Walker::Save { manifest: &mut manifest, values: &mut values })
        .expect("save walk is infallible");
    (manifest, values)
}

pub fn save_nsfm(path: &Path, weights: &mut NsfmWeights) -> Result<()> {
    let (manifest, values) = collect(weights);
    let header = Header {
        format_version: FORMAT_VERSION,
        kind: "nsfm".to_string(),
        nsfm: Some(weights.config.clone()),
        decoder: None,
        value_count: values.len(),
        tensors: manifest
            .into_iter()
            .map(|t| TensorEntry { name: t.name, shape: t.shape })
            .collect(),
    };
    write_file(path, &header, &values)
}

pub fn load_nsfm(path: &Path) -> Result<NsfmWeights> {
    let (header, values) = read_file(path)?;
    let config = header.nsfm.ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        reason: format!("file holds {:?} weights, wanted nsfm", header.kind),
    })?;
    let mut weights = NsfmWeights::seeded(&config, &mut Rng::new(0))?;
    let mut pos = 0;
    weights.walk("", &mut Walker::Load { values: &values, pos: &mut pos })?;
    if pos != values.len() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("trailing values: consumed {pos} of {}", values.len()),
        });
    }
    Ok(weights)
}

pub fn save_decoder(path: &Path, weights: &mut DecoderWeights) -> Result<()> {
    let (manifest, values) = collect(weights);
    let header = Header {
        format_version: FORMAT_VERSION,
        kind: "decoder".to_string(),
        nsfm: None,
        decoder: Some(weights.config.clone()),
        value_count: values.len(),
        tensors: manifest
            .into_iter()
            .map(|t| TensorEntry { name: t.name, shape: t.shape })
            .collect(),
    };
    write_file(path, &header, &values)
}

pub fn load_decoder(path: &Path) -> Result<DecoderWeights> {
    let (header, values) = read_file(path)?;
    let config = header.decoder.ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        reason: format!("file holds {:?} weights, wanted decoder", header.kind),
    })?;
    let mut weights = DecoderWeights::seeded(&config, &mut Rng::new(0))?;
    let mut pos = 0;
    weights.walk("", &mut Walker::Load { values: &values, pos: &mut pos })?;
    if pos != values.len() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("trailing values: consumed {pos} of {}", values.len()),
        });
    }
    Ok(weights)
}

/// SHA-256 of the little-endian f64 bytes, as lowercase hex.
pub fn sha256_hex_f64(values: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for v in values {
        hasher.update(v.to_le_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
