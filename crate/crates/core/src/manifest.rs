//! Dataset manifests: JSON Lines, one record per line.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceRef {
    pub mask: PathBuf,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestRecord {
    pub image: PathBuf,
    pub gt_mask: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<Vec<InstanceRef>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn records(&self) -> &[ManifestRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Parses a JSON Lines manifest, preserving file order. Blank lines are
/// not tolerated: every line must hold one record.
pub fn parse_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest_str(&text)
}

pub fn parse_manifest_str(text: &str) -> Result<Manifest> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let record: ManifestRecord =
            serde_json::from_str(line).map_err(|e| Error::ManifestParse {
                line: line_no,
                reason: e.to_string(),
            })?;
        let mut paths: BTreeSet<&Path> = BTreeSet::new();
        paths.insert(&record.image);
        paths.insert(&record.gt_mask);
        if let Some(p) = &record.pred {
            paths.insert(p);
        }
        let mut count = 2 + record.pred.iter().count();
        if let Some(instances) = &record.instances {
            for inst in instances {
                paths.insert(&inst.mask);
                count += 1;
            }
        }
        if paths.len() != count {
            return Err(Error::ManifestParse {
                line: line_no,
                reason: "paths within a record must be distinct".to_string(),
            });
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::EmptyManifest);
    }
    Ok(Manifest { records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_parses() {
        let m = parse_manifest_str(r#"{"image":"a.png","gt_mask":"b.png"}"#).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.records()[0].pred.is_none());
    }

    #[test]
    fn empty_file_is_an_error() {
        match parse_manifest_str("") {
            Err(Error::EmptyManifest) => {}
            other => panic!("expected empty-manifest error, got {other:?}"),
        }
    }

    #[test]
    fn missing_field_names_the_line() {
        let text = "{\"image\":\"a.png\",\"gt_mask\":\"b.png\"}\n{\"image\":\"c.png\"}";
        match parse_manifest_str(text) {
            Err(Error::ManifestParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn order_preserved_and_instances_parse() {
        let text = concat!(
            "{\"image\":\"1.png\",\"gt_mask\":\"1m.png\",\"pred\":\"1p.png\"}\n",
            "{\"image\":\"2.png\",\"gt_mask\":\"2m.png\",\"instances\":[{\"mask\":\"i0.png\",\"score\":0.9}]}\n",
        );
        let m = parse_manifest_str(text).unwrap();
        assert_eq!(m.records()[0].image, PathBuf::from("1.png"));
        assert_eq!(m.records()[1].instances.as_ref().unwrap()[0].score, 0.9);
    }

    #[test]
    fn duplicate_paths_rejected() {
        let text = r#"{"image":"a.png","gt_mask":"a.png"}"#;
        assert!(parse_manifest_str(text).is_err());
    }
}
