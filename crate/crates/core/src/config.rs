//! Runtime configuration: a flat key=value file with every key
//! overridable by a same-named command-line flag; flags win.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::decoder::DecoderConfig;
use crate::error::{Error, Result};
use crate::nsfm::NsfmConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub seed: u64,
    /// Worker count; a performance knob with no effect on results, so it
    /// is excluded from the provenance echo in reports.
    #[serde(skip_serializing)]
    pub jobs: usize,
    /// Mask binarization: intensity >= threshold is foreground.
    pub binarize_threshold: u8,
    /// Records with score >= threshold are non-salient.
    pub vns_threshold: f64,
    /// Boundary band distance as a fraction of the image diagonal.
    pub biou_fraction: f64,
    /// Noisy-box sigma as a fraction of the box side length.
    pub noise_scale: f64,
    /// Point prompts per record.
    pub n_points: usize,
    /// Non-saliency score combination weights.
    pub vns_weight_cfb: f64,
    pub vns_weight_boundary: f64,
    pub vns_glcm_levels: usize,
    pub decoder: DecoderConfig,
    pub nsfm: NsfmConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            jobs: 1,
            binarize_threshold: 128,
            vns_threshold: 0.7,
            biou_fraction: 0.02,
            noise_scale: 0.1,
            n_points: 10,
            vns_weight_cfb: 0.5,
            vns_weight_boundary: 0.5,
            vns_glcm_levels: 16,
            decoder: DecoderConfig::desk_default(),
            nsfm: NsfmConfig::desk_default(),
        }
    }
}

impl Config {
    /// Applies one key=value override.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                Error::Config(format!("cannot parse {key}={value}"))
            })
        }
        match key {
            "seed" => self.seed = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "binarize_threshold" => self.binarize_threshold = parse(key, value)?,
            "vns_threshold" => self.vns_threshold = parse(key, value)?,
            "biou_fraction" => self.biou_fraction = parse(key, value)?,
            "noise_scale" => self.noise_scale = parse(key, value)?,
            "n_points" => self.n_points = parse(key, value)?,
            "vns_weight_cfb" => self.vns_weight_cfb = parse(key, value)?,
            "vns_weight_boundary" => self.vns_weight_boundary = parse(key, value)?,
            "vns_glcm_levels" => self.vns_glcm_levels = parse(key, value)?,
            "decoder_token_dim" => self.decoder.token_dim = parse(key, value)?,
            "decoder_num_heads" => self.decoder.num_heads = parse(key, value)?,
            "decoder_ffn_dim" => self.decoder.ffn_dim = parse(key, value)?,
            "decoder_emb_height" => self.decoder.emb_height = parse(key, value)?,
            "decoder_emb_width" => self.decoder.emb_width = parse(key, value)?,
            "decoder_upscaled_channels" => self.decoder.upscaled_channels = parse(key, value)?,
            "decoder_vns_channels" => self.decoder.vns_channels = parse(key, value)?,
            "decoder_mask_fusion_hidden" => self.decoder.mask_fusion_hidden = parse(key, value)?,
            "nsfm_levels" => self.nsfm.levels = parse(key, value)?,
            "nsfm_height" => self.nsfm.height = parse(key, value)?,
            "nsfm_width" => self.nsfm.width = parse(key, value)?,
            "nsfm_in_channels" => self.nsfm.in_channels = parse(key, value)?,
            "nsfm_band_channels" => self.nsfm.band_channels = parse(key, value)?,
            "nsfm_out_channels" => self.nsfm.out_channels = parse(key, value)?,
            "nsfm_attention_reduction" => self.nsfm.attention_reduction = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other}"))),
        }
        Ok(())
    }

    /// Loads overrides from a flat key=value file. Blank lines and lines
    /// starting with '#' are skipped.
    pub fn load_overrides(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {} is not key=value: {line}", idx + 1))
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(Error::config("jobs must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.vns_threshold) {
            return Err(Error::config("vns_threshold must lie in [0,1]"));
        }
        if self.noise_scale < 0.0 {
            return Err(Error::config("noise_scale must be nonnegative"));
        }
        if self.n_points == 0 {
            return Err(Error::config("n_points must be at least 1"));
        }
        self.decoder.validate()?;
        self.nsfm.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_carry_protocol_constants() {
        let c = Config::default();
        assert_eq!(c.noise_scale, 0.1);
        assert_eq!(c.n_points, 10);
        assert_eq!(c.vns_threshold, 0.7);
        assert_eq!(c.binarize_threshold, 128);
        assert_eq!(c.biou_fraction, 0.02);
    }

    #[test]
    fn file_overrides_then_flag_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "# comment\nseed = 9\nn_points=4\n").unwrap();
        let mut c = Config::default();
        c.load_overrides(&path).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.n_points, 4);
        // flags win by being applied after the file
        c.apply("n_points", "6").unwrap();
        assert_eq!(c.n_points, 6);
    }

    #[test]
    fn unknown_key_is_config_error() {
        let mut c = Config::default();
        assert!(c.apply("nope", "1").is_err());
    }

    #[test]
    fn default_config_validates() {
        Config::default().validate().unwrap();
    }
}
