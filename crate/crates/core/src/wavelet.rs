//! Orthonormal 2x2 Haar wavelet analysis and synthesis on feature maps.
//!
//! Per channel, each non-overlapping 2x2 block (a b / c d) maps to
//!   ll = (a+b+c+d)/2   lh = (a-b+c-d)/2
//!   hl = (a+b-c-d)/2   hh = (a-b-c+d)/2
//! The 1/2 factor makes the transform orthonormal: energy is preserved and
//! the synthesis below is the exact inverse.

use crate::error::{Error, Result};
use crate::feature::FeatureMap;

#[derive(Debug, Clone)]
pub struct WaveletBands {
    pub ll: FeatureMap,
    pub lh: FeatureMap,
    pub hl: FeatureMap,
    pub hh: FeatureMap,
}

impl WaveletBands {
    fn check_shapes(&self) -> Result<()> {
        let s = self.ll.shape();
        for (name, band) in [("lh", &self.lh), ("hl", &self.hl), ("hh", &self.hh)] {
            if band.shape() != s {
                return Err(Error::shape(format!(
                    "band {name} shape {:?} != ll shape {s:?}",
                    band.shape()
                )));
            }
        }
        Ok(())
    }
}

/// Haar analysis. Requires even height and width.
pub fn haar_dwt2(f: &FeatureMap) -> Result<WaveletBands> {
    let (h, w, c) = f.shape();
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::shape(format!("haar_dwt2 needs even dims, got {h}x{w}")));
    }
    let (bh, bw) = (h / 2, w / 2);
    let mut ll = FeatureMap::zeros(bh, bw, c);
    let mut lh = FeatureMap::zeros(bh, bw, c);
    let mut hl = FeatureMap::zeros(bh, bw, c);
    let mut hh = FeatureMap::zeros(bh, bw, c);
    for by in 0..bh {
        for bx in 0..bw {
            for ch in 0..c {
                let a = f.get(2 * by, 2 * bx, ch);
                let b = f.get(2 * by, 2 * bx + 1, ch);
                let cc = f.get(2 * by + 1, 2 * bx, ch);
                let d = f.get(2 * by + 1, 2 * bx + 1, ch);
                ll.set(by, bx, ch, (a + b + cc + d) / 2.0);
                lh.set(by, bx, ch, (a - b + cc - d) / 2.0);
                hl.set(by, bx, ch, (a + b - cc - d) / 2.0);
                hh.set(by, bx, ch, (a - b - cc + d) / 2.0);
            }
        }
    }
    Ok(WaveletBands { ll, lh, hl, hh })
}

/// Haar synthesis: exact inverse of [`haar_dwt2`].
pub fn haar_idwt2(bands: &WaveletBands) -> Result<FeatureMap> {
    bands.check_shapes()?;
    let (bh, bw, c) = bands.ll.shape();
    let mut out = FeatureMap::zeros(bh * 2, bw * 2, c);
    for by in 0..bh {
        for bx in 0..bw {
            for ch in 0..c {
                let ll = bands.ll.get(by, bx, ch);
                let lh = bands.lh.get(by, bx, ch);
                let hl = bands.hl.get(by, bx, ch);
                let hh = bands.hh.get(by, bx, ch);
                out.set(2 * by, 2 * bx, ch, (ll + lh + hl + hh) / 2.0);
                out.set(2 * by, 2 * bx + 1, ch, (ll - lh + hl - hh) / 2.0);
                out.set(2 * by + 1, 2 * bx, ch, (ll + lh - hl - hh) / 2.0);
                out.set(2 * by + 1, 2 * bx + 1, ch, (ll - lh - hl + hh) / 2.0);
            }
        }
    }
    Ok(out)
}
