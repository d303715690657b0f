//! Gray-level co-occurrence contrast within a masked region.

use crate::error::{Error, Result};
use crate::raster::{GrayImage, Mask};

/// Pixel-pair displacement as (row delta, column delta).
pub type Offset = (i32, i32);

/// Default displacements: one pixel right and one pixel down.
pub const DEFAULT_OFFSETS: [Offset; 2] = [(0, 1), (1, 0)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlcmContrast {
    /// Normalized contrast in [0, 1].
    pub value: f64,
    /// Set when the region produced no co-occurring pairs; the value is
    /// then 0 by convention.
    pub no_pairs: bool,
}

/// GLCM contrast of the region: quantize to `levels` bins, accumulate
/// symmetric co-occurrence counts over the offsets for pairs whose both
/// endpoints lie in the region, normalize, and form
/// sum P(i,j) (i-j)^2 / (levels-1)^2.
pub fn glcm_contrast(
    img: &GrayImage,
    region: &Mask,
    levels: usize,
    offsets: &[Offset],
) -> Result<GlcmContrast> {
    if img.dims() != region.dims() {
        return Err(Error::shape(format!(
            "glcm image {:?} vs region {:?}",
            img.dims(),
            region.dims()
        )));
    }
    if levels < 2 || levels > 256 {
        return Err(Error::config(format!("glcm levels {levels} outside 2..=256")));
    }
    if region.fg_count() == 0 {
        return Err(Error::UndefinedMetric("glcm contrast over an empty region".to_string()));
    }

    let (w, h) = (img.width() as i32, img.height() as i32);
    let quantize = |v: u8| -> usize { (v as usize * levels) / 256 };

    let mut counts = vec![0u64; levels * levels];
    let mut total = 0u64;
    for y in 0..h {
        for x in 0..w {
            if !region.get(x as usize, y as usize) {
                continue;
            }
            let a = quantize(img.get(x as usize, y as usize));
            for &(dy, dx) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                if !region.get(nx as usize, ny as usize) {
                    continue;
                }
                let b = quantize(img.get(nx as usize, ny as usize));
                counts[a * levels + b] += 1;
                counts[b * levels + a] += 1;
                total += 2;
            }
        }
    }

    if total == 0 {
        return Ok(GlcmContrast { value: 0.0, no_pairs: true });
    }

    let mut contrast = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            let p = counts[i * levels + j] as f64 / total as f64;
            let d = i as f64 - j as f64;
            contrast += p * d * d;
        }
    }
    let norm = ((levels - 1) * (levels - 1)) as f64;
    Ok(GlcmContrast { value: contrast / norm, no_pairs: false })
}
