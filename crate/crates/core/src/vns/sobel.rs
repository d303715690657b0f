//! Sobel gradient magnitude and the boundary-clarity statistic.

use crate::error::{Error, Result};
use crate::raster::{GrayImage, Mask};

/// Maximum attainable 3x3 Sobel magnitude on 8-bit data: gx and gy each
/// reach 255*4, so the magnitude caps at 255*4*sqrt(2).
pub const MAX_SOBEL_MAGNITUDE: f64 = 1020.0 * std::f64::consts::SQRT_2;

/// Normalization rule for boundary clarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobelNorm {
    /// Divide by the maximum attainable magnitude; result is in [0, 1].
    MaxMagnitude,
    /// Divide by 255 (literal appendix rule); may exceed 1 and is clamped.
    PlainIntensity,
}

/// Sobel magnitude field with replicate padding.
pub fn sobel_magnitude(img: &GrayImage) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let at = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w - 1) as usize;
        let cy = y.clamp(0, h - 1) as usize;
        img.get(cx, cy) as f64
    };
    let mut out = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1)
                - 2.0 * at(x - 1, y) + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1) + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1);
            out[(y * w + x) as usize] = (gx * gx + gy * gy).sqrt();
        }
    }
    out
}

/// Mean Sobel magnitude over the mask's contour pixels, normalized.
///
/// The contour here treats out-of-bounds neighbors as foreground-neutral:
/// a mask running into the image border does not count its border pixels
/// as contour, so the statistic reflects the visible object boundary.
pub fn boundary_clarity_with(gray: &GrayImage, mask: &Mask, norm: SobelNorm) -> Result<f64> {
    if gray.dims() != mask.dims() {
        return Err(Error::shape(format!(
            "boundary_clarity image {:?} vs mask {:?}",
            gray.dims(),
            mask.dims()
        )));
    }
    let contour = mask.contour(false);
    let count = contour.iter().filter(|&&c| c).count();
    if count == 0 {
        return Err(Error::UndefinedMetric(
            "boundary_clarity requires a nonempty contour".to_string(),
        ));
    }
    let magnitude = sobel_magnitude(gray);
    let sum: f64 = magnitude
        .iter()
        .zip(&contour)
        .filter(|(_, &c)| c)
        .map(|(&m, _)| m)
        .sum();
    let mean = sum / count as f64;
    let denom = match norm {
        SobelNorm::MaxMagnitude => MAX_SOBEL_MAGNITUDE,
        SobelNorm::PlainIntensity => 255.0,
    };
    Ok((mean / denom).clamp(0.0, 1.0))
}

pub fn boundary_clarity(gray: &GrayImage, mask: &Mask) -> Result<f64> {
    boundary_clarity_with(gray, mask, SobelNorm::MaxMagnitude)
}
