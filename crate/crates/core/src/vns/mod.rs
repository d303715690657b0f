//! Non-saliency scoring: foreground/background contrast in color and
//! texture, boundary clarity, and the combined score.

mod color;
mod glcm;
mod sobel;

pub use color::{rgb_to_lab, srgb_to_lab, Lab};
pub use glcm::{glcm_contrast, GlcmContrast, Offset, DEFAULT_OFFSETS};
pub use sobel::{boundary_clarity, boundary_clarity_with, sobel_magnitude, SobelNorm, MAX_SOBEL_MAGNITUDE};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{ColorImage, GrayImage, Mask};

/// Tunables for the score; defaults follow the equal-weight combination.
#[derive(Debug, Clone)]
pub struct VnsParams {
    pub glcm_levels: usize,
    pub glcm_offsets: Vec<Offset>,
    pub weight_cfb: f64,
    pub weight_boundary: f64,
    pub sobel_norm: SobelNorm,
}

impl Default for VnsParams {
    fn default() -> Self {
        VnsParams {
            glcm_levels: 16,
            glcm_offsets: DEFAULT_OFFSETS.to_vec(),
            weight_cfb: 0.5,
            weight_boundary: 0.5,
            sobel_norm: SobelNorm::MaxMagnitude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FgBgContrast {
    pub color_contrast: f64,
    pub texture_contrast: f64,
    pub c_fb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VnsBreakdown {
    pub color_contrast: f64,
    pub texture_contrast: f64,
    pub c_fb: f64,
    pub boundary_clarity: f64,
    pub score: f64,
}

/// Foreground/background contrast: LAB mean distance (normalized by the
/// L range, 100) averaged with the GLCM texture-contrast difference.
pub fn foreground_background_contrast(
    img: &ColorImage,
    gray: &GrayImage,
    mask: &Mask,
    params: &VnsParams,
) -> Result<FgBgContrast> {
    if img.dims() != mask.dims() || gray.dims() != mask.dims() {
        return Err(Error::shape(format!(
            "contrast inputs {:?}/{:?} vs mask {:?}",
            img.dims(),
            gray.dims(),
            mask.dims()
        )));
    }
    let fg_n = mask.fg_count();
    let total = mask.bits().len();
    if fg_n == 0 || fg_n == total {
        return Err(Error::UndefinedMetric(
            "contrast needs both foreground and background pixels".to_string(),
        ));
    }

    let labs = rgb_to_lab(img);
    let mut mu_fg = [0.0f64; 3];
    let mut mu_bg = [0.0f64; 3];
    for (lab, &fg) in labs.iter().zip(mask.bits()) {
        let target = if fg { &mut mu_fg } else { &mut mu_bg };
        target[0] += lab.l;
        target[1] += lab.a;
        target[2] += lab.b;
    }
    let bg_n = total - fg_n;
    for v in mu_fg.iter_mut() {
        *v /= fg_n as f64;
    }
    for v in mu_bg.iter_mut() {
        *v /= bg_n as f64;
    }
    let dist = ((mu_fg[0] - mu_bg[0]).powi(2)
        + (mu_fg[1] - mu_bg[1]).powi(2)
        + (mu_fg[2] - mu_bg[2]).powi(2))
    .sqrt();
    let color_contrast = (dist / 100.0).clamp(0.0, 1.0);

    let bg_mask = Mask::new(
        mask.width(),
        mask.height(),
        mask.bits().iter().map(|&b| !b).collect(),
    )?;
    let c_fg = glcm_contrast(gray, mask, params.glcm_levels, &params.glcm_offsets)?;
    let c_bg = glcm_contrast(gray, &bg_mask, params.glcm_levels, &params.glcm_offsets)?;
    let texture_contrast = (c_fg.value - c_bg.value).abs();

    Ok(FgBgContrast {
        color_contrast,
        texture_contrast,
        c_fb: (color_contrast + texture_contrast) / 2.0,
    })
}

/// The non-saliency score: 1 - (w_cfb * C_fb + w_b * B). Higher means the
/// object is harder to see.
pub fn vns_score_with(img: &ColorImage, mask: &Mask, params: &VnsParams) -> Result<VnsBreakdown> {
    let gray = img.to_gray();
    let contrast = foreground_background_contrast(img, &gray, mask, params)?;
    let clarity = boundary_clarity_with(&gray, mask, params.sobel_norm)?;
    let score =
        (1.0 - (params.weight_cfb * contrast.c_fb + params.weight_boundary * clarity)).clamp(0.0, 1.0);
    Ok(VnsBreakdown {
        color_contrast: contrast.color_contrast,
        texture_contrast: contrast.texture_contrast,
        c_fb: contrast.c_fb,
        boundary_clarity: clarity,
        score,
    })
}

pub fn vns_score(img: &ColorImage, mask: &Mask) -> Result<VnsBreakdown> {
    vns_score_with(img, mask, &VnsParams::default())
}

/// Non-salient iff score >= threshold.
pub fn is_non_salient(score: f64, threshold: f64) -> bool {
    score >= threshold
}

/// Pixel-population mean and standard deviation across all images.
pub fn dataset_stats(images: &[GrayImage]) -> Result<(f64, f64)> {
    if images.is_empty() {
        return Err(Error::UndefinedMetric("dataset_stats over an empty list".to_string()));
    }
    let mut sum: u128 = 0;
    let mut sq_sum: u128 = 0;
    let mut n: u128 = 0;
    for img in images {
        for &v in img.intensities() {
            sum += v as u128;
            sq_sum += (v as u128) * (v as u128);
            n += 1;
        }
    }
    let mean = sum as f64 / n as f64;
    let var = sq_sum as f64 / n as f64 - mean * mean;
    Ok((mean, var.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_mask(w: usize, h: usize) -> Mask {
        Mask::from_fn(w, h, |x, y| {
            (w / 4..3 * w / 4).contains(&x) && (h / 4..3 * h / 4).contains(&y)
        })
        .unwrap()
    }

    #[test]
    fn identical_fg_bg_colors_give_zero_contrast_and_full_score() {
        let img = ColorImage::from_fn(16, 16, |_, _| [90, 90, 90]).unwrap();
        let mask = square_mask(16, 16);
        let b = vns_score(&img, &mask).unwrap();
        assert!(b.c_fb.abs() < 1e-12, "c_fb {}", b.c_fb);
        assert_eq!(b.boundary_clarity, 0.0);
        assert!((b.score - 1.0).abs() < 1e-12, "score {}", b.score);
    }

    #[test]
    fn black_on_white_textureless_gives_half_cfb() {
        let mask = square_mask(16, 16);
        let img = ColorImage::from_fn(16, 16, |x, y| {
            if mask.get(x, y) {
                [0, 0, 0]
            } else {
                [255, 255, 255]
            }
        })
        .unwrap();
        let gray = img.to_gray();
        let c = foreground_background_contrast(&img, &gray, &mask, &VnsParams::default()).unwrap();
        assert_eq!(c.color_contrast, 1.0); // L distance 100, clamped ratio 1
        assert_eq!(c.texture_contrast, 0.0);
        assert_eq!(c.c_fb, 0.5);
    }

    #[test]
    fn random_image_matches_two_pass_formula_oracle() {
        let img = ColorImage::from_fn(12, 12, |x, y| {
            [
                ((x * 83 + y * 7) % 256) as u8,
                ((x * 31 + y * 57) % 256) as u8,
                ((x * 13 + y * 11) % 256) as u8,
            ]
        })
        .unwrap();
        let mask = square_mask(12, 12);
        let gray = img.to_gray();
        let params = VnsParams::default();
        let got = foreground_background_contrast(&img, &gray, &mask, &params).unwrap();

        // Independent two-pass recomputation.
        let labs = rgb_to_lab(&img);
        let mut fg = vec![];
        let mut bg = vec![];
        for (i, lab) in labs.iter().enumerate() {
            if mask.bits()[i] {
                fg.push(*lab)
            } else {
                bg.push(*lab)
            }
        }
        let mean = |v: &[Lab]| {
            let n = v.len() as f64;
            [
                v.iter().map(|l| l.l).sum::<f64>() / n,
                v.iter().map(|l| l.a).sum::<f64>() / n,
                v.iter().map(|l| l.b).sum::<f64>() / n,
            ]
        };
        let (mf, mb) = (mean(&fg), mean(&bg));
        let dist = ((mf[0] - mb[0]).powi(2) + (mf[1] - mb[1]).powi(2) + (mf[2] - mb[2]).powi(2)).sqrt();
        let color = (dist / 100.0).clamp(0.0, 1.0);
        assert!((got.color_contrast - color).abs() < 1e-12);

        let bg_mask =
            Mask::new(12, 12, mask.bits().iter().map(|&b| !b).collect()).unwrap();
        let tf = glcm_contrast(&gray, &mask, 16, &params.glcm_offsets).unwrap().value;
        let tb = glcm_contrast(&gray, &bg_mask, 16, &params.glcm_offsets).unwrap().value;
        assert!((got.texture_contrast - (tf - tb).abs()).abs() < 1e-12);
        assert!((got.c_fb - (color + (tf - tb).abs()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn score_is_direct_arithmetic_of_components() {
        // c_fb = 0.5, B = 0.3 -> score 0.6 by construction of the formula.
        let score: f64 = 1.0 - (0.5 * 0.5 + 0.5 * 0.3);
        assert!((score - 0.6).abs() < 1e-15);
    }

    #[test]
    fn sharp_square_scores_below_blurred_square() {
        let mask = square_mask(32, 32);
        let img = ColorImage::from_fn(32, 32, |x, y| {
            if mask.get(x, y) {
                [40, 40, 40]
            } else {
                [200, 200, 200]
            }
        })
        .unwrap();
        let sharp = vns_score(&img, &mask).unwrap();
        let blurred = vns_score(&img.gaussian_blur(3.0), &mask).unwrap();
        assert!(
            sharp.score < blurred.score,
            "sharp {} vs blurred {}",
            sharp.score,
            blurred.score
        );
    }

    #[test]
    fn full_or_empty_mask_is_undefined() {
        let img = ColorImage::from_fn(8, 8, |_, _| [1, 2, 3]).unwrap();
        assert!(vns_score(&img, &Mask::filled(8, 8, true).unwrap()).is_err());
        assert!(vns_score(&img, &Mask::filled(8, 8, false).unwrap()).is_err());
    }

    #[test]
    fn dataset_stats_constants() {
        let a = GrayImage::from_fn(4, 4, |_, _| 100).unwrap();
        let (m, s) = dataset_stats(&[a.clone()]).unwrap();
        assert_eq!((m, s), (100.0, 0.0));

        let b = GrayImage::from_fn(4, 4, |_, _| 0).unwrap();
        let c = GrayImage::from_fn(4, 4, |_, _| 200).unwrap();
        let (m, s) = dataset_stats(&[b, c]).unwrap();
        assert_eq!((m, s), (100.0, 100.0));
    }

    #[test]
    fn dataset_stats_matches_two_pass_oracle() {
        let imgs: Vec<GrayImage> = (0..3)
            .map(|k| {
                GrayImage::from_fn(5 + k, 7, |x, y| ((x * 91 + y * 17 + k * 55) % 256) as u8).unwrap()
            })
            .collect();
        let (m, s) = dataset_stats(&imgs).unwrap();
        let all: Vec<f64> = imgs
            .iter()
            .flat_map(|i| i.intensities().iter().map(|&v| v as f64))
            .collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / all.len() as f64;
        assert!((m - mean).abs() < 1e-9);
        assert!((s - var.sqrt()).abs() < 1e-9);
    }
}
