//! Weighted F-measure: distance-weighted errors emphasize pixels near the
//! object boundary.

use crate::dist::exact_edt;
use crate::error::{check_same_dims, Error, Result};
use crate::raster::{Mask, SoftMap};

use super::EPS;

/// 7x7 Gaussian (sigma = 5) filter with replicate padding.
fn smooth_7x7(values: &[f64], width: usize, height: usize) -> Vec<f64> {
    let sigma = 5.0;
    let mut kernel = [[0.0f64; 7]; 7];
    let mut norm = 0.0;
    for (i, row) in kernel.iter_mut().enumerate() {
        for (j, k) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 3.0, j as f64 - 3.0);
            *k = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
            norm += *k;
        }
    }
    for row in kernel.iter_mut() {
        for k in row.iter_mut() {
            *k /= norm;
        }
    }

    let (w, h) = (width as isize, height as isize);
    let mut out = vec![0.0; values.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, row) in kernel.iter().enumerate() {
                let sy = (y + i as isize - 3).clamp(0, h - 1);
                for (j, k) in row.iter().enumerate() {
                    let sx = (x + j as isize - 3).clamp(0, w - 1);
                    acc += k * values[(sy * w + sx) as usize];
                }
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    out
}

/// Weighted F-measure of a soft prediction against a nonempty ground truth.
///
/// Background errors are propagated to the error at the nearest foreground
/// pixel, smoothed with a 7x7 Gaussian (sigma 5, replicate padding), and
/// inside the ground truth the smaller of raw and smoothed error is kept.
/// Background pixels are down-weighted by 2 - exp(ln(0.5)/5 * d) with d the
/// Euclidean distance to the foreground.
pub fn weighted_f_beta(pred: &SoftMap, gt: &Mask, beta2: f64) -> Result<f64> {
    check_same_dims("weighted_f_beta", pred.dims(), gt.dims())?;
    if gt.fg_count() == 0 {
        return Err(Error::UndefinedMetric(
            "weighted_f_beta requires a nonempty ground truth".to_string(),
        ));
    }
    let (w, h) = gt.dims();
    let n = w * h;

    let error: Vec<f64> = pred
        .values()
        .iter()
        .zip(gt.bits())
        .map(|(&p, &g)| ((g as u8) as f64 - p).abs())
        .collect();

    let edt = exact_edt(gt.bits(), w, h);

    let mut propagated = error.clone();
    for i in 0..n {
        if !gt.bits()[i] {
            propagated[i] = error[edt.nearest[i]];
        }
    }

    let smoothed = smooth_7x7(&propagated, w, h);

    let ln_half_over_5 = 0.5f64.ln() / 5.0;
    let mut weighted_fg_error = 0.0;
    let mut weighted_bg_error = 0.0;
    for i in 0..n {
        if gt.bits()[i] {
            let e = if smoothed[i] < error[i] { smoothed[i] } else { error[i] };
            weighted_fg_error += e;
        } else {
            let d = (edt.dist2[i] as f64).sqrt();
            let b = 2.0 - (ln_half_over_5 * d).exp();
            weighted_bg_error += error[i] * b;
        }
    }

    let fg = gt.fg_count() as f64;
    let tp_w = fg - weighted_fg_error;
    let fp_w = weighted_bg_error;
    let recall = 1.0 - weighted_fg_error / fg;
    let precision = tp_w / (EPS + tp_w + fp_w);

    let denom = beta2 * precision + recall;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + beta2) * precision * recall / denom)
}
