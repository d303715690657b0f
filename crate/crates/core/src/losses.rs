//! Structure loss (weighted BCE + weighted IoU), dice loss, edge target
//! derivation, and the two-level total loss. Gradients are hand-derived
//! and checked against central finite differences.

use crate::decoder::DecoderOutput;
use crate::error::{check_same_dims, Error, Result};
use crate::nn::sigmoid;
use crate::raster::{Mask, SoftMap};

/// Smoothing constant for the dice and weighted-IoU ratios.
pub const SMOOTH_EPS: f64 = 1.0;

/// One loss term and its gradient with respect to the logits.
#[derive(Debug, Clone)]
pub struct LossTerm {
    pub value: f64,
    pub gradient: SoftMap,
}

/// Total loss with the per-term breakdown; `total` is the exact sum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LossValue {
    pub total: f64,
    pub l_stru: [f64; 2],
    pub l_dice: [f64; 2],
}

/// Edge ground truth: morphological gradient with a 3x3 element,
/// dilate(mask) minus erode(mask).
pub fn edge_gt_from_mask(mask: &Mask) -> Mask {
    mask.dilate3()
        .difference(&mask.erode3())
        .expect("dims unchanged")
}

/// Boundary-emphasizing weight map: 1 + 5 |avgpool_31(gt) - gt|.
/// The pool is stride 1 with zero padding and a constant 31x31 divisor.
fn structure_weights(gt: &Mask) -> Vec<f64> {
    let (w, h) = (gt.width() as isize, gt.height() as isize);
    // Integral image over the gt indicator.
    let mut integral = vec![0.0f64; ((w + 1) * (h + 1)) as usize];
    for y in 0..h {
        for x in 0..w {
            let g = gt.get(x as usize, y as usize) as u8 as f64;
            integral[((y + 1) * (w + 1) + x + 1) as usize] = g
                + integral[(y * (w + 1) + x + 1) as usize]
                + integral[((y + 1) * (w + 1) + x) as usize]
                - integral[(y * (w + 1) + x) as usize];
        }
    }
    let window_sum = |x0: isize, y0: isize, x1: isize, y1: isize| -> f64 {
        // Inclusive box clipped to the raster; zero outside.
        let x0 = x0.max(0);
        let y0 = y0.max(0);
        let x1 = (x1 + 1).min(w);
        let y1 = (y1 + 1).min(h);
        if x0 >= x1 || y0 >= y1 {
            return 0.0;
        }
        integral[(y1 * (w + 1) + x1) as usize] - integral[(y0 * (w + 1) + x1) as usize]
            - integral[(y1 * (w + 1) + x0) as usize]
            + integral[(y0 * (w + 1) + x0) as usize]
    };

    let mut out = Vec::with_capacity((w * h) as usize);
    const R: isize = 15;
    const DIV: f64 = 31.0 * 31.0;
    for y in 0..h {
        for x in 0..w {
            let pooled = window_sum(x - R, y - R, x + R, y + R) / DIV;
            let g = gt.get(x as usize, y as usize) as u8 as f64;
            out.push(1.0 + 5.0 * (pooled - g).abs());
        }
    }
    out
}

/// Numerically stable binary cross entropy from logits.
#[inline]
fn bce_with_logits(x: f64, g: f64) -> f64 {
    x.max(0.0) - x * g + (-x.abs()).exp().ln_1p()
}

/// Weighted BCE + weighted IoU with the boundary-emphasizing weight map.
/// Returns the scalar term and its analytic gradient w.r.t. the logits.
pub fn structure_loss(logits: &SoftMap, gt: &Mask) -> Result<LossTerm> {
    check_same_dims("structure_loss", logits.dims(), gt.dims())?;
    let weights = structure_weights(gt);
    let n = weights.len();

    let mut w_sum = 0.0;
    let mut wbce_sum = 0.0;
    let mut inter = 0.0;
    let mut union = 0.0;
    let mut probs = Vec::with_capacity(n);
    for i in 0..n {
        let x = logits.values()[i];
        let g = gt.bits()[i] as u8 as f64;
        let w = weights[i];
        let p = sigmoid(x);
        probs.push(p);
        w_sum += w;
        wbce_sum += w * bce_with_logits(x, g);
        inter += w * p * g;
        union += w * (p + g - p * g);
    }
    let wbce = wbce_sum / w_sum;
    let wiou = 1.0 - (inter + SMOOTH_EPS) / (union + SMOOTH_EPS);
    let value = wbce + wiou;

    let u_eps = union + SMOOTH_EPS;
    let i_eps = inter + SMOOTH_EPS;
    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        let g = gt.bits()[i] as u8 as f64;
        let w = weights[i];
        let p = probs[i];
        // d wBCE / dx = w (p - g) / sum(w)
        let d_bce = w * (p - g) / w_sum;
        // d wIoU / dp = -(w g (U+e) - (I+e) w (1-g)) / (U+e)^2
        let d_iou_dp = -(w * g * u_eps - i_eps * w * (1.0 - g)) / (u_eps * u_eps);
        let d_iou = d_iou_dp * p * (1.0 - p);
        grad.push(d_bce + d_iou);
    }
    Ok(LossTerm {
        value,
        gradient: SoftMap::new(logits.width(), logits.height(), grad)?,
    })
}

/// Dice loss on sigmoid probabilities with the smooth-dice constant.
pub fn dice_loss(logits: &SoftMap, gt_edge: &Mask) -> Result<LossTerm> {
    check_same_dims("dice_loss", logits.dims(), gt_edge.dims())?;
    let n = logits.values().len();
    let mut p_sum = 0.0;
    let mut g_sum = 0.0;
    let mut pg_sum = 0.0;
    let mut probs = Vec::with_capacity(n);
    for i in 0..n {
        let p = sigmoid(logits.values()[i]);
        let g = gt_edge.bits()[i] as u8 as f64;
        probs.push(p);
        p_sum += p;
        g_sum += g;
        pg_sum += p * g;
    }
    let denom = p_sum + g_sum + SMOOTH_EPS;
    let numer = 2.0 * pg_sum + SMOOTH_EPS;
    let value = 1.0 - numer / denom;

    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        let g = gt_edge.bits()[i] as u8 as f64;
        let p = probs[i];
        // d/dp [ -(2 sum(pg)+e)/(sum p + sum g + e) ]
        let d_dp = -(2.0 * g * denom - numer) / (denom * denom);
        grad.push(d_dp * p * (1.0 - p));
    }
    Ok(LossTerm {
        value,
        gradient: SoftMap::new(logits.width(), logits.height(), grad)?,
    })
}

/// Hierarchical total: per level, structure loss on the mask logits plus
/// dice loss on the edge logits; two levels summed with equal weight.
pub fn total_loss(outputs: &DecoderOutput, mk_gt: &Mask, eg_gt: &Mask) -> Result<LossValue> {
    if outputs.vns_masks.len() != 2 || outputs.vns_edges.len() != 2 {
        return Err(Error::Contract(format!(
            "total_loss needs 2 mask and 2 edge levels, got {} and {}",
            outputs.vns_masks.len(),
            outputs.vns_edges.len()
        )));
    }
    total_loss_terms(&outputs.vns_masks, &outputs.vns_edges, mk_gt, eg_gt)
}

pub fn total_loss_terms(
    masks: &[SoftMap],
    edges: &[SoftMap],
    mk_gt: &Mask,
    eg_gt: &Mask,
) -> Result<LossValue> {
    if masks.len() != 2 || edges.len() != 2 {
        return Err(Error::Contract("total_loss expects exactly two levels".to_string()));
    }
    let mut l_stru = [0.0; 2];
    let mut l_dice = [0.0; 2];
    for k in 0..2 {
        l_stru[k] = structure_loss(&masks[k], mk_gt)?.value;
        l_dice[k] = dice_loss(&edges[k], eg_gt)?.value;
    }
    Ok(LossValue {
        total: l_stru[0] + l_stru[1] + l_dice[0] + l_dice[1],
        l_stru,
        l_dice,
    })
}
