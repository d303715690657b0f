//! Instance average precision with greedy score-ordered matching and
//! 101-point interpolation.

use crate::error::{check_same_dims, Result};
use crate::raster::Mask;

use super::iou;

/// The standard evaluation sweep: 0.50 to 0.95 in steps of 0.05.
pub const COCO_AP_THRESHOLDS: [f64; 10] = [0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ApBlock {
    pub ap: f64,
    pub ap50: f64,
    pub ap75: f64,
}

/// One matched detection: its confidence and whether it hit a ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredMatch {
    pub score: f64,
    pub true_positive: bool,
}

/// Greedy matching at a single IoU threshold. Predictions are visited in
/// descending score (ties by input order); each claims the unmatched
/// ground truth of highest IoU if that IoU reaches the threshold.
pub fn match_scored_predictions(
    preds: &[(Mask, f64)],
    gts: &[Mask],
    threshold: f64,
) -> Result<Vec<ScoredMatch>> {
    for (m, s) in preds {
        assert!(s.is_finite(), "prediction scores must be finite");
        if let Some(g) = gts.first() {
            check_same_dims("instance_ap", m.dims(), g.dims())?;
        }
    }
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].1.partial_cmp(&preds[a].1).unwrap().then(a.cmp(&b)));

    let mut gt_taken = vec![false; gts.len()];
    let mut out = Vec::with_capacity(preds.len());
    for &pi in &order {
        let (pm, score) = &preds[pi];
        let mut best: Option<(usize, f64)> = None;
        for (gi, g) in gts.iter().enumerate() {
            if gt_taken[gi] {
                continue;
            }
            let v = iou(pm, g)?;
            let better = match best {
                None => true,
                Some((_, bv)) => v > bv,
            };
            if better {
                best = Some((gi, v));
            }
        }
        let tp = match best {
            Some((gi, v)) if v >= threshold => {
                gt_taken[gi] = true;
                true
            }
            _ => false,
        };
        out.push(ScoredMatch { score: *score, true_positive: tp });
    }
    Ok(out)
}

/// 101-point interpolated AP from pooled matches. `matches` may come from
/// several images; they are re-sorted by descending score here.
pub fn ap_from_pooled(matches: &[ScoredMatch], num_gt: usize) -> f64 {
    if num_gt == 0 {
        // Vacuous perfection only when nothing was predicted either.
        return if matches.is_empty() { 1.0 } else { 0.0 };
    }
    if matches.is_empty() {
        return 0.0;
    }
    let mut sorted: Vec<&ScoredMatch> = matches.iter().collect();
    sorted.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());

    let mut tp = 0usize;
    let mut curve = Vec::with_capacity(sorted.len());
    for (i, m) in sorted.iter().enumerate() {
        tp += m.true_positive as usize;
        let recall = tp as f64 / num_gt as f64;
        let precision = tp as f64 / (i + 1) as f64;
        curve.push((recall, precision));
    }

    let mut total = 0.0;
    for level in 0..=100 {
        let r = level as f64 / 100.0;
        let p = curve
            .iter()
            .filter(|(rec, _)| *rec >= r - 1e-12)
            .map(|(_, prec)| *prec)
            .fold(0.0, f64::max);
        total += p;
    }
    total / 101.0
}

/// AP over the given IoU thresholds for one image's predictions, plus the
/// fixed AP50/AP75 entries.
pub fn instance_ap(preds: &[(Mask, f64)], gts: &[Mask], thresholds: &[f64]) -> Result<ApBlock> {
    let mut sum = 0.0;
    for &t in thresholds {
        let matches = match_scored_predictions(preds, gts, t)?;
        sum += ap_from_pooled(&matches, gts.len());
    }
    let ap = if thresholds.is_empty() { 0.0 } else { sum / thresholds.len() as f64 };
    let ap50 = ap_from_pooled(&match_scored_predictions(preds, gts, 0.50)?, gts.len());
    let ap75 = ap_from_pooled(&match_scored_predictions(preds, gts, 0.75)?, gts.len());
    Ok(ApBlock { ap, ap50, ap75 })
}
