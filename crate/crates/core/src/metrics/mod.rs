//! Evaluation metrics: IoU, boundary IoU, mean E-measure, weighted
//! F-measure, and instance AP.

mod ap;
mod boundary;
mod emeasure;
mod report;
mod weighted_f;

pub use ap::{ap_from_pooled, instance_ap, match_scored_predictions, ApBlock, ScoredMatch, COCO_AP_THRESHOLDS};
pub use boundary::{boundary_band, boundary_iou, boundary_iou_default, default_boundary_distance};
pub use emeasure::e_measure_mean;
pub use report::{MeanMetrics, MetricReport, RecordEntry, RecordMetrics};
pub use weighted_f::weighted_f_beta;

use crate::error::{check_same_dims, Result};
use crate::raster::Mask;

/// Denominator guard used by the metric ratios.
pub(crate) const EPS: f64 = 1e-8;

/// Intersection over union of two masks. Defined as 1.0 when both masks
/// are empty.
pub fn iou(pred: &Mask, gt: &Mask) -> Result<f64> {
    check_same_dims("iou", pred.dims(), gt.dims())?;
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        inter += (p && g) as usize;
        union += (p || g) as usize;
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Mask;

    fn mask_from_points(w: usize, h: usize, pts: &[(usize, usize)]) -> Mask {
        Mask::from_fn(w, h, |x, y| pts.contains(&(x, y))).unwrap()
    }

    #[test]
    fn identical_masks_give_one() {
        let m = mask_from_points(4, 4, &[(0, 0), (2, 3)]);
        assert_eq!(iou(&m, &m).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_masks_give_zero() {
        let a = mask_from_points(4, 4, &[(0, 0)]);
        let b = mask_from_points(4, 4, &[(3, 3)]);
        assert_eq!(iou(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn overlapping_squares_one_seventh() {
        let pred = mask_from_points(4, 4, &[(1, 1), (1, 2), (2, 1), (2, 2)]);
        let gt = mask_from_points(4, 4, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let v = iou(&pred, &gt).unwrap();
        assert!((v - 1.0 / 7.0).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn both_empty_defined_as_one() {
        let e = Mask::filled(3, 3, false).unwrap();
        assert_eq!(iou(&e, &e).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let a = Mask::filled(3, 3, true).unwrap();
        let b = Mask::filled(4, 3, true).unwrap();
        assert!(iou(&a, &b).is_err());
    }

    #[test]
    fn symmetric() {
        let a = mask_from_points(5, 5, &[(1, 1), (2, 2), (3, 1)]);
        let b = mask_from_points(5, 5, &[(1, 1), (4, 4)]);
        assert_eq!(iou(&a, &b).unwrap(), iou(&b, &a).unwrap());
    }
}
