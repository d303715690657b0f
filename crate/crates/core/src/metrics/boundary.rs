//! Boundary IoU: IoU restricted to pixels within distance d of each mask's
//! contour, intersected with the mask itself.

use crate::dist::exact_edt;
use crate::error::{check_same_dims, Result};
use crate::raster::Mask;

use super::iou;

/// Default band distance: round(fraction * image diagonal), at least 1.
pub fn default_boundary_distance(width: usize, height: usize, fraction: f64) -> usize {
    let diag = ((width * width + height * height) as f64).sqrt();
    ((fraction * diag).round() as usize).max(1)
}

/// The band `X_d ∩ X`: mask pixels within Euclidean distance d of the
/// mask's contour. Out-of-bounds neighbors count as background, so masks
/// truncated by the image border contribute their border pixels to the
/// contour.
pub fn boundary_band(mask: &Mask, d: usize) -> Mask {
    let contour = mask.contour(true);
    if contour.iter().all(|&c| !c) {
        return Mask::filled(mask.width(), mask.height(), false).expect("dims valid");
    }
    let edt = exact_edt(&contour, mask.width(), mask.height());
    let d2 = (d * d) as i64;
    let bits = mask
        .bits()
        .iter()
        .zip(&edt.dist2)
        .map(|(&m, &dd)| m && dd <= d2)
        .collect();
    Mask::new(mask.width(), mask.height(), bits).expect("dims valid")
}

/// Boundary IoU at band distance d.
pub fn boundary_iou(pred: &Mask, gt: &Mask, d: usize) -> Result<f64> {
    check_same_dims("boundary_iou", pred.dims(), gt.dims())?;
    assert!(d >= 1, "band distance must be >= 1");
    let pb = boundary_band(pred, d);
    let gb = boundary_band(gt, d);
    iou(&pb, &gb)
}

/// Boundary IoU with d = round(fraction * diagonal), minimum 1.
pub fn boundary_iou_default(pred: &Mask, gt: &Mask, fraction: f64) -> Result<f64> {
    let d = default_boundary_distance(pred.width(), pred.height(), fraction);
    boundary_iou(pred, gt, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selftest::oracle;

    #[test]
    fn identical_masks_give_one() {
        let m = Mask::from_fn(8, 8, |x, y| (2..6).contains(&x) && (2..6).contains(&y)).unwrap();
        assert_eq!(boundary_iou(&m, &m, 1).unwrap(), 1.0);
    }

    #[test]
    fn saturated_band_equals_plain_iou() {
        let pred = Mask::from_fn(8, 8, |x, y| x + y < 7).unwrap();
        let gt = Mask::from_fn(8, 8, |x, y| x >= 2 && y >= 1).unwrap();
        let d = 12; // longer than the 8x8 diagonal
        let b = boundary_iou(&pred, &gt, d).unwrap();
        let i = iou(&pred, &gt).unwrap();
        assert_eq!(b, i);
    }

    #[test]
    fn shifted_square_matches_exhaustive_oracle() {
        let pred = Mask::from_fn(8, 8, |x, y| (2..6).contains(&x) && (2..6).contains(&y)).unwrap();
        let gt = Mask::from_fn(8, 8, |x, y| (3..7).contains(&x) && (3..7).contains(&y)).unwrap();
        let got = boundary_iou(&pred, &gt, 1).unwrap();
        let expect = oracle::boundary_iou_brute(&pred, &gt, 1);
        assert!((got - expect).abs() < 1e-15, "got {got} expected {expect}");
    }

    #[test]
    fn empty_masks_band_is_empty_and_biou_defined() {
        let e = Mask::filled(5, 5, false).unwrap();
        let m = Mask::from_fn(5, 5, |x, _| x == 2).unwrap();
        assert_eq!(boundary_iou(&e, &e, 1).unwrap(), 1.0);
        assert_eq!(boundary_iou(&e, &m, 1).unwrap(), 0.0);
    }

    #[test]
    fn default_distance_floor_is_one() {
        assert_eq!(default_boundary_distance(8, 8, 0.02), 1);
        assert_eq!(default_boundary_distance(1000, 1000, 0.02), 28);
    }

    #[test]
    fn symmetry() {
        let a = Mask::from_fn(9, 7, |x, y| x * y % 5 < 2).unwrap();
        let b = Mask::from_fn(9, 7, |x, y| (x + y) % 3 == 0).unwrap();
        assert_eq!(
            boundary_iou(&a, &b, 2).unwrap(),
            boundary_iou(&b, &a, 2).unwrap()
        );
    }
}
