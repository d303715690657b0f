//! Mean enhanced-alignment measure over a 256-threshold sweep.

use crate::error::{check_same_dims, Result};
use crate::raster::{Mask, SoftMap};

/// Largest threshold index k (t = k/255) at which the pixel still
/// binarizes foreground, or None when it never does. Matches the
/// comparison `v >= k/255.0 && v > 0.0` bit-for-bit: the floor estimate
/// is corrected by at most one step in each direction.
fn threshold_cutoff(v: f64) -> Option<u32> {
    if !(v > 0.0) {
        return None;
    }
    let mut k = (v * 255.0).floor().clamp(0.0, 255.0) as u32;
    while k < 255 && v >= (k + 1) as f64 / 255.0 {
        k += 1;
    }
    while v < k as f64 / 255.0 {
        if k == 0 {
            return None;
        }
        k -= 1;
    }
    Some(k)
}

/// Mean E-measure: binarize the prediction at each of 256 thresholds
/// t = k/255 and average the enhanced alignment over thresholds.
///
/// Binarization is `pred >= t && pred > 0`: a zero-confidence pixel is
/// never foreground, so the t = 0 sweep entry compares against the
/// strictly-positive support of the prediction.
///
/// Degenerate ground truths follow the enhanced-alignment convention:
/// all-background gt scores `1 - B`, all-foreground gt scores `B`.
///
/// Internally the sweep runs on per-threshold class counts (the
/// alignment map takes one value per (gt, binarized) class), so the cost
/// is one pass over the pixels plus 256 constant-size steps.
pub fn e_measure_mean(pred: &SoftMap, gt: &Mask) -> Result<f64> {
    check_same_dims("e_measure_mean", pred.dims(), gt.dims())?;
    let n = pred.values().len();
    let n_f = n as f64;
    let gt_fg = gt.fg_count();
    let gt_all_bg = gt_fg == 0;
    let gt_all_fg = gt_fg == n;
    let gt_mean = gt_fg as f64 / n_f;

    // active_fg[k] / active_bg[k]: pixels of each gt class binarizing
    // foreground at threshold k, built as suffix sums over the cutoffs.
    let mut active_fg = [0u64; 257];
    let mut active_bg = [0u64; 257];
    for (&v, &g) in pred.values().iter().zip(gt.bits()) {
        if let Some(k) = threshold_cutoff(v) {
            // Active at thresholds 0..=k: bump the count at k and sweep
            // down with a suffix sum afterwards.
            if g {
                active_fg[k as usize] += 1;
            } else {
                active_bg[k as usize] += 1;
            }
        }
    }
    for k in (0..256).rev() {
        active_fg[k] += active_fg[k + 1];
        active_bg[k] += active_bg[k + 1];
    }

    let mut sum = 0.0;
    for k in 0..256 {
        let fg_on = active_fg[k] as f64; // g=1, b=1
        let bg_on = active_bg[k] as f64; // g=0, b=1
        let fg_off = gt_fg as f64 - fg_on; // g=1, b=0
        let bg_off = (n - gt_fg) as f64 - bg_on; // g=0, b=0

        let e_t = if gt_all_bg {
            // enhanced map is 1 - B
            bg_off / n_f
        } else if gt_all_fg {
            // enhanced map is B
            fg_on / n_f
        } else {
            let b_mean = (fg_on + bg_on) / n_f;
            let enhanced = |g: f64, b: f64| -> f64 {
                let phi_gt = g - gt_mean;
                let phi_fm = b - b_mean;
                // The denominator only vanishes when both bias maps do,
                // which the degenerate branches already cover; machine
                // epsilon keeps the ratio defined without biasing it.
                let xi = 2.0 * phi_gt * phi_fm
                    / (phi_gt * phi_gt + phi_fm * phi_fm + f64::EPSILON);
                (1.0 + xi) * (1.0 + xi) / 4.0
            };
            (fg_on * enhanced(1.0, 1.0)
                + fg_off * enhanced(1.0, 0.0)
                + bg_on * enhanced(0.0, 1.0)
                + bg_off * enhanced(0.0, 0.0))
                / n_f
        };
        sum += e_t;
    }
    Ok(sum / 256.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::selftest::oracle;

    fn mixed_gt() -> Mask {
        Mask::from_fn(8, 8, |x, y| (2..6).contains(&x) && (2..6).contains(&y)).unwrap()
    }

    #[test]
    fn identical_binary_pred_scores_one() {
        let gt = mixed_gt();
        let pred = SoftMap::from_mask(&gt);
        let v = e_measure_mean(&pred, &gt).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn complement_pred_scores_zero() {
        let gt = mixed_gt();
        let pred = SoftMap::new(
            8,
            8,
            gt.bits().iter().map(|&b| if b { 0.0 } else { 1.0 }).collect(),
        )
        .unwrap();
        let v = e_measure_mean(&pred, &gt).unwrap();
        assert!(v.abs() < 1e-9, "got {v}");
    }

    #[test]
    fn random_soft_pred_matches_threshold_loop_oracle() {
        let mut rng = Rng::new(0xE1);
        for _ in 0..20 {
            let pred = SoftMap::new(8, 8, (0..64).map(|_| rng.uniform()).collect()).unwrap();
            let gt = Mask::from_fn(8, 8, |_, _| rng.uniform() < 0.4).unwrap();
            let got = e_measure_mean(&pred, &gt).unwrap();
            let expect = oracle::e_measure_brute(&pred, &gt);
            assert!((got - expect).abs() < 1e-12, "got {got} expected {expect}");
            assert!((0.0..=1.0).contains(&got));
        }
    }

    #[test]
    fn exact_threshold_grid_values_match_oracle() {
        // Values sitting exactly on the k/255 grid stress the cutoff
        // correction against the literal comparison.
        let values: Vec<f64> = (0..64).map(|i| (i * 4 % 256) as f64 / 255.0).collect();
        let pred = SoftMap::new(8, 8, values).unwrap();
        let gt = Mask::from_fn(8, 8, |x, y| (x + y) % 3 == 0).unwrap();
        let got = e_measure_mean(&pred, &gt).unwrap();
        let expect = oracle::e_measure_brute(&pred, &gt);
        assert!((got - expect).abs() < 1e-12, "got {got} expected {expect}");
    }

    #[test]
    fn cutoff_matches_literal_comparison() {
        let mut rng = Rng::new(9);
        let mut candidates: Vec<f64> = (0..=255).map(|k| k as f64 / 255.0).collect();
        candidates.extend((0..500).map(|_| rng.uniform()));
        candidates.extend([0.0, 1.0, 1e-300, f64::MIN_POSITIVE]);
        for v in candidates {
            let cutoff = threshold_cutoff(v);
            for k in 0..=255u32 {
                let t = k as f64 / 255.0;
                let literal = v >= t && v > 0.0;
                let via_cutoff = cutoff.is_some_and(|c| k <= c);
                assert_eq!(literal, via_cutoff, "v={v} k={k} cutoff={cutoff:?}");
            }
        }
    }

    #[test]
    fn degenerate_gts_follow_convention() {
        let all_bg = Mask::filled(4, 4, false).unwrap();
        let all_fg = Mask::filled(4, 4, true).unwrap();
        let zeros = SoftMap::new(4, 4, vec![0.0; 16]).unwrap();
        let ones = SoftMap::new(4, 4, vec![1.0; 16]).unwrap();
        // all-background gt: enhanced map is 1 - B
        assert!((e_measure_mean(&zeros, &all_bg).unwrap() - 1.0).abs() < 1e-12);
        assert!(e_measure_mean(&ones, &all_bg).unwrap().abs() < 1e-12);
        // all-foreground gt: enhanced map is B
        assert!((e_measure_mean(&ones, &all_fg).unwrap() - 1.0).abs() < 1e-12);
        assert!(e_measure_mean(&zeros, &all_fg).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let gt = Mask::filled(4, 4, true).unwrap();
        let pred = SoftMap::new(4, 5, vec![0.0; 20]).unwrap();
        assert!(e_measure_mean(&pred, &gt).is_err());
    }
}
