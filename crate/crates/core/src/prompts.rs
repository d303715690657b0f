//! Prompt sampling protocols: ground-truth boxes, noisy boxes, random
//! foreground points, and degraded coarse masks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::iou;
use crate::raster::{Mask, SoftMap};
use crate::rng::Rng;

/// Axis-aligned box; x2 and y2 are exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundingBox {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl BoundingBox {
    pub fn width(&self) -> i64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> i64 {
        self.y2 - self.y1
    }
}

/// Positive point prompts; every point lies inside the source mask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointSet {
    pub points: Vec<(usize, usize)>,
}

/// Degraded mask prompt with its construction provenance.
#[derive(Debug, Clone)]
pub struct CoarseMask {
    pub map: SoftMap,
    /// IoU of the binarized degraded mask against the source mask; inside
    /// [0.3, 0.95] by construction.
    pub iou_with_gt: f64,
    pub attempts: u32,
}

/// Tightest box containing every foreground pixel.
pub fn gt_box(mask: &Mask) -> Result<BoundingBox> {
    if mask.fg_count() == 0 {
        return Err(Error::EmptyMask("gt_box of an empty mask".to_string()));
    }
    let (mut min_x, mut min_y) = (usize::MAX, usize::MAX);
    let (mut max_x, mut max_y) = (0usize, 0usize);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    Ok(BoundingBox {
        x1: min_x as i64,
        y1: min_y as i64,
        x2: max_x as i64 + 1,
        y2: max_y as i64 + 1,
    })
}

const NOISE_CAP_PX: f64 = 20.0;

/// Perturbs each coordinate with Gaussian noise of sigma = scale * side
/// length, clipped to +-20 px, then clamps to the image and restores
/// x1 < x2, y1 < y2 (degenerate boxes are expanded by one pixel).
///
/// Draw order is fixed: x1, y1, x2, y2.
pub fn noisy_box(
    bbox: &BoundingBox,
    scale: f64,
    img_w: usize,
    img_h: usize,
    rng: &mut Rng,
) -> BoundingBox {
    assert!(scale >= 0.0);
    let side_w = bbox.width() as f64;
    let side_h = bbox.height() as f64;
    let mut perturb = |coord: i64, side: f64| -> i64 {
        let raw = rng.gaussian() * scale * side;
        let clipped = raw.clamp(-NOISE_CAP_PX, NOISE_CAP_PX);
        coord + clipped.round() as i64
    };
    let mut x1 = perturb(bbox.x1, side_w);
    let mut y1 = perturb(bbox.y1, side_h);
    let mut x2 = perturb(bbox.x2, side_w);
    let mut y2 = perturb(bbox.y2, side_h);

    x1 = x1.clamp(0, img_w as i64);
    x2 = x2.clamp(0, img_w as i64);
    y1 = y1.clamp(0, img_h as i64);
    y2 = y2.clamp(0, img_h as i64);
    if x1 > x2 {
        std::mem::swap(&mut x1, &mut x2);
    }
    if y1 > y2 {
        std::mem::swap(&mut y1, &mut y2);
    }
    if x1 == x2 {
        if x2 < img_w as i64 {
            x2 += 1;
        } else {
            x1 -= 1;
        }
    }
    if y1 == y2 {
        if y2 < img_h as i64 {
            y2 += 1;
        } else {
            y1 -= 1;
        }
    }
    BoundingBox { x1, y1, x2, y2 }
}

/// n uniform draws over the foreground: with replacement when the
/// foreground has fewer than n pixels, without replacement otherwise.
pub fn sample_points(mask: &Mask, n: usize, rng: &mut Rng) -> Result<PointSet> {
    if mask.fg_count() == 0 {
        return Err(Error::EmptyMask("sample_points from an empty mask".to_string()));
    }
    assert!(n >= 1);
    let fg: Vec<(usize, usize)> = (0..mask.height())
        .flat_map(|y| (0..mask.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| mask.get(x, y))
        .collect();

    let points = if fg.len() < n {
        (0..n)
            .map(|_| fg[rng.uniform_below(fg.len() as u64) as usize])
            .collect()
    } else {
        rng.sample_without_replacement(fg.len(), n)
            .into_iter()
            .map(|i| fg[i])
            .collect()
    };
    Ok(PointSet { points })
}

/// Coarse-mask degradation: average-pool the mask to 1/8 scale, upsample
/// bilinearly, apply a random grayscale dilation or erosion (disc radius
/// 0..=3), and accept when the binarized result lands in the IoU band.
pub fn coarse_mask(mask: &Mask, rng: &mut Rng) -> Result<CoarseMask> {
    const MAX_ATTEMPTS: u32 = 20;
    const BAND: (f64, f64) = (0.3, 0.95);
    if mask.fg_count() == 0 {
        return Err(Error::EmptyMask("coarse_mask of an empty mask".to_string()));
    }
    let (w, h) = mask.dims();
    let soft = SoftMap::from_mask(mask);
    let small = soft.bilinear_resize((w / 8).max(1), (h / 8).max(1));
    let up = small.bilinear_resize(w, h);

    for attempt in 1..=MAX_ATTEMPTS {
        let dilate = rng.next_u64() & 1 == 0;
        let radius = rng.uniform_below(4) as usize;
        let degraded = if dilate {
            up.dilate_disc(radius)
        } else {
            up.erode_disc(radius)
        };
        let v = iou(&degraded.binarize(0.5), mask)?;
        if (BAND.0..=BAND.1).contains(&v) {
            return Ok(CoarseMask {
                map: degraded,
                iou_with_gt: v,
                attempts: attempt,
            });
        }
    }
    Err(Error::DegradationFailure {
        attempts: MAX_ATTEMPTS,
        lo: BAND.0,
        hi: BAND.1,
    })
}
