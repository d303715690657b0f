//! Exact squared-Euclidean distance transform with nearest-seed tracking.
//!
//! Two-pass lower-envelope construction (per-column 1D transform, then a
//! parabola envelope per row). Distances are exact integers. The reported
//! nearest seed is the minimizer with the smallest column, breaking
//! remaining ties toward the smallest row; this tie rule is part of the
//! contract relied on by the weighted F-measure's error propagation.

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
pub struct DistanceTransform {
    /// Squared distance to the nearest seed; `i64::MAX / 4` when no seeds exist.
    pub dist2: Vec<i64>,
    /// Linear index (y * width + x) of the nearest seed; usize::MAX when none.
    pub nearest: Vec<usize>,
}

pub fn exact_edt(seeds: &[bool], width: usize, height: usize) -> DistanceTransform {
    assert_eq!(seeds.len(), width * height);
    let mut col_d2 = vec![INF; width * height];
    let mut col_y = vec![usize::MAX; width * height];

    for x in 0..width {
        // Downward scan: nearest seed at or above.
        let mut last: Option<usize> = None;
        for y in 0..height {
            if seeds[y * width + x] {
                last = Some(y);
            }
            if let Some(sy) = last {
                let d = (y - sy) as i64;
                col_d2[y * width + x] = d * d;
                col_y[y * width + x] = sy;
            }
        }
        // Upward scan: nearest seed below, kept only when strictly closer
        // (ties go to the seed above, i.e. the smaller row).
        let mut next: Option<usize> = None;
        for y in (0..height).rev() {
            if seeds[y * width + x] {
                next = Some(y);
            }
            if let Some(sy) = next {
                let d = (sy - y) as i64;
                if d * d < col_d2[y * width + x] {
                    col_d2[y * width + x] = d * d;
                    col_y[y * width + x] = sy;
                }
            }
        }
    }

    let mut dist2 = vec![INF; width * height];
    let mut nearest = vec![usize::MAX; width * height];
    let mut hull_x = vec![0usize; width + 1];
    let mut bound = vec![0.0f64; width + 2];

    for y in 0..height {
        let row = &col_d2[y * width..(y + 1) * width];
        let mut k = 0usize;
        let mut any = false;
        for q in 0..width {
            if row[q] >= INF {
                continue;
            }
            if !any {
                any = true;
                hull_x[0] = q;
                bound[0] = f64::NEG_INFINITY;
                bound[1] = f64::INFINITY;
                continue;
            }
            let fq = row[q] as f64 + (q * q) as f64;
            loop {
                let p = hull_x[k];
                let fp = row[p] as f64 + (p * p) as f64;
                let s = (fq - fp) / (2.0 * (q as f64 - p as f64));
                if s <= bound[k] && k > 0 {
                    k -= 1;
                } else {
                    k += 1;
                    hull_x[k] = q;
                    bound[k] = s;
                    bound[k + 1] = f64::INFINITY;
                    break;
                }
            }
        }
        if !any {
            continue;
        }
        let mut k = 0usize;
        for x in 0..width {
            while bound[k + 1] < x as f64 {
                k += 1;
            }
            let p = hull_x[k];
            let dx = x as i64 - p as i64;
            dist2[y * width + x] = row[p] + dx * dx;
            nearest[y * width + x] = col_y[y * width + p] * width + p;
        }
    }

    DistanceTransform { dist2, nearest }
}
