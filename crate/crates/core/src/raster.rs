//! Core raster types.
//!
//! All rasters are row-major with the origin at the top-left and y growing
//! downward; `index = y * width + x`. Types are immutable after
//! construction.

use crate::error::{check_same_dims, Error, Result};

/// Binary raster of foreground membership. The foreground count is cached
/// at construction so it is queryable in O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    fg_count: usize,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::shape(format!("mask dimensions {width}x{height}")));
        }
        if bits.len() != width * height {
            return Err(Error::shape(format!(
                "mask bit count {} != {width}x{height}",
                bits.len()
            )));
        }
        let fg_count = bits.iter().filter(|&&b| b).count();
        Ok(Mask { width, height, bits, fg_count })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Mask::new(width, height, bits)
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Mask::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn fg_count(&self) -> usize {
        self.fg_count
    }

    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt()
    }

    /// Contour pixels: foreground pixels with a 4-neighbor that is
    /// background, or out of bounds when `oob_is_background` holds.
    pub fn contour(&self, oob_is_background: bool) -> Vec<bool> {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = vec![false; self.bits.len()];
        for y in 0..h {
            for x in 0..w {
                if !self.get(x as usize, y as usize) {
                    continue;
                }
                let mut on_contour = false;
                for (dx, dy) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        if oob_is_background {
                            on_contour = true;
                            break;
                        }
                    } else if !self.get(nx as usize, ny as usize) {
                        on_contour = true;
                        break;
                    }
                }
                if on_contour {
                    out[(y * w + x) as usize] = true;
                }
            }
        }
        out
    }

    fn morph3(&self, dilate: bool) -> Mask {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut bits = vec![false; self.bits.len()];
        for y in 0..h {
            for x in 0..w {
                // Out of bounds counts as background for both operators.
                let mut acc = !dilate;
                'probe: for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let (nx, ny) = (x + dx, y + dy);
                        let v = if nx < 0 || ny < 0 || nx >= w || ny >= h {
                            false
                        } else {
                            self.get(nx as usize, ny as usize)
                        };
                        if dilate && v {
                            acc = true;
                            break 'probe;
                        }
                        if !dilate && !v {
                            acc = false;
                            break 'probe;
                        }
                    }
                }
                bits[(y * w + x) as usize] = acc;
            }
        }
        Mask::new(self.width, self.height, bits).expect("dims unchanged")
    }

    /// Morphological dilation with a 3x3 square structuring element.
    pub fn dilate3(&self) -> Mask {
        self.morph3(true)
    }

    /// Morphological erosion with a 3x3 square structuring element.
    pub fn erode3(&self) -> Mask {
        self.morph3(false)
    }

    /// Pixelwise set difference: self AND NOT other.
    pub fn difference(&self, other: &Mask) -> Result<Mask> {
        check_same_dims("mask difference", self.dims(), other.dims())?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| a && !b)
            .collect();
        Mask::new(self.width, self.height, bits)
    }
}

/// Real-valued raster. Predictions are clamped to [0, 1] at construction;
/// logits may hold any finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SoftMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::shape(format!("softmap dimensions {width}x{height}")));
        }
        if values.len() != width * height {
            return Err(Error::shape(format!(
                "softmap value count {} != {width}x{height}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::shape(format!("non-finite softmap value {v}")));
        }
        Ok(SoftMap { width, height, values })
    }

    /// Construction path for prediction-sourced maps: clamps into [0, 1].
    pub fn from_prediction(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let clamped = values
            .into_iter()
            .map(|v| if v.is_finite() { v.clamp(0.0, 1.0) } else { v })
            .collect();
        SoftMap::new(width, height, clamped)
    }

    pub fn from_mask(mask: &Mask) -> SoftMap {
        let values = mask.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        SoftMap {
            width: mask.width(),
            height: mask.height(),
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Foreground iff value >= threshold.
    pub fn binarize(&self, threshold: f64) -> Mask {
        let bits = self.values.iter().map(|&v| v >= threshold).collect();
        Mask::new(self.width, self.height, bits).expect("dims valid")
    }

    /// Bilinear resize (half-pixel-center convention).
    pub fn bilinear_resize(&self, new_width: usize, new_height: usize) -> SoftMap {
        let sx = self.width as f64 / new_width as f64;
        let sy = self.height as f64 / new_height as f64;
        let mut values = Vec::with_capacity(new_width * new_height);
        for y in 0..new_height {
            let src_y = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
            let y0 = src_y.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let fy = src_y - y0 as f64;
            for x in 0..new_width {
                let src_x = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
                let x0 = src_x.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let fx = src_x - x0 as f64;
                let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
                let bot = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
                values.push(top * (1.0 - fy) + bot * fy);
            }
        }
        SoftMap {
            width: new_width,
            height: new_height,
            values,
        }
    }

    fn gray_morph_disc(&self, radius: usize, dilate: bool) -> SoftMap {
        if radius == 0 {
            return self.clone();
        }
        let r = radius as isize;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    offsets.push((dx, dy));
                }
            }
        }
        let (w, h) = (self.width as isize, self.height as isize);
        let mut values = Vec::with_capacity(self.values.len());
        for y in 0..h {
            for x in 0..w {
                let mut acc = self.get(x as usize, y as usize);
                for &(dx, dy) in &offsets {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let v = self.get(nx as usize, ny as usize);
                    acc = if dilate { acc.max(v) } else { acc.min(v) };
                }
                values.push(acc);
            }
        }
        SoftMap {
            width: self.width,
            height: self.height,
            values,
        }
    }

    /// Grayscale dilation: max over a disc of the given radius.
    pub fn dilate_disc(&self, radius: usize) -> SoftMap {
        self.gray_morph_disc(radius, true)
    }

    /// Grayscale erosion: min over a disc of the given radius.
    pub fn erode_disc(&self, radius: usize) -> SoftMap {
        self.gray_morph_disc(radius, false)
    }
}

/// 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    intensities: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, intensities: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::shape(format!("image dimensions {width}x{height}")));
        }
        if intensities.len() != width * height {
            return Err(Error::shape(format!(
                "intensity count {} != {width}x{height}",
                intensities.len()
            )));
        }
        Ok(GrayImage { width, height, intensities })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut v = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                v.push(f(x, y));
            }
        }
        GrayImage::new(width, height, v)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.intensities[y * self.width + x]
    }

    pub fn intensities(&self) -> &[u8] {
        &self.intensities
    }

    pub fn gaussian_blur(&self, sigma: f64) -> GrayImage {
        let blurred = gaussian_blur_channel(&self.intensities, self.width, self.height, sigma);
        GrayImage {
            width: self.width,
            height: self.height,
            intensities: blurred,
        }
    }
}

/// 8-bit sRGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    rgb: Vec<[u8; 3]>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, rgb: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::shape(format!("image dimensions {width}x{height}")));
        }
        if rgb.len() != width * height {
            return Err(Error::shape(format!(
                "pixel count {} != {width}x{height}",
                rgb.len()
            )));
        }
        Ok(ColorImage { width, height, rgb })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut v = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                v.push(f(x, y));
            }
        }
        ColorImage::new(width, height, v)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.rgb[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.rgb
    }

    /// BT.601 luma, rounded to the nearest integer.
    pub fn to_gray(&self) -> GrayImage {
        let intensities = self
            .rgb
            .iter()
            .map(|&[r, g, b]| {
                let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
                y.round().clamp(0.0, 255.0) as u8
            })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            intensities,
        }
    }

    pub fn gaussian_blur(&self, sigma: f64) -> ColorImage {
        let mut channels = [vec![], vec![], vec![]];
        for c in 0..3 {
            let plane: Vec<u8> = self.rgb.iter().map(|p| p[c]).collect();
            channels[c] = gaussian_blur_channel(&plane, self.width, self.height, sigma);
        }
        let rgb = (0..self.rgb.len())
            .map(|i| [channels[0][i], channels[1][i], channels[2][i]])
            .collect();
        ColorImage {
            width: self.width,
            height: self.height,
            rgb,
        }
    }
}

/// Separable Gaussian blur with replicate padding; radius = ceil(3 sigma).
fn gaussian_blur_channel(plane: &[u8], width: usize, height: usize, sigma: f64) -> Vec<u8> {
    assert!(sigma > 0.0);
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
    for i in -radius..=radius {
        kernel.push((-((i * i) as f64) / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= norm;
    }

    let (w, h) = (width as isize, height as isize);
    let mut tmp = vec![0.0f64; plane.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sx = (x + ki as isize - radius).clamp(0, w - 1);
                acc += k * plane[(y * w + sx) as usize] as f64;
            }
            tmp[(y * w + x) as usize] = acc;
        }
    }
    let mut out = vec![0u8; plane.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sy = (y + ki as isize - radius).clamp(0, h - 1);
                acc += k * tmp[(sy * w + x) as usize];
            }
            out[(y * w + x) as usize] = acc.round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_rejects_zero_dims_and_bad_counts() {
        assert!(Mask::new(0, 4, vec![]).is_err());
        assert!(Mask::new(2, 2, vec![true; 3]).is_err());
    }

    #[test]
    fn fg_count_cached() {
        let m = Mask::from_fn(4, 4, |x, y| x == y).unwrap();
        assert_eq!(m.fg_count(), 4);
    }

    #[test]
    fn contour_of_solid_square_is_its_ring() {
        // 5x5 with a 3x3 square at (1,1).
        let m = Mask::from_fn(5, 5, |x, y| (1..4).contains(&x) && (1..4).contains(&y)).unwrap();
        let c = m.contour(true);
        let ring: usize = c.iter().filter(|&&b| b).count();
        assert_eq!(ring, 8); // 3x3 minus the single interior pixel
        assert!(!c[2 * 5 + 2]);
    }

    #[test]
    fn contour_border_policy() {
        let full = Mask::filled(3, 3, true).unwrap();
        let with_border = full.contour(true);
        assert_eq!(with_border.iter().filter(|&&b| b).count(), 8);
        let without_border = full.contour(false);
        assert_eq!(without_border.iter().filter(|&&b| b).count(), 0);
    }

    #[test]
    fn dilate_erode_single_pixel() {
        let m = Mask::from_fn(7, 7, |x, y| x == 3 && y == 3).unwrap();
        assert_eq!(m.dilate3().fg_count(), 9);
        assert_eq!(m.erode3().fg_count(), 0);
    }

    #[test]
    fn softmap_rejects_non_finite() {
        assert!(SoftMap::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn prediction_clamps() {
        let s = SoftMap::from_prediction(2, 1, vec![-0.5, 1.5]).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0]);
    }

    #[test]
    fn binarize_threshold_inclusive() {
        let s = SoftMap::new(3, 1, vec![0.49, 0.5, 0.51]).unwrap();
        let m = s.binarize(0.5);
        assert_eq!(m.bits(), &[false, true, true]);
    }

    #[test]
    fn bilinear_resize_constant_is_constant() {
        let s = SoftMap::new(8, 8, vec![0.75; 64]).unwrap();
        let up = s.bilinear_resize(16, 16);
        assert!(up.values().iter().all(|&v| (v - 0.75).abs() < 1e-12));
    }

    #[test]
    fn gray_morph_radius_zero_is_identity() {
        let s = SoftMap::new(4, 4, (0..16).map(|i| i as f64 / 15.0).collect()).unwrap();
        assert_eq!(s.dilate_disc(0), s);
        assert_eq!(s.erode_disc(0), s);
    }

    #[test]
    fn luma_of_gray_pixels_is_identity() {
        let img = ColorImage::from_fn(3, 1, |x, _| [(x * 100) as u8; 3]).unwrap();
        let g = img.to_gray();
        assert_eq!(g.intensities(), &[0, 100, 200]);
    }

    #[test]
    fn blur_preserves_constant_images() {
        let img = GrayImage::from_fn(10, 10, |_, _| 77).unwrap();
        let b = img.gaussian_blur(3.0);
        assert!(b.intensities().iter().all(|&v| v == 77));
    }
}
