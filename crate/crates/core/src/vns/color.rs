//! sRGB (D65) to CIE L*a*b*.

use crate::raster::ColorImage;

// See http://www.brucelindbloom.com/LContinuity.html for these two.
const KAPPA: f64 = 24389.0 / 27.0;
const EPSILON: f64 = 216.0 / 24389.0;

const D65: [f64; 3] = [0.95047, 1.0, 1.08883];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

#[inline]
fn gamma_decode(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

pub fn srgb_to_lab(rgb: [u8; 3]) -> Lab {
    let r = gamma_decode(rgb[0]);
    let g = gamma_decode(rgb[1]);
    let b = gamma_decode(rgb[2]);

    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    let fx = lab_f(x / D65[0]);
    let fy = lab_f(y / D65[1]);
    let fz = lab_f(z / D65[2]);

    Lab {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Per-pixel LAB triples in raster order.
pub fn rgb_to_lab(img: &ColorImage) -> Vec<Lab> {
    img.pixels().iter().map(|&p| srgb_to_lab(p)).collect()
}
