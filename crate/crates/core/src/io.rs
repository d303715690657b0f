//! Image file I/O: PNG (8-bit gray or RGB) and PGM/PPM.

use std::path::Path;

use image::{DynamicImage, ImageReader};

use crate::error::{Error, Result};
use crate::raster::{ColorImage, GrayImage, Mask, SoftMap};

fn open(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    reader.decode().map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Loads a binary mask from an 8-bit grayscale file. A pixel is foreground
/// iff its intensity >= threshold.
pub fn load_mask(path: &Path, threshold: u8) -> Result<Mask> {
    let gray = load_gray(path)?;
    let bits = gray.intensities().iter().map(|&v| v >= threshold).collect();
    Mask::new(gray.width(), gray.height(), bits)
}

/// Loads an 8-bit grayscale image; non-grayscale inputs are rejected.
pub fn load_gray(path: &Path) -> Result<GrayImage> {
    match open(path)? {
        DynamicImage::ImageLuma8(img) => {
            GrayImage::new(img.width() as usize, img.height() as usize, img.into_raw())
        }
        other => Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("expected 8-bit grayscale, got {:?}", other.color()),
        }),
    }
}

/// Loads an sRGB color image; 8-bit grayscale inputs are replicated into
/// three channels.
pub fn load_color(path: &Path) -> Result<ColorImage> {
    match open(path)? {
        DynamicImage::ImageLuma8(img) => {
            let rgb = img.as_raw().iter().map(|&v| [v, v, v]).collect();
            ColorImage::new(img.width() as usize, img.height() as usize, rgb)
        }
        DynamicImage::ImageRgb8(img) => {
            let rgb = img.as_raw().chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
            ColorImage::new(img.width() as usize, img.height() as usize, rgb)
        }
        DynamicImage::ImageRgba8(img) => {
            let rgb = img.as_raw().chunks_exact(4).map(|c| [c[0], c[1], c[2]]).collect();
            ColorImage::new(img.width() as usize, img.height() as usize, rgb)
        }
        other => Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("unsupported color type {:?}", other.color()),
        }),
    }
}

/// Loads a prediction map: 8-bit grayscale scaled into [0, 1].
pub fn load_softmap(path: &Path) -> Result<SoftMap> {
    let gray = load_gray(path)?;
    let values = gray.intensities().iter().map(|&v| v as f64 / 255.0).collect();
    SoftMap::from_prediction(gray.width(), gray.height(), values)
}

fn save_gray_buffer(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    image::save_buffer(
        path,
        data,
        width as u32,
        height as u32,
        image::ColorType::L8,
    )
    .map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Writes an sRGB image; format chosen by extension (.png/.ppm).
pub fn save_color(path: &Path, img: &ColorImage) -> Result<()> {
    let data: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    image::save_buffer(
        path,
        &data,
        img.width() as u32,
        img.height() as u32,
        image::ColorType::Rgb8,
    )
    .map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Writes a mask as 0/255 grayscale; format chosen by extension (.png/.pgm).
pub fn save_mask(path: &Path, mask: &Mask) -> Result<()> {
    let data: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    save_gray_buffer(path, mask.width(), mask.height(), &data)
}

/// Writes a soft map as 8-bit grayscale, values scaled by 255 and rounded.
pub fn save_softmap(path: &Path, map: &SoftMap) -> Result<()> {
    let data: Vec<u8> = map
        .values()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    save_gray_buffer(path, map.width(), map.height(), &data)
}
