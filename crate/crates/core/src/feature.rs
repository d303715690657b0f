//! Dense H x W x C feature maps (row-major, channel-interleaved).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<f64>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::shape(format!(
                "feature map dimensions {height}x{width}x{channels}"
            )));
        }
        if values.len() != height * width * channels {
            return Err(Error::shape(format!(
                "feature value count {} != {height}x{width}x{channels}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::shape(format!("non-finite feature value {v}")));
        }
        Ok(FeatureMap { height, width, channels, values })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> FeatureMap {
        FeatureMap {
            height,
            width,
            channels,
            values: vec![0.0; height * width * channels],
        }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<FeatureMap> {
        let mut values = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    values.push(f(y, x, c));
                }
            }
        }
        FeatureMap::new(height, width, channels, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.values[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, v: f64) {
        self.values[(y * self.width + x) * self.channels + c] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Pixel slice: all channels at (y, x).
    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> &[f64] {
        let base = (y * self.width + x) * self.channels;
        &self.values[base..base + self.channels]
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Bilinear upsample by an integer factor (half-pixel centers).
    pub fn bilinear_upsample(&self, factor: usize) -> FeatureMap {
        assert!(factor >= 1);
        let nh = self.height * factor;
        let nw = self.width * factor;
        let mut out = FeatureMap::zeros(nh, nw, self.channels);
        let sy = 1.0 / factor as f64;
        for y in 0..nh {
            let src_y = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
            let y0 = src_y.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let fy = src_y - y0 as f64;
            for x in 0..nw {
                let src_x = ((x as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.width - 1) as f64);
                let x0 = src_x.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let fx = src_x - x0 as f64;
                for c in 0..self.channels {
                    let top = self.get(y0, x0, c) * (1.0 - fx) + self.get(y0, x1, c) * fx;
                    let bot = self.get(y1, x0, c) * (1.0 - fx) + self.get(y1, x1, c) * fx;
                    out.set(y, x, c, top * (1.0 - fy) + bot * fy);
                }
            }
        }
        out
    }

    /// Channel concatenation of several maps with equal spatial size.
    pub fn concat_channels(maps: &[&FeatureMap]) -> Result<FeatureMap> {
        let (h, w) = (maps[0].height, maps[0].width);
        let mut channels = 0;
        for m in maps {
            if m.height != h || m.width != w {
                return Err(Error::shape(format!(
                    "concat: {}x{} vs {h}x{w}",
                    m.height, m.width
                )));
            }
            channels += m.channels;
        }
        let mut values = Vec::with_capacity(h * w * channels);
        for y in 0..h {
            for x in 0..w {
                for m in maps {
                    values.extend_from_slice(m.pixel(y, x));
                }
            }
        }
        FeatureMap::new(h, w, channels, values)
    }

    pub fn add(&self, other: &FeatureMap) -> Result<FeatureMap> {
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "add: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        FeatureMap::new(self.height, self.width, self.channels, values)
    }
}
