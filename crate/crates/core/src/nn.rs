//! Minimal dense/conv kernels shared by the feature-mining and decoder
//! forward passes. Everything is plain f64 with no hidden state; weights
//! are seeded uniform in [-k, k] with k = 1/sqrt(fan_in), biases zero.

use crate::error::{Error, Result};
use crate::feature::FeatureMap;
use crate::rng::Rng;

#[inline]
pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// In-place softmax; returns |sum - 1| after normalization as a
/// diagnostic for row-stochasticity checks.
pub fn softmax_in_place(row: &mut [f64]) -> f64 {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
    (row.iter().sum::<f64>() - 1.0).abs()
}

#[derive(Debug, Clone)]
pub struct TensorInfo {
    pub name: String,
    pub shape: Vec<usize>,
}

/// Single traversal point for saving, loading, and counting parameters.
pub enum Walker<'a> {
    Save {
        manifest: &'a mut Vec<TensorInfo>,
        values: &'a mut Vec<f32>,
    },
    Load {
        values: &'a [f32],
        pos: &'a mut usize,
    },
    Count(&'a mut usize),
}

impl Walker<'_> {
    pub fn tensor(&mut self, name: String, shape: Vec<usize>, data: &mut [f64]) -> Result<()> {
        let n: usize = shape.iter().product();
        debug_assert_eq!(n, data.len());
        match self {
            Walker::Save { manifest, values } => {
                manifest.push(TensorInfo { name, shape });
                values.extend(data.iter().map(|&v| v as f32));
            }
            Walker::Load { values, pos } => {
                if **pos + n > values.len() {
                    return Err(Error::Config(format!(
                        "weight file underrun loading {name}: need {n} at {}",
                        **pos
                    )));
                }
                for (d, &s) in data.iter_mut().zip(&values[**pos..**pos + n]) {
                    *d = s as f64;
                }
                **pos += n;
            }
            Walker::Count(count) => {
                **count += n;
            }
        }
        Ok(())
    }
}

pub trait Module {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()>;

    fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.walk("", &mut Walker::Count(&mut n)).expect("count never fails");
        n
    }
}

#[derive(Debug, Clone)]
pub struct Linear {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weight: Vec<f64>, // row-major: out_dim rows of in_dim
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn build(in_dim: usize, out_dim: usize, rng: &mut Rng) -> Linear {
        let k = 1.0 / (in_dim as f64).sqrt();
        let weight = (0..in_dim * out_dim).map(|_| rng.uniform_symmetric(k)).collect();
        Linear {
            in_dim,
            out_dim,
            weight,
            bias: vec![0.0; out_dim],
        }
    }

    /// Identity map; requires in_dim == out_dim.
    pub fn identity(dim: usize) -> Linear {
        let mut weight = vec![0.0; dim * dim];
        for i in 0..dim {
            weight[i * dim + i] = 1.0;
        }
        Linear {
            in_dim: dim,
            out_dim: dim,
            weight,
            bias: vec![0.0; dim],
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        let mut out = self.bias.clone();
        for (o, out_v) in out.iter_mut().enumerate() {
            let row = &self.weight[o * self.in_dim..(o + 1) * self.in_dim];
            *out_v += row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        out
    }
}

impl Module for Linear {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        w.tensor(
            format!("{prefix}.weight"),
            vec![self.out_dim, self.in_dim],
            &mut self.weight,
        )?;
        w.tensor(format!("{prefix}.bias"), vec![self.out_dim], &mut self.bias)
    }
}

#[derive(Debug, Clone)]
pub struct LayerNorm {
    pub dim: usize,
    pub scale: Vec<f64>,
    pub bias: Vec<f64>,
    pub eps: f64,
}

impl LayerNorm {
    pub fn build(dim: usize) -> LayerNorm {
        LayerNorm {
            dim,
            scale: vec![1.0; dim],
            bias: vec![0.0; dim],
            eps: 1e-6,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let mean = x.iter().sum::<f64>() / self.dim as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / self.dim as f64;
        let inv = 1.0 / (var + self.eps).sqrt();
        x.iter()
            .zip(self.scale.iter().zip(&self.bias))
            .map(|(v, (s, b))| (v - mean) * inv * s + b)
            .collect()
    }
}

impl Module for LayerNorm {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        w.tensor(format!("{prefix}.scale"), vec![self.dim], &mut self.scale)?;
        w.tensor(format!("{prefix}.bias"), vec![self.dim], &mut self.bias)
    }
}

/// Stride-1 convolution with same-size zero padding; odd kernel size.
#[derive(Debug, Clone)]
pub struct Conv2d {
    pub in_ch: usize,
    pub out_ch: usize,
    pub ksize: usize,
    pub weight: Vec<f64>, // [out][in][ky][kx]
    pub bias: Vec<f64>,
}

impl Conv2d {
    pub fn build(in_ch: usize, out_ch: usize, ksize: usize, rng: &mut Rng) -> Conv2d {
        assert!(ksize % 2 == 1);
        let fan_in = in_ch * ksize * ksize;
        let k = 1.0 / (fan_in as f64).sqrt();
        let weight = (0..out_ch * fan_in).map(|_| rng.uniform_symmetric(k)).collect();
        Conv2d {
            in_ch,
            out_ch,
            ksize,
            weight,
            bias: vec![0.0; out_ch],
        }
    }

    pub fn forward(&self, input: &FeatureMap) -> Result<FeatureMap> {
        if input.channels() != self.in_ch {
            return Err(Error::shape(format!(
                "conv input channels {} != {}",
                input.channels(),
                self.in_ch
            )));
        }
        let (h, w) = (input.height(), input.width());
        let pad = (self.ksize / 2) as isize;
        let mut out = FeatureMap::zeros(h, w, self.out_ch);
        let ks = self.ksize;
        for y in 0..h {
            for x in 0..w {
                for oc in 0..self.out_ch {
                    let mut acc = self.bias[oc];
                    let wbase = oc * self.in_ch * ks * ks;
                    for ky in 0..ks {
                        let sy = y as isize + ky as isize - pad;
                        if sy < 0 || sy >= h as isize {
                            continue;
                        }
                        for kx in 0..ks {
                            let sx = x as isize + kx as isize - pad;
                            if sx < 0 || sx >= w as isize {
                                continue;
                            }
                            let px = input.pixel(sy as usize, sx as usize);
                            for (ic, v) in px.iter().enumerate() {
                                acc += v * self.weight[wbase + (ic * ks + ky) * ks + kx];
                            }
                        }
                    }
                    out.set(y, x, oc, acc);
                }
            }
        }
        Ok(out)
    }
}

impl Module for Conv2d {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        w.tensor(
            format!("{prefix}.weight"),
            vec![self.out_ch, self.in_ch, self.ksize, self.ksize],
            &mut self.weight,
        )?;
        w.tensor(format!("{prefix}.bias"), vec![self.out_ch], &mut self.bias)
    }
}

/// 2x2 stride-2 transposed convolution: exact x2 upsampling.
#[derive(Debug, Clone)]
pub struct ConvTranspose2x2 {
    pub in_ch: usize,
    pub out_ch: usize,
    pub weight: Vec<f64>, // [in][out][ky][kx]
    pub bias: Vec<f64>,
}

impl ConvTranspose2x2 {
    pub fn build(in_ch: usize, out_ch: usize, rng: &mut Rng) -> ConvTranspose2x2 {
        let fan_in = in_ch * 4;
        let k = 1.0 / (fan_in as f64).sqrt();
        let weight = (0..in_ch * out_ch * 4).map(|_| rng.uniform_symmetric(k)).collect();
        ConvTranspose2x2 {
            in_ch,
            out_ch,
            weight,
            bias: vec![0.0; out_ch],
        }
    }

    pub fn forward(&self, input: &FeatureMap) -> Result<FeatureMap> {
        if input.channels() != self.in_ch {
            return Err(Error::shape(format!(
                "deconv input channels {} != {}",
                input.channels(),
                self.in_ch
            )));
        }
        let (h, w) = (input.height(), input.width());
        let mut out = FeatureMap::zeros(h * 2, w * 2, self.out_ch);
        for y in 0..h {
            for x in 0..w {
                let px = input.pixel(y, x);
                for ky in 0..2 {
                    for kx in 0..2 {
                        for oc in 0..self.out_ch {
                            let mut acc = 0.0;
                            for (ic, v) in px.iter().enumerate() {
                                acc += v * self.weight[((ic * self.out_ch + oc) * 2 + ky) * 2 + kx];
                            }
                            let cur = out.get(y * 2 + ky, x * 2 + kx, oc);
                            out.set(y * 2 + ky, x * 2 + kx, oc, cur + acc);
                        }
                    }
                }
            }
        }
        // Bias applied once per output cell.
        for y in 0..h * 2 {
            for x in 0..w * 2 {
                for oc in 0..self.out_ch {
                    let cur = out.get(y, x, oc);
                    out.set(y, x, oc, cur + self.bias[oc]);
                }
            }
        }
        Ok(out)
    }
}

impl Module for ConvTranspose2x2 {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        w.tensor(
            format!("{prefix}.weight"),
            vec![self.in_ch, self.out_ch, 2, 2],
            &mut self.weight,
        )?;
        w.tensor(format!("{prefix}.bias"), vec![self.out_ch], &mut self.bias)
    }
}

/// Fully-connected stack with ReLU between layers (none after the last).
#[derive(Debug, Clone)]
pub struct Mlp {
    pub layers: Vec<Linear>,
}

impl Mlp {
    pub fn build(dims: &[usize], rng: &mut Rng) -> Mlp {
        assert!(dims.len() >= 2);
        let layers = dims
            .windows(2)
            .map(|w| Linear::build(w[0], w[1], rng))
            .collect();
        Mlp { layers }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut cur = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            cur = layer.forward(&cur);
            if i != last {
                for v in cur.iter_mut() {
                    *v = relu(*v);
                }
            }
        }
        cur
    }
}

impl Module for Mlp {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        for (i, layer) in self.layers.iter_mut().enumerate() {
            layer.walk(&format!("{prefix}.{i}"), w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_rows_are_stochastic() {
        let mut row = vec![1.0, -2.0, 0.5, 3.0];
        let dev = softmax_in_place(&mut row);
        assert!(dev < 1e-12);
        assert!(row.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn linear_identity_passthrough() {
        let l = Linear::identity(3);
        assert_eq!(l.forward(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn layernorm_is_standardized() {
        let ln = LayerNorm::build(4);
        let y = ln.forward(&[1.0, 2.0, 3.0, 4.0]);
        let mean: f64 = y.iter().sum::<f64>() / 4.0;
        let var: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-3); // eps shrinks it slightly
    }

    #[test]
    fn conv_zero_input_zero_output() {
        let mut rng = Rng::new(1);
        let conv = Conv2d::build(3, 2, 3, &mut rng);
        let z = FeatureMap::zeros(4, 4, 3);
        let out = conv.forward(&z).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deconv_doubles_resolution() {
        let mut rng = Rng::new(2);
        let up = ConvTranspose2x2::build(2, 3, &mut rng);
        let input = FeatureMap::from_fn(3, 5, 2, |y, x, c| (y + x + c) as f64).unwrap();
        let out = up.forward(&input).unwrap();
        assert_eq!(out.shape(), (6, 10, 3));
    }

    #[test]
    fn walker_save_load_roundtrip() {
        let mut rng = Rng::new(3);
        let mut a = Linear::build(5, 4, &mut rng);
        let mut manifest = Vec::new();
        let mut values = Vec::new();
        a.walk("lin", &mut Walker::Save { manifest: &mut manifest, values: &mut values })
            .unwrap();
        assert_eq!(manifest.len(), 2);
        assert_eq!(values.len(), 24);

        let mut b = Linear::build(5, 4, &mut Rng::new(99));
        let mut pos = 0;
        b.walk("lin", &mut Walker::Load { values: &values, pos: &mut pos }).unwrap();
        assert_eq!(pos, 24);
        // f32 round trip loses some precision but must be stable.
        for (x, y) in a.weight.iter().zip(&b.weight) {
            assert!((*x as f32 - *y as f32).abs() == 0.0);
        }
        assert_eq!(a.param_count(), 24);
    }
}
