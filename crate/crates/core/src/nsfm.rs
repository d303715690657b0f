//! Non-salient feature mining: Haar band selection over multi-level
//! encoder features, attention-gated aggregation, and synthesis of the
//! mask/edge feature maps consumed by the prediction layers.

use crate::error::{Error, Result};
use crate::feature::FeatureMap;
use crate::nn::{relu, sigmoid, Conv2d, ConvTranspose2x2, Mlp, Module, Walker};
use crate::rng::Rng;
use crate::wavelet::haar_dwt2;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NsfmConfig {
    /// Number of encoder levels feeding the module.
    pub levels: usize,
    /// Encoder grid size (must be even for the wavelet analysis).
    pub height: usize,
    pub width: usize,
    /// Channels per encoder level.
    pub in_channels: usize,
    /// Channels after the 1x1 reduction of the concatenated band stack.
    pub band_channels: usize,
    /// Channels of the produced mask/edge features.
    pub out_channels: usize,
    /// Channel-attention MLP reduction ratio.
    pub attention_reduction: usize,
}

impl NsfmConfig {
    pub fn paper_default() -> NsfmConfig {
        NsfmConfig {
            levels: 4,
            height: 64,
            width: 64,
            in_channels: 256,
            band_channels: 256,
            out_channels: 32,
            attention_reduction: 8,
        }
    }

    pub fn desk_default() -> NsfmConfig {
        NsfmConfig {
            levels: 4,
            height: 16,
            width: 16,
            in_channels: 32,
            band_channels: 32,
            out_channels: 32,
            attention_reduction: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.in_channels == 0 || self.band_channels == 0 || self.out_channels == 0 {
            return Err(Error::config("nsfm config has a zero dimension"));
        }
        if self.height % 2 != 0 || self.width % 2 != 0 {
            return Err(Error::config(format!(
                "nsfm grid {}x{} must be even",
                self.height, self.width
            )));
        }
        if self.band_channels % self.attention_reduction != 0 {
            return Err(Error::config(format!(
                "attention reduction {} must divide band channels {}",
                self.attention_reduction, self.band_channels
            )));
        }
        Ok(())
    }
}

/// Channel-then-spatial attention over the reduced band stack.
#[derive(Debug, Clone)]
pub struct BandAggregator {
    reduce: Conv2d,
    channel_mlp: Mlp,
    spatial_conv: Conv2d,
}

/// Gate values recorded during aggregation; both sets live strictly
/// inside (0, 1) for finite inputs.
#[derive(Debug, Clone)]
pub struct GateTrace {
    pub channel_gates: Vec<f64>,
    pub spatial_gates: Vec<f64>,
}

impl BandAggregator {
    fn build(cfg: &NsfmConfig, rng: &mut Rng) -> BandAggregator {
        let reduced = cfg.band_channels / cfg.attention_reduction;
        BandAggregator {
            reduce: Conv2d::build(cfg.levels * cfg.in_channels, cfg.band_channels, 1, rng),
            channel_mlp: Mlp::build(&[cfg.band_channels, reduced, cfg.band_channels], rng),
            spatial_conv: Conv2d::build(2, 1, 7, rng),
        }
    }

    pub fn forward(&self, components: &[FeatureMap]) -> Result<(FeatureMap, GateTrace)> {
        let refs: Vec<&FeatureMap> = components.iter().collect();
        let stacked = FeatureMap::concat_channels(&refs)?;
        let reduced = self.reduce.forward(&stacked)?;
        let (h, w, c) = reduced.shape();
        let hw = (h * w) as f64;

        // Channel attention: shared MLP over global average and max pools.
        let mut avg_pool = vec![0.0; c];
        let mut max_pool = vec![f64::NEG_INFINITY; c];
        for y in 0..h {
            for x in 0..w {
                for (ch, &v) in reduced.pixel(y, x).iter().enumerate() {
                    avg_pool[ch] += v;
                    if v > max_pool[ch] {
                        max_pool[ch] = v;
                    }
                }
            }
        }
        for v in avg_pool.iter_mut() {
            *v /= hw;
        }
        let a = self.channel_mlp.forward(&avg_pool);
        let m = self.channel_mlp.forward(&max_pool);
        let channel_gates: Vec<f64> = a.iter().zip(&m).map(|(x, y)| sigmoid(x + y)).collect();

        let mut gated = reduced.clone();
        for y in 0..h {
            for x in 0..w {
                for ch in 0..c {
                    gated.set(y, x, ch, gated.get(y, x, ch) * channel_gates[ch]);
                }
            }
        }

        // Spatial attention: 7x7 conv over channel-wise mean/max maps.
        let mut pooled = FeatureMap::zeros(h, w, 2);
        for y in 0..h {
            for x in 0..w {
                let px = gated.pixel(y, x);
                let mean = px.iter().sum::<f64>() / c as f64;
                let max = px.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                pooled.set(y, x, 0, mean);
                pooled.set(y, x, 1, max);
            }
        }
        let logits = self.spatial_conv.forward(&pooled)?;
        let mut spatial_gates = Vec::with_capacity(h * w);
        let mut out = gated.clone();
        for y in 0..h {
            for x in 0..w {
                let gate = sigmoid(logits.get(y, x, 0));
                spatial_gates.push(gate);
                for ch in 0..c {
                    out.set(y, x, ch, out.get(y, x, ch) * gate);
                }
            }
        }
        Ok((out, GateTrace { channel_gates, spatial_gates }))
    }

    /// Plain reduction with both gates bypassed; test hook for the
    /// gate-neutral equivalence check.
    pub fn reduce_only(&self, components: &[FeatureMap]) -> Result<FeatureMap> {
        let refs: Vec<&FeatureMap> = components.iter().collect();
        self.reduce.forward(&FeatureMap::concat_channels(&refs)?)
    }

    /// Forces both sigmoid gates towards 1 by loading large positive
    /// biases; used by the bypass oracle.
    pub fn saturate_gates(&mut self) {
        if let Some(last) = self.channel_mlp.layers.last_mut() {
            for b in last.bias.iter_mut() {
                *b = 60.0;
            }
            for w in last.weight.iter_mut() {
                *w = 0.0;
            }
        }
        for w in self.spatial_conv.weight.iter_mut() {
            *w = 0.0;
        }
        for b in self.spatial_conv.bias.iter_mut() {
            *b = 60.0;
        }
    }
}

impl Module for BandAggregator {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.reduce.walk(&format!("{prefix}.reduce"), w)?;
        self.channel_mlp.walk(&format!("{prefix}.channel_mlp"), w)?;
        self.spatial_conv.walk(&format!("{prefix}.spatial_conv"), w)
    }
}

/// One band path: aggregation, fusion with the shallow level, and the
/// learned x4 upsampling to the prediction resolution.
#[derive(Debug, Clone)]
struct BandPath {
    agg: BandAggregator,
    fuse: Conv2d,
    up1: ConvTranspose2x2,
    up2: ConvTranspose2x2,
}

impl BandPath {
    fn build(cfg: &NsfmConfig, rng: &mut Rng) -> BandPath {
        let mid = (cfg.band_channels / 2).max(1);
        BandPath {
            agg: BandAggregator::build(cfg, rng),
            fuse: Conv2d::build(cfg.in_channels + cfg.band_channels, cfg.band_channels, 1, rng),
            up1: ConvTranspose2x2::build(cfg.band_channels, mid, rng),
            up2: ConvTranspose2x2::build(mid, cfg.out_channels, rng),
        }
    }

    fn forward(&self, shallow: &FeatureMap, components: &[FeatureMap]) -> Result<FeatureMap> {
        let (agg, _) = self.agg.forward(components)?;
        let agg_up = agg.bilinear_upsample(2);
        let fused = self
            .fuse
            .forward(&FeatureMap::concat_channels(&[shallow, &agg_up])?)?;
        let merged = fused.add(&agg_up)?;
        let mut mid = self.up1.forward(&merged)?;
        for v in mid.values_mut() {
            *v = relu(*v);
        }
        self.up2.forward(&mid)
    }
}

impl Module for BandPath {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.agg.walk(&format!("{prefix}.agg"), w)?;
        self.fuse.walk(&format!("{prefix}.fuse"), w)?;
        self.up1.walk(&format!("{prefix}.up1"), w)?;
        self.up2.walk(&format!("{prefix}.up2"), w)
    }
}

#[derive(Debug, Clone)]
pub struct NsfmWeights {
    pub config: NsfmConfig,
    hh_path: BandPath,
    ll_path: BandPath,
}

impl NsfmWeights {
    /// Seeded construction: kernels uniform in [-1/sqrt(fan_in), ..],
    /// biases zero.
    pub fn seeded(config: &NsfmConfig, rng: &mut Rng) -> Result<NsfmWeights> {
        config.validate()?;
        Ok(NsfmWeights {
            config: config.clone(),
            hh_path: BandPath::build(config, rng),
            ll_path: BandPath::build(config, rng),
        })
    }

    /// Test hook: saturates every attention gate so scaling is neutral.
    pub fn ll_aggregator_mut(&mut self) -> &mut BandAggregator {
        &mut self.ll_path.agg
    }

    pub fn hh_aggregator_mut(&mut self) -> &mut BandAggregator {
        &mut self.hh_path.agg
    }

    pub fn ll_aggregator(&self) -> &BandAggregator {
        &self.ll_path.agg
    }
}

impl Module for NsfmWeights {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.hh_path.walk(&format!("{prefix}hh"), w)?;
        self.ll_path.walk(&format!("{prefix}ll"), w)
    }
}

/// Attention-gated aggregation of four same-band components.
pub fn aggregate_band(components: &[FeatureMap], agg: &BandAggregator) -> Result<FeatureMap> {
    let shape = components
        .first()
        .ok_or_else(|| Error::shape("aggregate_band needs components"))?
        .shape();
    for c in components {
        if c.shape() != shape {
            return Err(Error::shape(format!(
                "aggregate_band shapes {:?} vs {shape:?}",
                c.shape()
            )));
        }
    }
    Ok(agg.forward(components)?.0)
}

/// Full mining pass: decompose each level, aggregate the HH and LL bands,
/// fuse with the shallowest level, and synthesize the edge (HH) and mask
/// (LL) features at 4x the encoder resolution.
pub fn nsfm_forward(levels: &[FeatureMap], w: &NsfmWeights) -> Result<(FeatureMap, FeatureMap)> {
    let cfg = &w.config;
    if levels.len() != cfg.levels {
        return Err(Error::shape(format!(
            "nsfm expects {} levels, got {}",
            cfg.levels,
            levels.len()
        )));
    }
    let expect = (cfg.height, cfg.width, cfg.in_channels);
    for (i, f) in levels.iter().enumerate() {
        if f.shape() != expect {
            return Err(Error::shape(format!(
                "level {i} shape {:?} != {expect:?}",
                f.shape()
            )));
        }
    }

    let mut hh = Vec::with_capacity(levels.len());
    let mut ll = Vec::with_capacity(levels.len());
    for f in levels {
        let bands = haar_dwt2(f)?;
        hh.push(bands.hh);
        ll.push(bands.ll);
    }

    let f_eg = w.hh_path.forward(&levels[0], &hh)?;
    let f_mk = w.ll_path.forward(&levels[0], &ll)?;
    Ok((f_mk, f_eg))
}
