//! Mask-edge token interactive decoder: two two-way transformer layers
//! over tokens and image embedding, token fusion after each layer, and
//! dual-level mask/edge prediction heads.

use crate::error::{Error, Result};
use crate::feature::FeatureMap;
use crate::nn::{relu, softmax_in_place, Conv2d, ConvTranspose2x2, LayerNorm, Linear, Mlp, Module, Walker};
use crate::raster::SoftMap;
use crate::rng::Rng;
use crate::token::{TokenRole, TokenSet};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecoderConfig {
    /// Token and embedding channel dimension.
    pub token_dim: usize,
    pub num_heads: usize,
    pub ffn_dim: usize,
    /// Embedding grid; predictions come out at 4x this size.
    pub emb_height: usize,
    pub emb_width: usize,
    /// Channels of the upscaled embedding (and of the fused features the
    /// token MLPs dot against).
    pub upscaled_channels: usize,
    /// Channels of the mined mask/edge features.
    pub vns_channels: usize,
    /// Hidden width of the final 3x3/1x1 fusion stack in the mask head.
    pub mask_fusion_hidden: usize,
}

impl DecoderConfig {
    pub fn paper_default() -> DecoderConfig {
        DecoderConfig {
            token_dim: 256,
            num_heads: 8,
            ffn_dim: 2048,
            emb_height: 64,
            emb_width: 64,
            upscaled_channels: 32,
            vns_channels: 32,
            mask_fusion_hidden: 16,
        }
    }

    pub fn desk_default() -> DecoderConfig {
        DecoderConfig {
            emb_height: 16,
            emb_width: 16,
            ..DecoderConfig::paper_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.token_dim == 0 || self.num_heads == 0 {
            return Err(Error::config("decoder dims must be positive"));
        }
        if self.token_dim % self.num_heads != 0 {
            return Err(Error::config(format!(
                "head count {} must divide token dim {}",
                self.num_heads, self.token_dim
            )));
        }
        if self.token_dim % 4 != 0 {
            return Err(Error::config("token dim must be divisible by 4 for upscaling"));
        }
        if self.token_dim % 2 != 0 {
            return Err(Error::config("token dim must be even for positional encoding"));
        }
        Ok(())
    }
}

/// Running diagnostics collected over a forward pass.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct ForwardTrace {
    /// Largest |row sum - 1| over every softmax row evaluated.
    pub max_softmax_row_dev: f64,
    /// Number of softmax rows evaluated.
    pub softmax_rows: usize,
}

impl ForwardTrace {
    fn absorb(&mut self, dev: f64) {
        if dev > self.max_softmax_row_dev {
            self.max_softmax_row_dev = dev;
        }
        self.softmax_rows += 1;
    }
}

#[derive(Debug, Clone)]
pub struct Attention {
    pub q: Linear,
    pub k: Linear,
    pub v: Linear,
    pub out: Linear,
    num_heads: usize,
}

impl Attention {
    fn build(dim: usize, num_heads: usize, rng: &mut Rng) -> Attention {
        Attention {
            q: Linear::build(dim, dim, rng),
            k: Linear::build(dim, dim, rng),
            v: Linear::build(dim, dim, rng),
            out: Linear::build(dim, dim, rng),
            num_heads,
        }
    }

    /// Multi-head attention of queries over keys/values (row vectors).
    fn forward(&self, queries: &[Vec<f64>], keys: &[Vec<f64>], trace: &mut ForwardTrace) -> Vec<Vec<f64>> {
        let dim = self.q.out_dim;
        let head = dim / self.num_heads;
        let scale = 1.0 / (head as f64).sqrt();

        let qp: Vec<Vec<f64>> = queries.iter().map(|t| self.q.forward(t)).collect();
        let kp: Vec<Vec<f64>> = keys.iter().map(|t| self.k.forward(t)).collect();
        let vp: Vec<Vec<f64>> = keys.iter().map(|t| self.v.forward(t)).collect();

        let mut merged = vec![vec![0.0; dim]; queries.len()];
        let mut row = vec![0.0; keys.len()];
        for (qi, q_vec) in qp.iter().enumerate() {
            for h in 0..self.num_heads {
                let base = h * head;
                for (ki, k_vec) in kp.iter().enumerate() {
                    let mut dot = 0.0;
                    for d in 0..head {
                        dot += q_vec[base + d] * k_vec[base + d];
                    }
                    row[ki] = dot * scale;
                }
                trace.absorb(softmax_in_place(&mut row));
                for (ki, &w) in row.iter().enumerate() {
                    let v_vec = &vp[ki];
                    for d in 0..head {
                        merged[qi][base + d] += w * v_vec[base + d];
                    }
                }
            }
        }
        merged.iter().map(|m| self.out.forward(m)).collect()
    }
}

impl Module for Attention {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.q.walk(&format!("{prefix}.q"), w)?;
        self.k.walk(&format!("{prefix}.k"), w)?;
        self.v.walk(&format!("{prefix}.v"), w)?;
        self.out.walk(&format!("{prefix}.out"), w)
    }
}

#[derive(Debug, Clone)]
pub struct TwoWayLayerWeights {
    pub self_attn: Attention,
    norm1: LayerNorm,
    pub cross_token_to_image: Attention,
    norm2: LayerNorm,
    pub ffn: Mlp,
    norm3: LayerNorm,
    pub cross_image_to_token: Attention,
    norm4: LayerNorm,
}

impl TwoWayLayerWeights {
    fn build(cfg: &DecoderConfig, rng: &mut Rng) -> TwoWayLayerWeights {
        let d = cfg.token_dim;
        TwoWayLayerWeights {
            self_attn: Attention::build(d, cfg.num_heads, rng),
            norm1: LayerNorm::build(d),
            cross_token_to_image: Attention::build(d, cfg.num_heads, rng),
            norm2: LayerNorm::build(d),
            ffn: Mlp::build(&[d, cfg.ffn_dim, d], rng),
            norm3: LayerNorm::build(d),
            cross_image_to_token: Attention::build(d, cfg.num_heads, rng),
            norm4: LayerNorm::build(d),
        }
    }

    /// Expected token trajectory when all value/output projections and the
    /// feed-forward are zeroed: just the three layer norms in sequence.
    pub fn norms_only_tokens(&self, token: &[f64]) -> Vec<f64> {
        self.norm3.forward(&self.norm2.forward(&self.norm1.forward(token)))
    }

    pub fn norms_only_embedding(&self, pixel: &[f64]) -> Vec<f64> {
        self.norm4.forward(pixel)
    }
}

impl Module for TwoWayLayerWeights {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.self_attn.walk(&format!("{prefix}.self_attn"), w)?;
        self.norm1.walk(&format!("{prefix}.norm1"), w)?;
        self.cross_token_to_image.walk(&format!("{prefix}.cross_t2i"), w)?;
        self.norm2.walk(&format!("{prefix}.norm2"), w)?;
        self.ffn.walk(&format!("{prefix}.ffn"), w)?;
        self.norm3.walk(&format!("{prefix}.norm3"), w)?;
        self.cross_image_to_token.walk(&format!("{prefix}.cross_i2t"), w)?;
        self.norm4.walk(&format!("{prefix}.norm4"), w)
    }
}

/// Mask prediction head: token/feature dot product plus a supplementary
/// path over the upscaled embedding, fused by a 3x3 then 1x1 convolution.
#[derive(Debug, Clone)]
pub struct MplWeights {
    project_vns: Conv2d,
    token_mlp: Mlp,
    supp_conv1: Conv2d,
    supp_conv2: Conv2d,
    fuse_conv1: Conv2d,
    fuse_conv2: Conv2d,
}

impl MplWeights {
    fn build(cfg: &DecoderConfig, rng: &mut Rng) -> MplWeights {
        let up = cfg.upscaled_channels;
        MplWeights {
            project_vns: Conv2d::build(cfg.vns_channels, up, 1, rng),
            token_mlp: Mlp::build(&[cfg.token_dim, cfg.token_dim, cfg.token_dim, up], rng),
            supp_conv1: Conv2d::build(up, up, 3, rng),
            supp_conv2: Conv2d::build(up, 1, 1, rng),
            fuse_conv1: Conv2d::build(2, cfg.mask_fusion_hidden, 3, rng),
            fuse_conv2: Conv2d::build(cfg.mask_fusion_hidden, 1, 1, rng),
        }
    }

    /// Test hook: zero the token-MLP output layer and both supplementary
    /// convolutions so the head reduces to its fusion biases.
    pub fn zero_active_paths(&mut self) {
        if let Some(last) = self.token_mlp.layers.last_mut() {
            last.weight.iter_mut().for_each(|w| *w = 0.0);
            last.bias.iter_mut().for_each(|b| *b = 0.0);
        }
        for c in [&mut self.supp_conv1, &mut self.supp_conv2] {
            c.weight.iter_mut().for_each(|w| *w = 0.0);
            c.bias.iter_mut().for_each(|b| *b = 0.0);
        }
    }
}

impl Module for MplWeights {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.project_vns.walk(&format!("{prefix}.project_vns"), w)?;
        self.token_mlp.walk(&format!("{prefix}.token_mlp"), w)?;
        self.supp_conv1.walk(&format!("{prefix}.supp_conv1"), w)?;
        self.supp_conv2.walk(&format!("{prefix}.supp_conv2"), w)?;
        self.fuse_conv1.walk(&format!("{prefix}.fuse_conv1"), w)?;
        self.fuse_conv2.walk(&format!("{prefix}.fuse_conv2"), w)
    }
}

/// Edge prediction head: dot-product map alone.
#[derive(Debug, Clone)]
pub struct EplWeights {
    project_vns: Conv2d,
    token_mlp: Mlp,
}

impl EplWeights {
    fn build(cfg: &DecoderConfig, rng: &mut Rng) -> EplWeights {
        let up = cfg.upscaled_channels;
        EplWeights {
            project_vns: Conv2d::build(cfg.vns_channels, up, 1, rng),
            token_mlp: Mlp::build(&[cfg.token_dim, cfg.token_dim, cfg.token_dim, up], rng),
        }
    }
}

impl Module for EplWeights {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        self.project_vns.walk(&format!("{prefix}.project_vns"), w)?;
        self.token_mlp.walk(&format!("{prefix}.token_mlp"), w)
    }
}

#[derive(Debug, Clone)]
pub struct DecoderWeights {
    pub config: DecoderConfig,
    pub layers: [TwoWayLayerWeights; 2],
    /// Token integration: one linear map applied to the element-wise sum,
    /// shared by both applications.
    pub fusion: Linear,
    upscale1: ConvTranspose2x2,
    upscale2: ConvTranspose2x2,
    pub mpl: [MplWeights; 2],
    pub epl: [EplWeights; 2],
    sam_head: Mlp,
    /// Learnable token embeddings.
    pub sam_output_token: Vec<f64>,
    pub vns_mask_token: Vec<f64>,
    pub vns_edge_token: Vec<f64>,
}

impl DecoderWeights {
    pub fn seeded(config: &DecoderConfig, rng: &mut Rng) -> Result<DecoderWeights> {
        config.validate()?;
        let d = config.token_dim;
        let k = 1.0 / (d as f64).sqrt();
        Ok(DecoderWeights {
            config: config.clone(),
            layers: [
                TwoWayLayerWeights::build(config, rng),
                TwoWayLayerWeights::build(config, rng),
            ],
            fusion: Linear::build(d, d, rng),
            upscale1: ConvTranspose2x2::build(d, d / 2, rng),
            upscale2: ConvTranspose2x2::build(d / 2, config.upscaled_channels, rng),
            mpl: [MplWeights::build(config, rng), MplWeights::build(config, rng)],
            epl: [EplWeights::build(config, rng), EplWeights::build(config, rng)],
            sam_head: Mlp::build(&[d, d, config.upscaled_channels], rng),
            sam_output_token: (0..d).map(|_| rng.uniform_symmetric(k)).collect(),
            vns_mask_token: (0..d).map(|_| rng.uniform_symmetric(k)).collect(),
            vns_edge_token: (0..d).map(|_| rng.uniform_symmetric(k)).collect(),
        })
    }

    /// Assembles the decoder token set: output token, prompt tokens, then
    /// the two VNS tokens.
    pub fn assemble_token_set(&self, prompt_tokens: &[Vec<f64>]) -> Result<TokenSet> {
        let mut tokens = vec![self.sam_output_token.clone()];
        let mut roles = vec![TokenRole::SamOutput];
        for p in prompt_tokens {
            tokens.push(p.clone());
            roles.push(TokenRole::Prompt);
        }
        tokens.push(self.vns_mask_token.clone());
        roles.push(TokenRole::VnsMask);
        tokens.push(self.vns_edge_token.clone());
        roles.push(TokenRole::VnsEdge);
        TokenSet::new(tokens, roles)
    }

    pub fn mpl_param_count(&mut self) -> usize {
        self.mpl[0].param_count()
    }

    pub fn epl_param_count(&mut self) -> usize {
        self.epl[0].param_count()
    }
}

impl Module for DecoderWeights {
    fn walk(&mut self, prefix: &str, w: &mut Walker) -> Result<()> {
        for (i, layer) in self.layers.iter_mut().enumerate() {
            layer.walk(&format!("{prefix}layer{i}"), w)?;
        }
        self.fusion.walk(&format!("{prefix}fusion"), w)?;
        self.upscale1.walk(&format!("{prefix}upscale1"), w)?;
        self.upscale2.walk(&format!("{prefix}upscale2"), w)?;
        for (i, m) in self.mpl.iter_mut().enumerate() {
            m.walk(&format!("{prefix}mpl{i}"), w)?;
        }
        for (i, e) in self.epl.iter_mut().enumerate() {
            e.walk(&format!("{prefix}epl{i}"), w)?;
        }
        self.sam_head.walk(&format!("{prefix}sam_head"), w)?;
        let d = self.config.token_dim;
        w.tensor(format!("{prefix}sam_output_token"), vec![d], &mut self.sam_output_token)?;
        w.tensor(format!("{prefix}vns_mask_token"), vec![d], &mut self.vns_mask_token)?;
        w.tensor(format!("{prefix}vns_edge_token"), vec![d], &mut self.vns_edge_token)
    }
}

/// Inference discards the edge outputs and the first-layer mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    Train,
    Infer,
}

/// Decoder outputs as logit maps at 4x the embedding grid.
#[derive(Debug, Clone)]
pub struct DecoderOutput {
    pub vns_masks: Vec<SoftMap>,
    pub vns_edges: Vec<SoftMap>,
    pub sam_mask: SoftMap,
    pub trace: ForwardTrace,
}

impl DecoderOutput {
    pub fn map_count(&self) -> usize {
        self.vns_masks.len() + self.vns_edges.len() + 1
    }
}

/// One two-way block: token self-attention, token-to-image cross
/// attention, token feed-forward, then image-to-token cross attention.
/// Residual plus layer norm at each sub-step.
pub fn two_way_layer(
    tokens: &TokenSet,
    emb: &FeatureMap,
    w: &TwoWayLayerWeights,
    trace: &mut ForwardTrace,
) -> Result<(TokenSet, FeatureMap)> {
    let d = tokens.dim();
    if emb.channels() != d {
        return Err(Error::shape(format!(
            "embedding channels {} != token dim {d}",
            emb.channels()
        )));
    }
    let (h, wd, _) = emb.shape();

    let mut tok: Vec<Vec<f64>> = tokens.tokens().to_vec();

    // Token self-attention.
    let attn = w.self_attn.forward(&tok, &tok, trace);
    for (t, a) in tok.iter_mut().zip(attn) {
        let summed: Vec<f64> = t.iter().zip(a).map(|(x, y)| x + y).collect();
        *t = w.norm1.forward(&summed);
    }

    // Token-to-image cross attention.
    let mut pixels: Vec<Vec<f64>> = Vec::with_capacity(h * wd);
    for y in 0..h {
        for x in 0..wd {
            pixels.push(emb.pixel(y, x).to_vec());
        }
    }
    let attn = w.cross_token_to_image.forward(&tok, &pixels, trace);
    for (t, a) in tok.iter_mut().zip(attn) {
        let summed: Vec<f64> = t.iter().zip(a).map(|(x, y)| x + y).collect();
        *t = w.norm2.forward(&summed);
    }

    // Per-token feed-forward.
    for t in tok.iter_mut() {
        let f = w.ffn.forward(t);
        let summed: Vec<f64> = t.iter().zip(f).map(|(x, y)| x + y).collect();
        *t = w.norm3.forward(&summed);
    }

    // Image-to-token cross attention updates the embedding.
    let attn = w.cross_image_to_token.forward(&pixels, &tok, trace);
    let mut new_emb = FeatureMap::zeros(h, wd, d);
    for y in 0..h {
        for x in 0..wd {
            let i = y * wd + x;
            let summed: Vec<f64> = pixels[i].iter().zip(&attn[i]).map(|(a, b)| a + b).collect();
            let normed = w.norm4.forward(&summed);
            for (c, v) in normed.into_iter().enumerate() {
                new_emb.set(y, x, c, v);
            }
        }
    }

    let out = TokenSet::new(tok, tokens.roles().to_vec())?;
    Ok((out, new_emb))
}

/// Token integration: linear(e_mk + e_eg).
pub fn fuse_vns_tokens(e_mk: &[f64], e_eg: &[f64], fusion: &Linear) -> Result<Vec<f64>> {
    if e_mk.len() != e_eg.len() {
        return Err(Error::shape(format!(
            "fuse_vns_tokens dims {} vs {}",
            e_mk.len(),
            e_eg.len()
        )));
    }
    let summed: Vec<f64> = e_mk.iter().zip(e_eg).map(|(a, b)| a + b).collect();
    Ok(fusion.forward(&summed))
}

fn upscale_embedding(emb: &FeatureMap, w: &DecoderWeights) -> Result<FeatureMap> {
    let mut mid = w.upscale1.forward(emb)?;
    for v in mid.values_mut() {
        *v = relu(*v);
    }
    w.upscale2.forward(&mid)
}

fn dot_map(token_features: &[f64], fused: &FeatureMap) -> SoftMap {
    let (h, wd, c) = fused.shape();
    debug_assert_eq!(c, token_features.len());
    let mut values = Vec::with_capacity(h * wd);
    for y in 0..h {
        for x in 0..wd {
            let px = fused.pixel(y, x);
            let mut acc = 0.0;
            for (a, b) in token_features.iter().zip(px) {
                acc += a * b;
            }
            values.push(acc);
        }
    }
    SoftMap::new(wd, h, values).expect("finite dot products")
}

fn fuse_feature(upscaled: &FeatureMap, vns_feature: &FeatureMap, project: &Conv2d) -> Result<FeatureMap> {
    if (vns_feature.height(), vns_feature.width()) != (upscaled.height(), upscaled.width()) {
        return Err(Error::shape(format!(
            "vns feature {}x{} vs upscaled embedding {}x{}",
            vns_feature.height(),
            vns_feature.width(),
            upscaled.height(),
            upscaled.width()
        )));
    }
    upscaled.add(&project.forward(vns_feature)?)
}

/// Mask prediction: dot-product map from the fused feature plus a
/// supplementary convolutional map, merged by the 3x3/1x1 stack.
pub fn mpl_forward(
    e_mk: &[f64],
    upscaled: &FeatureMap,
    f_mk: &FeatureMap,
    w: &MplWeights,
) -> Result<SoftMap> {
    let fused = fuse_feature(upscaled, f_mk, &w.project_vns)?;
    let token_feat = w.token_mlp.forward(e_mk);
    let dot = dot_map(&token_feat, &fused);

    let mut s1 = w.supp_conv1.forward(upscaled)?;
    for v in s1.values_mut() {
        *v = relu(*v);
    }
    let supp = w.supp_conv2.forward(&s1)?;

    let (h, wd) = (upscaled.height(), upscaled.width());
    let mut stacked = FeatureMap::zeros(h, wd, 2);
    for y in 0..h {
        for x in 0..wd {
            stacked.set(y, x, 0, dot.get(x, y));
            stacked.set(y, x, 1, supp.get(y, x, 0));
        }
    }
    let mut f1 = w.fuse_conv1.forward(&stacked)?;
    for v in f1.values_mut() {
        *v = relu(*v);
    }
    let logits = w.fuse_conv2.forward(&f1)?;
    let mut values = Vec::with_capacity(h * wd);
    for y in 0..h {
        for x in 0..wd {
            values.push(logits.get(y, x, 0));
        }
    }
    SoftMap::new(wd, h, values)
}

/// Edge prediction: the dot-product map alone.
pub fn epl_forward(
    e_eg: &[f64],
    upscaled: &FeatureMap,
    f_eg: &FeatureMap,
    w: &EplWeights,
) -> Result<SoftMap> {
    let fused = fuse_feature(upscaled, f_eg, &w.project_vns)?;
    let token_feat = w.token_mlp.forward(e_eg);
    Ok(dot_map(&token_feat, &fused))
}

/// Full decoder pass. Train mode emits both levels of mask and edge
/// predictions plus the pass-through output-token map; infer mode keeps
/// only the final-layer mask and that pass-through map.
pub fn decoder_forward(
    emb: &FeatureMap,
    tokens: &TokenSet,
    f_mk: &FeatureMap,
    f_eg: &FeatureMap,
    w: &DecoderWeights,
    mode: DecodeMode,
) -> Result<DecoderOutput> {
    w.config.validate()?;
    let n = tokens.len();
    if n < 3 {
        return Err(Error::config("token set needs output, prompt, and vns tokens"));
    }
    let mk_idx = tokens.unique_role_index(TokenRole::VnsMask)?;
    let eg_idx = tokens.unique_role_index(TokenRole::VnsEdge)?;
    if mk_idx != n - 2 || eg_idx != n - 1 {
        return Err(Error::config(
            "vns tokens must be appended after output and prompt tokens".to_string(),
        ));
    }
    let sam_idx = tokens.unique_role_index(TokenRole::SamOutput)?;

    let mut trace = ForwardTrace::default();
    let mut cur_tokens = tokens.clone();
    let mut cur_emb = emb.clone();
    let mut masks = Vec::new();
    let mut edges = Vec::new();

    for level in 0..2 {
        let (t, e) = two_way_layer(&cur_tokens, &cur_emb, &w.layers[level], &mut trace)?;
        cur_tokens = t;
        cur_emb = e;

        let fused_mk = fuse_vns_tokens(
            cur_tokens.token(mk_idx),
            cur_tokens.token(eg_idx),
            &w.fusion,
        )?;
        cur_tokens.set_token(mk_idx, fused_mk);

        let need_level = mode == DecodeMode::Train || level == 1;
        if need_level {
            let upscaled = upscale_embedding(&cur_emb, w)?;
            let mask = mpl_forward(cur_tokens.token(mk_idx), &upscaled, f_mk, &w.mpl[level])?;
            if mode == DecodeMode::Train {
                let edge = epl_forward(cur_tokens.token(eg_idx), &upscaled, f_eg, &w.epl[level])?;
                masks.push(mask);
                edges.push(edge);
            } else {
                masks.push(mask);
            }
            if level == 1 {
                let sam_feat = w.sam_head.forward(cur_tokens.token(sam_idx));
                let sam_mask = dot_map(&sam_feat, &upscaled);
                return Ok(DecoderOutput {
                    vns_masks: masks,
                    vns_edges: edges,
                    sam_mask,
                    trace,
                });
            }
        }
    }
    unreachable!("loop always returns at level 1");
}

/// Seeded random-Fourier positional token for a normalized coordinate.
pub fn positional_token(nx: f64, ny: f64, dim: usize, seed: u64) -> Vec<f64> {
    assert!(dim % 2 == 0);
    let mut rng = Rng::new(seed ^ 0x50_53_45);
    let half = dim / 2;
    let mut out = vec![0.0; dim];
    for i in 0..half {
        let gx = rng.gaussian();
        let gy = rng.gaussian();
        let phase = std::f64::consts::TAU * (nx * gx + ny * gy);
        out[i] = phase.sin();
        out[half + i] = phase.cos();
    }
    out
}

/// Prompt tokens at desk scale: a box contributes its two corners, a
/// point contributes one embedding.
pub fn box_prompt_tokens(
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    img_w: f64,
    img_h: f64,
    dim: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    vec![
        positional_token(x1 / img_w, y1 / img_h, dim, seed),
        positional_token(x2 / img_w, y2 / img_h, dim, seed),
    ]
}

pub fn point_prompt_tokens(
    points: &[(f64, f64)],
    img_w: f64,
    img_h: f64,
    dim: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&(x, y)| positional_token(x / img_w, y / img_h, dim, seed))
        .collect()
}
