//! Command implementations behind the `vnskit` binary: dataset
//! evaluation, non-saliency scoring, prompt generation, the synthetic
//! forward-pass demo, and the verification self-test.
//!
//! Exit codes are stable: 0 success, 1 partial/record failure, 2
//! usage/configuration error.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::decoder::{decoder_forward, DecodeMode, DecoderOutput, DecoderWeights};
use crate::error::{Error, Result};
use crate::feature::FeatureMap;
use crate::io;
use crate::manifest::{parse_manifest, ManifestRecord};
use crate::metrics::{
    ap_from_pooled, boundary_iou_default, e_measure_mean, iou, match_scored_predictions,
    weighted_f_beta, ApBlock, MetricReport, RecordEntry, RecordMetrics, ScoredMatch,
    COCO_AP_THRESHOLDS,
};
use crate::nn::Module;
use crate::nsfm::{nsfm_forward, NsfmWeights};
use crate::prompts::{coarse_mask, gt_box, noisy_box, sample_points, BoundingBox};
use crate::raster::SoftMap;
use crate::rng::Rng;
use crate::selftest::{run_all, FaultInjection};
use crate::vns::{vns_score_with, VnsParams};
use crate::weights_io::sha256_hex_f64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Serialize)]
pub struct FailureEntry {
    pub index: usize,
    pub image: String,
    pub error: String,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })
}

/// Runs `f` over record indices with `jobs` workers; results come back in
/// record order regardless of the worker count.
fn run_records<T, F>(jobs: usize, count: usize, f: F) -> Result<Vec<Result<T>>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(|i| f(i)).collect()))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

// ---------------------------------------------------------------- eval

#[derive(Debug, Serialize)]
struct EvalReport<'a> {
    config: &'a Config,
    #[serde(flatten)]
    metrics: MetricReport,
    failures: Vec<FailureEntry>,
}

struct EvalRecordOutcome {
    entry: RecordEntry,
    /// Matches per AP threshold plus the gt count, when instances exist.
    ap_matches: Option<Vec<Vec<ScoredMatch>>>,
}

fn eval_record(
    base: &Path,
    rec: &ManifestRecord,
    cfg: &Config,
) -> Result<EvalRecordOutcome> {
    let gt = io::load_mask(&resolve(base, &rec.gt_mask), cfg.binarize_threshold)?;

    let pred_path = rec.pred.as_ref().ok_or_else(|| {
        Error::Contract("record has no pred path for evaluation".to_string())
    })?;
    let pred_soft = io::load_softmap(&resolve(base, pred_path))?;
    let pred_mask = pred_soft.binarize(cfg.binarize_threshold as f64 / 255.0);

    let metrics = RecordMetrics {
        iou: iou(&pred_mask, &gt)?,
        biou: boundary_iou_default(&pred_mask, &gt, cfg.biou_fraction)?,
        e_phi: e_measure_mean(&pred_soft, &gt)?,
        f_beta_w: weighted_f_beta(&pred_soft, &gt, 1.0)?,
    };

    let ap_matches = match &rec.instances {
        None => None,
        Some(instances) => {
            let mut preds = Vec::with_capacity(instances.len());
            for inst in instances {
                let m = io::load_mask(&resolve(base, &inst.mask), cfg.binarize_threshold)?;
                preds.push((m, inst.score));
            }
            let gts = vec![gt.clone()];
            let mut per_threshold = Vec::with_capacity(COCO_AP_THRESHOLDS.len());
            for &t in COCO_AP_THRESHOLDS.iter() {
                per_threshold.push(match_scored_predictions(&preds, &gts, t)?);
            }
            Some(per_threshold)
        }
    };

    Ok(EvalRecordOutcome {
        entry: RecordEntry {
            image: rec.image.display().to_string(),
            metrics,
        },
        ap_matches,
    })
}

/// Evaluates every record of the manifest and writes `eval_report.json`.
pub fn cmd_eval(manifest_path: &Path, cfg: &Config, out: &Path) -> Result<i32> {
    cfg.validate()?;
    ensure_out_dir(out)?;
    let manifest = parse_manifest(manifest_path)?;
    let base = manifest_base(manifest_path);
    let records = manifest.records();

    let outcomes = run_records(cfg.jobs, records.len(), |i| {
        eval_record(&base, &records[i], cfg)
    })?;

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    let mut pooled: Vec<Vec<ScoredMatch>> = vec![Vec::new(); COCO_AP_THRESHOLDS.len()];
    let mut ap_gt_count = 0usize;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                entries.push(o.entry);
                if let Some(per_threshold) = o.ap_matches {
                    ap_gt_count += 1;
                    for (t, matches) in per_threshold.into_iter().enumerate() {
                        pooled[t].extend(matches);
                    }
                }
            }
            Err(e) => failures.push(FailureEntry {
                index: i,
                image: records[i].image.display().to_string(),
                error: e.to_string(),
            }),
        }
    }

    let ap = if ap_gt_count > 0 {
        let per_t: Vec<f64> = pooled
            .iter()
            .map(|m| ap_from_pooled(m, ap_gt_count))
            .collect();
        let mean_ap = per_t.iter().sum::<f64>() / per_t.len() as f64;
        let idx50 = 0; // thresholds start at 0.50
        let idx75 = COCO_AP_THRESHOLDS
            .iter()
            .position(|&t| (t - 0.75).abs() < 1e-12)
            .expect("0.75 is in the sweep");
        Some(ApBlock {
            ap: mean_ap,
            ap50: per_t[idx50],
            ap75: per_t[idx75],
        })
    } else {
        None
    };

    let had_failures = !failures.is_empty();
    let report = EvalReport {
        config: cfg,
        metrics: MetricReport::from_records(entries, ap),
        failures,
    };
    write_json(&out.join("eval_report.json"), &report)?;
    Ok(if had_failures { EXIT_PARTIAL } else { EXIT_OK })
}

fn manifest_base(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

// ----------------------------------------------------------- vns-score

#[derive(Debug, Serialize)]
struct VnsRecord {
    path: String,
    color_contrast: f64,
    texture_contrast: f64,
    c_fb: f64,
    boundary_clarity: f64,
    vns_score: f64,
    partition: String,
}

#[derive(Debug, Serialize)]
struct DatasetStats {
    mean: f64,
    sd: f64,
}

#[derive(Debug, Serialize)]
struct VnsReport<'a> {
    config: &'a Config,
    records: Vec<VnsRecord>,
    /// Pixel-population statistics over the scored images.
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<DatasetStats>,
    failures: Vec<FailureEntry>,
}

/// Scores every record and writes the report plus the two partition
/// lists (`salient.txt`, `non_salient.txt`).
pub fn cmd_vns_score(manifest_path: &Path, cfg: &Config, out: &Path) -> Result<i32> {
    cfg.validate()?;
    ensure_out_dir(out)?;
    let manifest = parse_manifest(manifest_path)?;
    let base = manifest_base(manifest_path);
    let records = manifest.records();
    let params = VnsParams {
        glcm_levels: cfg.vns_glcm_levels,
        weight_cfb: cfg.vns_weight_cfb,
        weight_boundary: cfg.vns_weight_boundary,
        ..VnsParams::default()
    };

    let outcomes = run_records(cfg.jobs, records.len(), |i| {
        let rec = &records[i];
        let img = io::load_color(&resolve(&base, &rec.image))?;
        let mask = io::load_mask(&resolve(&base, &rec.gt_mask), cfg.binarize_threshold)?;
        let breakdown = vns_score_with(&img, &mask, &params)?;
        Ok((breakdown, img.to_gray()))
    })?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut salient = String::new();
    let mut non_salient = String::new();
    let mut grays = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let image = records[i].image.display().to_string();
        match outcome {
            Ok((b, gray)) => {
                grays.push(gray);
                let non = crate::vns::is_non_salient(b.score, cfg.vns_threshold);
                if non {
                    non_salient.push_str(&image);
                    non_salient.push('\n');
                } else {
                    salient.push_str(&image);
                    salient.push('\n');
                }
                rows.push(VnsRecord {
                    path: image,
                    color_contrast: b.color_contrast,
                    texture_contrast: b.texture_contrast,
                    c_fb: b.c_fb,
                    boundary_clarity: b.boundary_clarity,
                    vns_score: b.score,
                    partition: if non { "non-salient" } else { "salient" }.to_string(),
                });
            }
            Err(e) => failures.push(FailureEntry {
                index: i,
                image,
                error: e.to_string(),
            }),
        }
    }

    let dataset = if grays.is_empty() {
        None
    } else {
        let (mean, sd) = crate::vns::dataset_stats(&grays)?;
        Some(DatasetStats { mean, sd })
    };
    let had_failures = !failures.is_empty();
    write_json(
        &out.join("vns_report.json"),
        &VnsReport { config: cfg, records: rows, dataset, failures },
    )?;
    let write_list = |name: &str, body: &str| -> Result<()> {
        fs::write(out.join(name), body).map_err(|source| Error::Io {
            path: out.join(name),
            source,
        })
    };
    write_list("salient.txt", &salient)?;
    write_list("non_salient.txt", &non_salient)?;
    Ok(if had_failures { EXIT_PARTIAL } else { EXIT_OK })
}

// ------------------------------------------------------------- prompts

#[derive(Debug, Serialize)]
struct PromptRecord {
    image: String,
    #[serde(rename = "box")]
    gt_box: BoundingBox,
    noisy_box: BoundingBox,
    points: Vec<(usize, usize)>,
    coarse_mask: String,
}

#[derive(Debug, Serialize)]
struct PromptsReport<'a> {
    config: &'a Config,
    records: Vec<PromptRecord>,
    failures: Vec<FailureEntry>,
}

/// Generates the prompt bundle per record: tight box, noisy box, point
/// set, and a coarse-mask PNG. Each record draws from an independent
/// stream derived from (seed, record index).
pub fn cmd_prompts(manifest_path: &Path, cfg: &Config, out: &Path) -> Result<i32> {
    cfg.validate()?;
    ensure_out_dir(out)?;
    let manifest = parse_manifest(manifest_path)?;
    let base = manifest_base(manifest_path);
    let records = manifest.records();

    let outcomes = run_records(cfg.jobs, records.len(), |i| {
        let rec = &records[i];
        let mask = io::load_mask(&resolve(&base, &rec.gt_mask), cfg.binarize_threshold)?;
        let mut rng = Rng::for_record(cfg.seed, i as u64);
        let bbox = gt_box(&mask)?;
        let noisy = noisy_box(&bbox, cfg.noise_scale, mask.width(), mask.height(), &mut rng);
        let points = sample_points(&mask, cfg.n_points, &mut rng)?;
        let coarse = coarse_mask(&mask, &mut rng)?;
        let coarse_name = format!("coarse_{i:04}.png");
        io::save_softmap(&out.join(&coarse_name), &coarse.map)?;
        Ok(PromptRecord {
            image: rec.image.display().to_string(),
            gt_box: bbox,
            noisy_box: noisy,
            points: points.points,
            coarse_mask: coarse_name,
        })
    })?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(FailureEntry {
                index: i,
                image: records[i].image.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    let had_failures = !failures.is_empty();
    write_json(
        &out.join("prompts.json"),
        &PromptsReport { config: cfg, records: rows, failures },
    )?;
    Ok(if had_failures { EXIT_PARTIAL } else { EXIT_OK })
}

// -------------------------------------------------------- demo-forward

#[derive(Debug, Serialize)]
struct MapDigest {
    name: String,
    width: usize,
    height: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct PassDigest {
    map_count: usize,
    max_softmax_row_dev: f64,
    softmax_rows: usize,
    maps: Vec<MapDigest>,
}

#[derive(Debug, Serialize)]
struct DemoReport<'a> {
    config: &'a Config,
    nsfm_params: usize,
    decoder_params: usize,
    mpl_head_params: usize,
    epl_head_params: usize,
    train: PassDigest,
    infer: PassDigest,
}

fn digest_pass(out: &DecoderOutput, label: &str, dir: &Path) -> Result<PassDigest> {
    // Infer mode keeps only the final level, so its single mask is l2.
    let first_level = if out.vns_masks.len() == 2 { 1 } else { 2 };
    let mut maps = Vec::new();
    let mut digest_one = |name: String, map: &SoftMap| -> Result<()> {
        let preview: Vec<f64> = map
            .values()
            .iter()
            .map(|&v| crate::nn::sigmoid(v))
            .collect();
        let preview_map = SoftMap::new(map.width(), map.height(), preview)?;
        io::save_softmap(&dir.join(format!("{name}.pgm")), &preview_map)?;
        maps.push(MapDigest {
            name,
            width: map.width(),
            height: map.height(),
            sha256: sha256_hex_f64(map.values()),
        });
        Ok(())
    };
    for (k, m) in out.vns_masks.iter().enumerate() {
        digest_one(format!("{label}_vns_mask_l{}", k + first_level), m)?;
    }
    for (k, m) in out.vns_edges.iter().enumerate() {
        digest_one(format!("{label}_vns_edge_l{}", k + 1), m)?;
    }
    digest_one(format!("{label}_sam_mask"), &out.sam_mask)?;
    Ok(PassDigest {
        map_count: out.map_count(),
        max_softmax_row_dev: out.trace.max_softmax_row_dev,
        softmax_rows: out.trace.softmax_rows,
        maps,
    })
}

/// Weight sources for the forward demo: either seeded in place or loaded
/// from weight files in the shared format.
#[derive(Debug, Clone, Default)]
pub struct DemoWeightOptions {
    pub load_nsfm: Option<PathBuf>,
    pub load_decoder: Option<PathBuf>,
    /// Write the resolved weights next to the report.
    pub save: bool,
}

/// Builds seeded weights and synthetic inputs, runs the mining module and
/// both decoder modes, and writes the shape/hash report with previews.
pub fn cmd_demo_forward(cfg: &Config, out: &Path) -> Result<i32> {
    cmd_demo_forward_with(cfg, out, &DemoWeightOptions::default())
}

pub fn cmd_demo_forward_with(
    cfg: &Config,
    out: &Path,
    weights: &DemoWeightOptions,
) -> Result<i32> {
    cfg.validate()?;
    if cfg.nsfm.out_channels != cfg.decoder.vns_channels {
        return Err(Error::Config(format!(
            "nsfm out_channels {} != decoder vns_channels {}",
            cfg.nsfm.out_channels, cfg.decoder.vns_channels
        )));
    }
    if (cfg.nsfm.height, cfg.nsfm.width) != (cfg.decoder.emb_height, cfg.decoder.emb_width) {
        return Err(Error::Config(format!(
            "nsfm grid {}x{} != decoder grid {}x{}",
            cfg.nsfm.height, cfg.nsfm.width, cfg.decoder.emb_height, cfg.decoder.emb_width
        )));
    }
    ensure_out_dir(out)?;

    let mut rng = Rng::new(cfg.seed);
    let mut nsfm_w = match &weights.load_nsfm {
        Some(path) => {
            let loaded = crate::weights_io::load_nsfm(path)?;
            if loaded.config != cfg.nsfm {
                return Err(Error::Config(format!(
                    "weight file {} config differs from the resolved nsfm config",
                    path.display()
                )));
            }
            // Keep the stream aligned with the seeded path.
            let _ = NsfmWeights::seeded(&cfg.nsfm, &mut rng)?;
            loaded
        }
        None => NsfmWeights::seeded(&cfg.nsfm, &mut rng)?,
    };
    let mut dec_w = match &weights.load_decoder {
        Some(path) => {
            let loaded = crate::weights_io::load_decoder(path)?;
            if loaded.config != cfg.decoder {
                return Err(Error::Config(format!(
                    "weight file {} config differs from the resolved decoder config",
                    path.display()
                )));
            }
            let _ = DecoderWeights::seeded(&cfg.decoder, &mut rng)?;
            loaded
        }
        None => DecoderWeights::seeded(&cfg.decoder, &mut rng)?,
    };
    if weights.save {
        crate::weights_io::save_nsfm(&out.join("nsfm_weights.vnsw"), &mut nsfm_w)?;
        crate::weights_io::save_decoder(&out.join("decoder_weights.vnsw"), &mut dec_w)?;
    }

    let levels: Vec<FeatureMap> = (0..cfg.nsfm.levels)
        .map(|_| {
            FeatureMap::new(
                cfg.nsfm.height,
                cfg.nsfm.width,
                cfg.nsfm.in_channels,
                (0..cfg.nsfm.height * cfg.nsfm.width * cfg.nsfm.in_channels)
                    .map(|_| rng.gaussian() * 0.5)
                    .collect(),
            )
        })
        .collect::<Result<_>>()?;
    let emb = FeatureMap::new(
        cfg.decoder.emb_height,
        cfg.decoder.emb_width,
        cfg.decoder.token_dim,
        (0..cfg.decoder.emb_height * cfg.decoder.emb_width * cfg.decoder.token_dim)
            .map(|_| rng.gaussian() * 0.5)
            .collect(),
    )?;

    let (f_mk, f_eg) = nsfm_forward(&levels, &nsfm_w)?;

    let w = cfg.decoder.emb_width as f64 * 4.0;
    let h = cfg.decoder.emb_height as f64 * 4.0;
    let prompt_tokens = crate::decoder::box_prompt_tokens(
        w * 0.25,
        h * 0.25,
        w * 0.75,
        h * 0.75,
        w,
        h,
        cfg.decoder.token_dim,
        cfg.seed,
    );
    let tokens = dec_w.assemble_token_set(&prompt_tokens)?;

    let train = decoder_forward(&emb, &tokens, &f_mk, &f_eg, &dec_w, DecodeMode::Train)?;
    let infer = decoder_forward(&emb, &tokens, &f_mk, &f_eg, &dec_w, DecodeMode::Infer)?;

    let report = DemoReport {
        config: cfg,
        nsfm_params: nsfm_w.param_count(),
        decoder_params: dec_w.param_count(),
        mpl_head_params: dec_w.mpl_param_count(),
        epl_head_params: dec_w.epl_param_count(),
        train: digest_pass(&train, "train", out)?,
        infer: digest_pass(&infer, "infer", out)?,
    };
    write_json(&out.join("demo_report.json"), &report)?;
    Ok(EXIT_OK)
}

// ------------------------------------------------------------ selftest

#[derive(Debug, Serialize)]
struct SelftestReport {
    passed: bool,
    suites: Vec<crate::selftest::SuiteOutcome>,
}

/// Runs every oracle suite, printing one line per suite; exit 0 iff all
/// pass. `inject` corrupts the named site to exercise the failure path.
pub fn cmd_selftest(inject: Option<FaultInjection>, out: Option<&Path>) -> Result<i32> {
    let suites = run_all(inject);
    let passed = suites.iter().all(|s| s.passed);
    for s in &suites {
        println!(
            "{} {}: cases={} max_error={:.3e} tolerance={:.1e}",
            if s.passed { "PASS" } else { "FAIL" },
            s.suite,
            s.cases,
            s.max_error,
            s.tolerance
        );
    }
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_json(&dir.join("selftest_report.json"), &SelftestReport { passed, suites })?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_PARTIAL })
}

/// Maps setup errors to the usage exit code at the binary boundary.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::EmptyManifest | Error::Config(_) => EXIT_USAGE,
        _ => EXIT_PARTIAL,
    }
}
