//! Acceptance suite: one test per criterion, each printing its own
//! PASS line (run with `cargo test --test acceptance -- --nocapture`
//! to see the numbers; the per-test ok/FAILED lines give the verdicts).

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use vnskit::config::Config;
use vnskit::decoder::{
    decoder_forward, positional_token, DecodeMode, DecoderConfig, DecoderWeights,
};
use vnskit::feature::FeatureMap;
use vnskit::metrics::{e_measure_mean, weighted_f_beta};
use vnskit::prompts::{gt_box, noisy_box, sample_points};
use vnskit::raster::{ColorImage, Mask, SoftMap};
use vnskit::rng::Rng;
use vnskit::selftest::{
    suite_boundary_iou_exhaustive, suite_gradients, suite_haar_roundtrip, suite_iou_exhaustive,
    GradLoss,
};
use vnskit::vns::vns_score;

fn report(name: &str, detail: String) {
    println!("PASS {name}: {detail}");
}

#[test]
fn a01_metric_oracle_equivalence_exhaustive_3x3() {
    let start = Instant::now();
    let iou = suite_iou_exhaustive();
    let biou = suite_boundary_iou_exhaustive();
    let elapsed = start.elapsed();
    assert!(iou.passed, "iou oracle mismatch: {}", iou.max_error);
    assert!(biou.passed, "boundary iou oracle mismatch: {}", biou.max_error);
    assert_eq!(iou.cases, 512 * 512);
    assert_eq!(biou.cases, 512 * 512);
    assert_eq!(iou.max_error, 0.0);
    assert_eq!(biou.max_error, 0.0);
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "exhaustive sweep took {elapsed:?}, budget 10 s"
    );
    report(
        "metric_oracle_equivalence",
        format!("524288 comparisons exact in {elapsed:?}"),
    );
}

#[test]
fn a02_e_measure_and_weighted_f_extremes() {
    // Mixed gt away from degenerate cases; |G| large enough that the
    // precision epsilon stays below the 1e-9 budget.
    let gt = Mask::from_fn(16, 16, |x, y| (4..12).contains(&x) && (4..12).contains(&y)).unwrap();
    let identical = SoftMap::from_mask(&gt);
    let e_perfect = e_measure_mean(&identical, &gt).unwrap();
    let f_perfect = weighted_f_beta(&identical, &gt, 1.0).unwrap();
    assert!((e_perfect - 1.0).abs() <= 1e-9, "E = {e_perfect}");
    assert!((f_perfect - 1.0).abs() <= 1e-9, "Fw = {f_perfect}");

    let complement = SoftMap::new(
        16,
        16,
        gt.bits().iter().map(|&b| if b { 0.0 } else { 1.0 }).collect(),
    )
    .unwrap();
    let e_complement = e_measure_mean(&complement, &gt).unwrap();
    assert!(e_complement.abs() <= 1e-9, "complement E = {e_complement}");

    let zeros = SoftMap::new(16, 16, vec![0.0; 256]).unwrap();
    let f_zero = weighted_f_beta(&zeros, &gt, 1.0).unwrap();
    assert!(f_zero.abs() <= 1e-9, "all-zero Fw = {f_zero}");

    // Border-touching gt exercises the smoothing padding.
    let border_gt = Mask::from_fn(16, 16, |x, _| x < 9).unwrap();
    let f_zero_border = weighted_f_beta(&zeros, &border_gt, 1.0).unwrap();
    assert!(f_zero_border.abs() <= 1e-9, "border all-zero Fw = {f_zero_border}");

    report(
        "e_measure_weighted_f_extremes",
        format!(
            "perfect E={e_perfect:.12}, Fw={f_perfect:.12}; complement E={e_complement:.3e}; zero Fw={f_zero:.3e}"
        ),
    );
}

#[test]
fn a03_haar_roundtrip_energy_1000_maps() {
    let start = Instant::now();
    let outcome = suite_haar_roundtrip(1000, None);
    let elapsed = start.elapsed();
    assert!(outcome.passed, "haar suite error {}", outcome.max_error);
    assert_eq!(outcome.cases, 1000);
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "haar sweep took {elapsed:?}, budget 5 s"
    );
    report(
        "haar_roundtrip",
        format!("1000 x 16x16x8 maps, max error {:.3e} in {elapsed:?}", outcome.max_error),
    );
}

#[test]
fn a04_gradient_verification() {
    let s = suite_gradients(GradLoss::Structure, 100);
    assert!(
        s.passed && s.max_error < 1e-4,
        "structure gradient error {}",
        s.max_error
    );
    let d = suite_gradients(GradLoss::Dice, 100);
    assert!(d.passed && d.max_error < 1e-4, "dice gradient error {}", d.max_error);
    report(
        "gradient_verification",
        format!(
            "structure max rel {:.3e}, dice max rel {:.3e} over 100 instances each",
            s.max_error, d.max_error
        ),
    );
}

#[test]
fn a05_decoder_output_contract() {
    let cfg = DecoderConfig {
        token_dim: 64,
        num_heads: 8,
        ffn_dim: 128,
        emb_height: 8,
        emb_width: 8,
        upscaled_channels: 16,
        vns_channels: 16,
        mask_fusion_hidden: 8,
    };
    let mut rng = Rng::new(0xACC5);
    let w = DecoderWeights::seeded(&cfg, &mut rng).unwrap();
    let emb = FeatureMap::new(
        8,
        8,
        64,
        (0..8 * 8 * 64).map(|_| rng.gaussian() * 0.4).collect(),
    )
    .unwrap();
    let prompts = vec![
        positional_token(0.3, 0.4, 64, 2),
        positional_token(0.7, 0.6, 64, 2),
    ];
    let tokens = w.assemble_token_set(&prompts).unwrap();
    let f = FeatureMap::new(
        32,
        32,
        16,
        (0..32 * 32 * 16).map(|_| rng.gaussian() * 0.2).collect(),
    )
    .unwrap();

    let train = decoder_forward(&emb, &tokens, &f, &f, &w, DecodeMode::Train).unwrap();
    let infer = decoder_forward(&emb, &tokens, &f, &f, &w, DecodeMode::Infer).unwrap();

    assert_eq!(train.vns_masks.len(), 2, "train mask levels");
    assert_eq!(train.vns_edges.len(), 2, "train edge levels");
    assert_eq!(train.map_count(), 5, "train total maps");
    assert_eq!(infer.vns_masks.len(), 1, "infer keeps final mask only");
    assert_eq!(infer.vns_edges.len(), 0, "infer discards edges");
    assert_eq!(infer.map_count(), 2, "infer total maps");

    assert_eq!(
        train.vns_masks[1].values(),
        infer.vns_masks[0].values(),
        "level-2 mask must agree bitwise across modes"
    );
    assert_eq!(
        train.sam_mask.values(),
        infer.sam_mask.values(),
        "pass-through mask must agree bitwise across modes"
    );

    assert!(
        train.trace.max_softmax_row_dev < 1e-6,
        "softmax row deviation {}",
        train.trace.max_softmax_row_dev
    );
    assert!(infer.trace.max_softmax_row_dev < 1e-6);

    report(
        "decoder_contract",
        format!(
            "train 2+2+1, infer 2, level-2 bitwise equal, softmax dev {:.3e} over {} rows",
            train.trace.max_softmax_row_dev, train.trace.softmax_rows
        ),
    );
}

#[test]
fn a06_prompt_protocol_constants() {
    // Defaults carry the protocol constants.
    let cfg = Config::default();
    assert_eq!(cfg.noise_scale, 0.1, "noise scale default");
    assert_eq!(cfg.n_points, 10, "point count default");
    assert_eq!(cfg.vns_threshold, 0.7, "partition threshold default");

    // And they are visible in emitted reports.
    let dir = tempfile::tempdir().unwrap();
    let mask = Mask::from_fn(32, 32, |x, y| (8..24).contains(&x) && (8..24).contains(&y)).unwrap();
    vnskit::io::save_mask(&dir.path().join("gt.png"), &mask).unwrap();
    let img = ColorImage::from_fn(32, 32, |x, y| if mask.get(x, y) { [90; 3] } else { [160; 3] }).unwrap();
    vnskit::io::save_color(&dir.path().join("img.png"), &img).unwrap();
    std::fs::write(
        dir.path().join("m.jsonl"),
        "{\"image\":\"img.png\",\"gt_mask\":\"gt.png\"}\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    vnskit::cli::cmd_prompts(&dir.path().join("m.jsonl"), &cfg, &out).unwrap();
    let report_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("prompts.json")).unwrap()).unwrap();
    assert_eq!(report_json["config"]["noise_scale"], 0.1);
    assert_eq!(report_json["config"]["n_points"], 10);
    assert_eq!(report_json["config"]["vns_threshold"], 0.7);
    assert_eq!(report_json["records"][0]["points"].as_array().unwrap().len(), 10);

    // noisy_box at scale zero is the identity.
    let bbox = gt_box(&mask).unwrap();
    let mut rng = Rng::new(11);
    assert_eq!(noisy_box(&bbox, 0.0, 32, 32, &mut rng), bbox);

    // 10^4 sampling trials never leave the mask.
    let mut rng = Rng::new(13);
    let mut drawn = 0usize;
    while drawn < 10_000 {
        let pts = sample_points(&mask, 10, &mut rng).unwrap();
        for &(x, y) in &pts.points {
            assert!(mask.get(x, y), "point ({x},{y}) escaped the mask");
        }
        drawn += pts.points.len();
    }

    report(
        "prompt_protocol_constants",
        format!("noise 0.1, points 10, threshold 0.7 in reports; {drawn} in-mask draws"),
    );
}

#[test]
fn a07_vns_score_monotonicity_suite() {
    let mut rng = Rng::new(0x5C0E);
    let mut blur_gaps = Vec::new();
    for case in 0..50 {
        let side = 48;
        let sq = 14 + (rng.next_u64() % 10) as usize;
        let x0 = 6 + (rng.next_u64() % (side as u64 - sq as u64 - 12)) as usize;
        let y0 = 6 + (rng.next_u64() % (side as u64 - sq as u64 - 12)) as usize;
        let fg = 20 + (rng.next_u64() % 80) as u8;
        let bg = (fg as u32 + 80 + (rng.next_u64() % 76) as u32).min(255) as u8;
        let mask = Mask::from_fn(side, side, |x, y| {
            (x0..x0 + sq).contains(&x) && (y0..y0 + sq).contains(&y)
        })
        .unwrap();
        let img = ColorImage::from_fn(side, side, |x, y| {
            if mask.get(x, y) {
                [fg; 3]
            } else {
                [bg; 3]
            }
        })
        .unwrap();

        let sharp = vns_score(&img, &mask).unwrap();
        assert!((0.0..=1.0).contains(&sharp.score), "case {case} score {}", sharp.score);

        let blurred = vns_score(&img.gaussian_blur(3.0), &mask).unwrap();
        assert!((0.0..=1.0).contains(&blurred.score));
        assert!(
            blurred.score >= sharp.score,
            "case {case}: blur decreased score {} -> {}",
            sharp.score,
            blurred.score
        );
        blur_gaps.push(blurred.score - sharp.score);

        // Recolor the foreground to the background mean (the background
        // is constant, so its mean is exactly bg).
        let recolored = ColorImage::from_fn(side, side, |_, _| [bg; 3]).unwrap();
        let flat = vns_score(&recolored, &mask).unwrap();
        assert!(
            flat.score >= sharp.score,
            "case {case}: recolor decreased score {} -> {}",
            sharp.score,
            flat.score
        );
        assert!((0.0..=1.0).contains(&flat.score));
    }
    let min_gap = blur_gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    report(
        "vns_score_monotonicity",
        format!("50 squares: blur and contrast-collapse never decrease score (min blur gap {min_gap:.4})"),
    );
}

#[test]
fn a08_mpl_epl_parameter_asymmetry() {
    let cfg = DecoderConfig::paper_default();
    let mut w = DecoderWeights::seeded(&cfg, &mut Rng::new(1)).unwrap();
    let mpl = w.mpl_param_count();
    let epl = w.epl_param_count();
    assert!(
        epl < mpl,
        "mask head must be strictly larger: mpl {mpl} vs epl {epl}"
    );

    // Exact analytic sums from the configured shapes.
    let d = cfg.token_dim;
    let up = cfg.upscaled_channels;
    let vns = cfg.vns_channels;
    let hid = cfg.mask_fusion_hidden;
    let token_mlp = (d * d + d) + (d * d + d) + (d * up + up);
    let project = vns * up + up;
    let epl_expect = project + token_mlp;
    let mpl_expect = epl_expect + (up * up * 9 + up) + (up + 1) + (2 * hid * 9 + hid) + (hid + 1);
    assert_eq!(epl, epl_expect, "epl analytic count");
    assert_eq!(mpl, mpl_expect, "mpl analytic count");

    report(
        "mpl_epl_parameter_asymmetry",
        format!("paper config: mpl {mpl} > epl {epl} (analytic sums match)"),
    );
}

// ------------------------------------------------------- determinism

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vnskit")
}

fn run_ok(args: &[&str], allow_partial: bool) {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let ok = code == 0 || (allow_partial && code == 1);
    assert!(
        ok,
        "vnskit {args:?} exited {code}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn snapshot_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

fn make_dataset(dir: &Path) -> PathBuf {
    let mut rng = Rng::new(0xDA7A);
    let mut lines = String::new();
    for i in 0..4 {
        let side = 40;
        let sq = 12 + (i * 3) as usize;
        let mask = Mask::from_fn(side, side, |x, y| {
            (8..8 + sq).contains(&x) && (6..6 + sq).contains(&y)
        })
        .unwrap();
        let gt_name = format!("gt_{i}.png");
        vnskit::io::save_mask(&dir.join(&gt_name), &mask).unwrap();

        // Predictions: soft blobs correlated with the gt plus noise.
        let pred_values: Vec<f64> = mask
            .bits()
            .iter()
            .map(|&b| {
                let base = if b { 0.8 } else { 0.15 };
                (base + 0.1 * rng.uniform()).clamp(0.0, 1.0)
            })
            .collect();
        let pred = SoftMap::new(side, side, pred_values).unwrap();
        let pred_name = format!("pred_{i}.png");
        vnskit::io::save_softmap(&dir.join(&pred_name), &pred).unwrap();

        let img = ColorImage::from_fn(side, side, |x, y| {
            if mask.get(x, y) {
                [70, 80, 90]
            } else {
                [150, 140, 130]
            }
        })
        .unwrap();
        let img_name = format!("img_{i}.png");
        vnskit::io::save_color(&dir.join(&img_name), &img).unwrap();

        let inst_name = format!("inst_{i}.png");
        vnskit::io::save_mask(&dir.join(&inst_name), &mask).unwrap();

        lines.push_str(&format!(
            "{{\"image\":\"{img_name}\",\"gt_mask\":\"{gt_name}\",\"pred\":\"{pred_name}\",\"instances\":[{{\"mask\":\"{inst_name}\",\"score\":0.{i}9}}]}}\n"
        ));
    }
    let manifest = dir.join("manifest.jsonl");
    std::fs::write(&manifest, lines).unwrap();
    manifest
}

#[test]
fn a09_end_to_end_determinism() {
    let work = tempfile::tempdir().unwrap();
    let manifest = make_dataset(work.path());
    let manifest_s = manifest.to_str().unwrap();

    let mut firsts: Vec<(String, Vec<(String, Vec<u8>)>)> = Vec::new();
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("eval", vec!["eval".into(), "--manifest".into(), manifest_s.into()]),
        ("vns-score", vec!["vns-score".into(), "--manifest".into(), manifest_s.into()]),
        ("prompts", vec!["prompts".into(), "--manifest".into(), manifest_s.into()]),
        ("demo-forward", vec!["demo-forward".into()]),
    ];

    for jobs in ["1", "3"] {
        for (name, args) in &commands {
            let out_dir = work
                .path()
                .join(format!("out_{name}_j{jobs}_{}", firsts.len()));
            let mut full: Vec<String> = args.clone();
            full.extend([
                "--seed".into(),
                "99".into(),
                "--jobs".into(),
                jobs.into(),
                "--out".into(),
                out_dir.to_str().unwrap().into(),
            ]);
            let argv: Vec<&str> = full.iter().map(String::as_str).collect();
            run_ok(&argv, false);
            let snap = snapshot_dir(&out_dir);
            assert!(!snap.is_empty(), "{name} produced no output");
            match firsts.iter().find(|(n, _)| n == name) {
                None => firsts.push((name.to_string(), snap)),
                Some((_, reference)) => {
                    assert_eq!(
                        reference.len(),
                        snap.len(),
                        "{name}: file sets differ across runs"
                    );
                    for ((fa, ba), (fb, bb)) in reference.iter().zip(&snap) {
                        assert_eq!(fa, fb, "{name}: file name drift");
                        assert_eq!(ba, bb, "{name}: {fa} differs byte-wise (jobs={jobs})");
                    }
                }
            }
        }
    }

    // Infer's final-level hashes must match train's, straight from the
    // demo report.
    let demo_out = work.path().join("out_demo-forward_j1_3");
    let report_json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(demo_out.join("demo_report.json")).unwrap(),
    )
    .unwrap();
    let find = |pass: &str, name: &str| -> String {
        report_json[pass]["maps"]
            .as_array()
            .unwrap()
            .iter()
            .find(|m| m["name"] == name)
            .unwrap_or_else(|| panic!("{pass} missing {name}"))["sha256"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(
        find("train", "train_vns_mask_l2"),
        find("infer", "infer_vns_mask_l2"),
        "level-2 hash must agree across modes"
    );
    assert_eq!(find("train", "train_sam_mask"), find("infer", "infer_sam_mask"));

    report(
        "end_to_end_determinism",
        "eval/vns-score/prompts/demo-forward byte-identical across runs and jobs".to_string(),
    );
}
