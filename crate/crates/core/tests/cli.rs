//! Binary-level behavior: exit codes, config precedence, fault
//! injection, and report contents.

use std::fs;
use std::path::Path;
use std::process::Command;

use vnskit::raster::{ColorImage, Mask};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vnskit")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_square_fixture(dir: &Path) -> std::path::PathBuf {
    let mask = Mask::from_fn(32, 32, |x, y| (8..24).contains(&x) && (10..26).contains(&y)).unwrap();
    vnskit::io::save_mask(&dir.join("gt.png"), &mask).unwrap();
    let img = ColorImage::from_fn(32, 32, |x, y| {
        if mask.get(x, y) {
            [60, 70, 80]
        } else {
            [170, 160, 150]
        }
    })
    .unwrap();
    vnskit::io::save_color(&dir.join("img.png"), &img).unwrap();
    let manifest = dir.join("m.jsonl");
    fs::write(&manifest, "{\"image\":\"img.png\",\"gt_mask\":\"gt.png\"}\n").unwrap();
    manifest
}

#[test]
fn empty_manifest_exits_2_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("empty.jsonl");
    fs::write(&manifest, "").unwrap();
    let (code, _, stderr) = run(&[
        "eval",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("manifest is empty"), "stderr: {stderr}");
}

#[test]
fn unreadable_record_exits_1_and_report_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let mask = Mask::from_fn(16, 16, |x, _| x < 8).unwrap();
    vnskit::io::save_mask(&dir.path().join("gt.png"), &mask).unwrap();
    vnskit::io::save_mask(&dir.path().join("p.png"), &mask).unwrap();
    let manifest = dir.path().join("m.jsonl");
    fs::write(
        &manifest,
        concat!(
            "{\"image\":\"one.png\",\"gt_mask\":\"gt.png\",\"pred\":\"p.png\"}\n",
            "{\"image\":\"two.png\",\"gt_mask\":\"gt.png\",\"pred\":\"gone.png\"}\n",
        ),
    )
    .unwrap();
    let out = dir.path().join("o");
    let (code, _, _) = run(&[
        "eval",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("eval_report.json")).unwrap()).unwrap();
    assert_eq!(report["failures"][0]["image"], "two.png");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_square_fixture(dir.path());
    let cfg = dir.path().join("cfg.txt");
    fs::write(&cfg, "noise_scale = 0.5\nn_points = 4\n").unwrap();

    // File alone: 4 points.
    let out1 = dir.path().join("o1");
    let (code, _, _) = run(&[
        "prompts",
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r1: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("prompts.json")).unwrap()).unwrap();
    assert_eq!(r1["records"][0]["points"].as_array().unwrap().len(), 4);
    assert_eq!(r1["config"]["noise_scale"], 0.5);

    // Flag wins over the file: zero noise makes the noisy box the gt box.
    let out2 = dir.path().join("o2");
    let (code, _, _) = run(&[
        "prompts",
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--noise-scale",
        "0",
        "--set",
        "n_points=7",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out2.join("prompts.json")).unwrap()).unwrap();
    assert_eq!(r2["records"][0]["points"].as_array().unwrap().len(), 7);
    assert_eq!(r2["records"][0]["box"], r2["records"][0]["noisy_box"]);
}

#[test]
fn selftest_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(&["selftest", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    for suite in [
        "iou_exhaustive_3x3",
        "boundary_iou_exhaustive_3x3",
        "haar_roundtrip",
        "structure_loss_gradient",
        "dice_loss_gradient",
    ] {
        assert!(stdout.contains(&format!("PASS {suite}")), "stdout: {stdout}");
    }
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("selftest_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["passed"], true);
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 5);
    for s in suites {
        assert!(s["max_error"].is_number(), "suite missing max_error: {s}");
    }
}

#[test]
fn fault_injection_fails_naming_the_property() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(&[
        "selftest",
        "--inject-fault",
        "haar",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL haar_roundtrip"), "stdout: {stdout}");
}

#[test]
fn demo_forward_inconsistent_shapes_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "demo-forward",
        "--set",
        "nsfm_out_channels=8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("vns_channels"), "stderr: {stderr}");
}

#[test]
fn demo_forward_writes_and_reloads_weight_files() {
    let dir = tempfile::tempdir().unwrap();
    let shrink: Vec<&str> = vec![
        "--set", "decoder_token_dim=32",
        "--set", "decoder_num_heads=4",
        "--set", "decoder_ffn_dim=64",
        "--set", "decoder_emb_height=4",
        "--set", "decoder_emb_width=4",
        "--set", "decoder_upscaled_channels=8",
        "--set", "decoder_vns_channels=8",
        "--set", "decoder_mask_fusion_hidden=4",
        "--set", "nsfm_height=4",
        "--set", "nsfm_width=4",
        "--set", "nsfm_in_channels=8",
        "--set", "nsfm_band_channels=8",
        "--set", "nsfm_out_channels=8",
    ];
    let d1 = dir.path().join("seeded");
    let mut args = vec!["demo-forward", "--seed", "5", "--save-weights"];
    args.extend(&shrink);
    args.extend(["--out", d1.to_str().unwrap()]);
    let (code, _, stderr) = run(&args);
    assert_eq!(code, 0, "{stderr}");
    let nsfm_file = d1.join("nsfm_weights.vnsw");
    let dec_file = d1.join("decoder_weights.vnsw");
    assert!(nsfm_file.exists() && dec_file.exists());

    let mut load_run = |out: &Path| -> Vec<u8> {
        let mut args = vec![
            "demo-forward",
            "--seed",
            "5",
            "--nsfm-weights",
            nsfm_file.to_str().unwrap(),
            "--decoder-weights",
            dec_file.to_str().unwrap(),
        ];
        args.extend(&shrink);
        args.extend(["--out", out.to_str().unwrap()]);
        let (code, _, stderr) = run(&args);
        assert_eq!(code, 0, "{stderr}");
        fs::read(out.join("demo_report.json")).unwrap()
    };
    let d2 = dir.path().join("loaded_a");
    let d3 = dir.path().join("loaded_b");
    assert_eq!(load_run(&d2), load_run(&d3), "loaded runs must agree bitwise");

    // A weight file with a mismatched config is refused.
    let (code, _, stderr) = run(&[
        "demo-forward",
        "--nsfm-weights",
        nsfm_file.to_str().unwrap(),
        "--out",
        dir.path().join("bad").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn vns_score_partition_files_agree_with_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_square_fixture(dir.path());
    let out = dir.path().join("o");
    let (code, _, _) = run(&[
        "vns-score",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("vns_report.json")).unwrap()).unwrap();
    let score = report["records"][0]["vns_score"].as_f64().unwrap();
    let in_non = fs::read_to_string(out.join("non_salient.txt")).unwrap().contains("img.png");
    let in_sal = fs::read_to_string(out.join("salient.txt")).unwrap().contains("img.png");
    assert_eq!(in_non, score >= 0.7);
    assert_ne!(in_non, in_sal);
    assert_eq!(report["config"]["vns_threshold"], 0.7);
}
