use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vnskit::cli::{self, EXIT_USAGE};
use vnskit::selftest::FaultInjection;
use vnskit::Config;

#[derive(Parser)]
#[command(name = "vnskit", version, about = "Visually non-salient segmentation toolkit")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file of key=value lines; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports and previews.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for record-level parallelism; results are
    /// identical for every value.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Extra key=value overrides (repeatable); same keys as the config
    /// file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    #[arg(long, global = true)]
    binarize_threshold: Option<u8>,

    #[arg(long, global = true)]
    vns_threshold: Option<f64>,

    #[arg(long, global = true)]
    biou_fraction: Option<f64>,

    #[arg(long, global = true)]
    noise_scale: Option<f64>,

    #[arg(long, global = true)]
    n_points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate predictions against ground truths over a manifest.
    Eval {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Score records for visual non-saliency and partition them.
    VnsScore {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Generate box/point/coarse-mask prompts per record.
    Prompts {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Run the mining + decoder forward passes on synthetic inputs.
    DemoForward {
        /// Load mining-module weights from a weight file instead of
        /// seeding them.
        #[arg(long)]
        nsfm_weights: Option<PathBuf>,

        /// Load decoder weights from a weight file instead of seeding.
        #[arg(long)]
        decoder_weights: Option<PathBuf>,

        /// Write the resolved weights into the output directory.
        #[arg(long)]
        save_weights: bool,
    },
    /// Run the verification suites (oracle equivalence, wavelet
    /// round-trip, gradient checks).
    Selftest {
        /// Corrupt the named site to exercise the failure path.
        #[arg(long, value_parser = parse_fault, hide = true)]
        inject_fault: Option<FaultInjection>,
    },
}

fn parse_fault(s: &str) -> Result<FaultInjection, String> {
    match s {
        "haar" => Ok(FaultInjection::HaarCoefficient),
        other => Err(format!("unknown fault site {other}")),
    }
}

fn build_config(common: &CommonArgs) -> vnskit::Result<Config> {
    let mut cfg = Config::default();
    if let Some(path) = &common.config {
        cfg.load_overrides(path)?;
    }
    for kv in &common.sets {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            vnskit::Error::Config(format!("--set expects KEY=VALUE, got {kv}"))
        })?;
        cfg.apply(k.trim(), v.trim())?;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = common.binarize_threshold {
        cfg.binarize_threshold = v;
    }
    if let Some(v) = common.vns_threshold {
        cfg.vns_threshold = v;
    }
    if let Some(v) = common.biou_fraction {
        cfg.biou_fraction = v;
    }
    if let Some(v) = common.noise_scale {
        cfg.noise_scale = v;
    }
    if let Some(v) = common.n_points {
        cfg.n_points = v;
    }
    Ok(cfg)
}

fn run() -> i32 {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let out = &cli.common.out;
    let result = match &cli.command {
        Command::Eval { manifest } => cli::cmd_eval(manifest, &cfg, out),
        Command::VnsScore { manifest } => cli::cmd_vns_score(manifest, &cfg, out),
        Command::Prompts { manifest } => cli::cmd_prompts(manifest, &cfg, out),
        Command::DemoForward { nsfm_weights, decoder_weights, save_weights } => {
            let opts = cli::DemoWeightOptions {
                load_nsfm: nsfm_weights.clone(),
                load_decoder: decoder_weights.clone(),
                save: *save_weights,
            };
            cli::cmd_demo_forward_with(&cfg, out, &opts)
        }
        Command::Selftest { inject_fault } => cli::cmd_selftest(*inject_fault, Some(out)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code_for(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}
