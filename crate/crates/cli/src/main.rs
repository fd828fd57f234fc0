use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use discokit::TaskKind;

mod commands;
mod staging;

#[derive(Debug, Parser)]
#[command(name = "discokit", version, about = "Distortion control signals, latent composition and metrics for mask-guided video editing")]
struct Cli {
    /// Worker threads for frame-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random colour + mosaic distortion of the masked region (training signal).
    DistortRandom(RandomArgs),
    /// Similarity-fitted contrast + blur distortion (inference signal).
    DistortAdaptive(AdaptiveArgs),
    /// Compose the image latent with the preserved-region video latent.
    Cfp(CfpArgs),
    /// Region metrics and min-max normalized average scores.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct ClipArgs {
    /// Clip manifest (TOML).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; replaced atomically on success.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the manifest seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the manifest task.
    #[arg(long)]
    task: Option<TaskKind>,
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[command(flatten)]
    clip: ClipArgs,
    /// Scaling factor in [1.5, 3.0].
    #[arg(long)]
    theta: Option<f64>,
    /// Scaled channel, 0..=2.
    #[arg(long)]
    channel: Option<usize>,
    /// Colour offset, one of -100, -50, 50, 100.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<i32>,
    /// Mosaic block, one of 8, 10, 12, 15, 16, 20, 24.
    #[arg(long)]
    block: Option<usize>,
    /// Scaling mode: 0 multiplies, 1 divides.
    #[arg(long)]
    mode: Option<u8>,
}

#[derive(Debug, Args)]
struct AdaptiveArgs {
    #[command(flatten)]
    clip: ClipArgs,
    /// Contrast factor.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Blur sigma.
    #[arg(long)]
    sigma: Option<f64>,
    /// Odd blur kernel size.
    #[arg(long)]
    kernel: Option<usize>,
    #[arg(long, default_value_t = 100.0)]
    canny_low: f64,
    #[arg(long, default_value_t = 200.0)]
    canny_high: f64,
}

#[derive(Debug, Args)]
struct CfpArgs {
    #[command(flatten)]
    clip: ClipArgs,
    /// Pixel-space mask dilation: an odd kernel size, or `random` to draw
    /// from {1, 3, ..., 21} with the seed.
    #[arg(long)]
    dilate: Option<String>,
    #[arg(long, default_value_t = 8)]
    spatial_factor: usize,
    #[arg(long, default_value_t = 4)]
    temporal_factor: usize,
    #[arg(long, default_value_t = 16)]
    latent_channels: usize,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    out: PathBuf,
    /// Raw per-method metrics, header `method,<metric>,...`.
    #[arg(long)]
    ingest_csv: Option<PathBuf>,
    /// Metric directions and inclusion (TOML).
    #[arg(long)]
    metrics_config: Option<PathBuf>,
    /// Clip manifest supplying the reference video and mask.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Generated frames to score against the manifest clip.
    #[arg(long, requires = "manifest")]
    generated: Option<PathBuf>,
    /// Background frames for edited-region (removal) metrics.
    #[arg(long, requires = "generated")]
    background: Option<PathBuf>,
    /// Row name for computed metrics when merging with the CSV.
    #[arg(long, default_value = "generated")]
    method: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }

    let result = match cli.command {
        Command::DistortRandom(a) => commands::distort_random(a),
        Command::DistortAdaptive(a) => commands::distort_adaptive(a),
        Command::Cfp(a) => commands::cfp(a),
        Command::Evaluate(a) => commands::evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = e.category();
            let msg = serde_json::json!({ "error": cat.as_str(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(cat.exit_code() as u8)
        }
    }
}
