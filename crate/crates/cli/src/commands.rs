use std::collections::BTreeMap;

use discokit::adaptive::{fit_params, AdaptiveDistorter, AdaptiveParams, SimilarityPair};
use discokit::cfp::{compose_cfp, downsample_mask, mock_latent_provider, LatentProvider};
use discokit::imaging::{dilate, sample_dilation_kernel, CannyConfig};
use discokit::io::{load_frames, save_frames, Clip, ClipManifest, RawTensor};
use discokit::metrics::{
    normalized_avg_score, psnr_region, ssim_region, temporal_consistency_pixel, MetricsConfig,
    MetricsTable, Region,
};
use discokit::random::{apply_random_distorter, params_from_seed, RandomDistortionParams, ScaleMode};
use discokit::{Error, Latent, MaskVideo, Result, TaskKind};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::staging::Staged;
use crate::{AdaptiveArgs, CfpArgs, ClipArgs, EvaluateArgs, RandomArgs};

const FRAMES_DIR: &str = "frames";
const SIDECAR: &str = "params.json";

struct Loaded {
    manifest: ClipManifest,
    clip: Clip,
    task: TaskKind,
    seed: u64,
}

fn load(args: &ClipArgs) -> Result<Loaded> {
    let manifest = ClipManifest::load(&args.manifest)?;
    let clip = manifest.load_clip()?;
    info!(
        "loaded {} frames of {}x{} from {}",
        clip.video.len(),
        clip.video.height(),
        clip.video.width(),
        args.manifest.display()
    );
    Ok(Loaded {
        task: args.task.unwrap_or(manifest.task),
        seed: args.seed.or(manifest.seed).unwrap_or(0),
        manifest,
        clip,
    })
}

#[derive(Serialize)]
struct ClipInfo {
    frames: usize,
    height: usize,
    width: usize,
}

impl ClipInfo {
    fn of(m: &ClipManifest) -> Self {
        ClipInfo {
            frames: m.frames,
            height: m.height,
            width: m.width,
        }
    }
}

#[derive(Serialize)]
struct RandomSidecar {
    command: &'static str,
    seed: u64,
    clip: ClipInfo,
    params: RandomDistortionParams,
    overridden: Vec<&'static str>,
}

pub fn distort_random(args: RandomArgs) -> Result<()> {
    let loaded = load(&args.clip)?;
    let mut params = loaded
        .manifest
        .random
        .unwrap_or_else(|| params_from_seed(loaded.seed));
    let mut overridden = Vec::new();
    if loaded.manifest.random.is_some() {
        overridden.push("manifest");
    }
    if let Some(t) = args.theta {
        params.theta = t;
        overridden.push("theta");
    }
    if let Some(c) = args.channel {
        params.target_channel = c;
        overridden.push("channel");
    }
    if let Some(d) = args.delta {
        params.delta = d;
        overridden.push("delta");
    }
    if let Some(b) = args.block {
        params.block = b;
        overridden.push("block");
    }
    if let Some(m) = args.mode {
        params.mode = ScaleMode::from_index(m)?;
        overridden.push("mode");
    }
    params.validate()?;

    let Clip { video, mask, .. } = &loaded.clip;
    let out = apply_random_distorter(video, mask, &params)?;

    let staged = Staged::new(&args.clip.out)?;
    save_frames(&staged.path().join(FRAMES_DIR), &out)?;
    staged.write_json(
        SIDECAR,
        &RandomSidecar {
            command: "distort-random",
            seed: loaded.seed,
            clip: ClipInfo::of(&loaded.manifest),
            params,
            overridden,
        },
    )?;
    staged.commit()
}

#[derive(Serialize)]
struct AdaptiveSidecar {
    command: &'static str,
    task: TaskKind,
    branch: &'static str,
    clip: ClipInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    similarities: Option<SimilarityPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<AdaptiveParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    effective_kernel: Option<usize>,
    overridden: Vec<&'static str>,
}

pub fn distort_adaptive(args: AdaptiveArgs) -> Result<()> {
    let loaded = load(&args.clip)?;
    let canny = CannyConfig {
        low: args.canny_low,
        high: args.canny_high,
    };
    let Clip {
        video,
        mask,
        reference_image,
    } = &loaded.clip;

    let mut overridden = Vec::new();
    let mut distorter = AdaptiveDistorter {
        canny,
        overrides: loaded.manifest.adaptive,
    };
    if loaded.manifest.adaptive.is_some() {
        overridden.push("manifest");
    }
    let flags = [args.alpha.is_some(), args.sigma.is_some(), args.kernel.is_some()];
    let mut fitted_sims = None;
    if flags.iter().any(|&f| f) && !loaded.task.zeroes_control_signal() {
        // Fields not given on the command line come from the manifest or the fit.
        let mut p = match distorter.overrides {
            Some(p) => p,
            None if flags.iter().all(|&f| f) => AdaptiveParams {
                alpha: 0.0,
                sigma: 0.0,
                k: 1,
            },
            None => {
                let sims = discokit::adaptive::compute_similarities(
                    video,
                    mask,
                    reference_image,
                    canny,
                )?;
                fitted_sims = Some(sims);
                fit_params(sims)
            }
        };
        if let Some(a) = args.alpha {
            p.alpha = a;
            overridden.push("alpha");
        }
        if let Some(s) = args.sigma {
            p.sigma = s;
            overridden.push("sigma");
        }
        if let Some(k) = args.kernel {
            p.k = k;
            overridden.push("kernel");
        }
        p.validate()?;
        distorter.overrides = Some(p);
    }

    let result = distorter.run(loaded.task, video, mask, reference_image)?;
    let branch = if loaded.task.zeroes_control_signal() {
        "zero"
    } else {
        "adaptive"
    };
    if let Some(p) = &result.params {
        info!("alpha={} sigma={} k={} (effective {:?})", p.alpha, p.sigma, p.k, result.effective_k);
    }

    let staged = Staged::new(&args.clip.out)?;
    save_frames(&staged.path().join(FRAMES_DIR), &result.video)?;
    staged.write_json(
        SIDECAR,
        &AdaptiveSidecar {
            command: "distort-adaptive",
            task: loaded.task,
            branch,
            clip: ClipInfo::of(&loaded.manifest),
            similarities: result.similarities.or(fitted_sims),
            params: result.params,
            effective_kernel: result.effective_k,
            overridden,
        },
    )?;
    staged.commit()
}

#[derive(Serialize)]
struct CfpSidecar {
    command: &'static str,
    task: TaskKind,
    seed: u64,
    spatial_factor: usize,
    temporal_factor: usize,
    latent_channels: usize,
    dilation_kernel: usize,
    shape: [usize; 4],
    preserved_latent_dropped: bool,
}

pub fn cfp(args: CfpArgs) -> Result<()> {
    let loaded = load(&args.clip)?;
    let kernel = match args.dilate.as_deref() {
        None => 1,
        Some("random") => sample_dilation_kernel(&mut ChaCha8Rng::seed_from_u64(loaded.seed)),
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("--dilate expects an odd integer or `random`, got `{s}`")))?,
    };
    let mask: MaskVideo = loaded.clip.mask.try_map_frames(|m| dilate(m, kernel))?;
    let provider = mock_latent_provider(args.spatial_factor, args.temporal_factor, args.latent_channels)?;
    let z_video: Latent = provider.encode_video(&loaded.clip.video)?;
    let z_image: Latent = provider.encode_image(&loaded.clip.reference_image)?;
    let z_mask = downsample_mask::<f32, _>(&mask, &provider)?;
    let z_images = compose_cfp(&z_video, &z_image, &z_mask, loaded.task)?;

    let staged = Staged::new(&args.clip.out)?;
    RawTensor::from_latent(&z_images).write(&staged.path().join("z_images.odsc"))?;
    staged.write_json(
        SIDECAR,
        &CfpSidecar {
            command: "cfp",
            task: loaded.task,
            seed: loaded.seed,
            spatial_factor: args.spatial_factor,
            temporal_factor: args.temporal_factor,
            latent_channels: args.latent_channels,
            dilation_kernel: kernel,
            shape: z_images.dims(),
            preserved_latent_dropped: loaded.task.drops_preserved_latent(),
        },
    )?;
    staged.commit()
}

#[derive(Serialize)]
struct MethodScore {
    method: String,
    score: f64,
}

#[derive(Serialize)]
struct ScoresReport {
    scores: Vec<MethodScore>,
    columns_used: Vec<String>,
    columns_dropped: Vec<String>,
}

/// Pixel metrics of generated frames against the manifest clip. Metrics
/// whose region is empty are left out with a warning.
fn pixel_metrics(args: &EvaluateArgs) -> Result<Option<BTreeMap<String, f64>>> {
    let (Some(manifest), Some(generated)) = (&args.manifest, &args.generated) else {
        if args.manifest.is_some() {
            warn!("--manifest without --generated: no pixel metrics computed");
        }
        return Ok(None);
    };
    let manifest = ClipManifest::load(manifest)?;
    let clip = manifest.load_clip()?;
    let gen = load_frames(generated, manifest.spec())?;
    let mut out = BTreeMap::new();
    let mut put = |name: &str, value: Result<f64>| -> Result<()> {
        match value {
            Ok(v) => {
                out.insert(name.to_string(), v);
                Ok(())
            }
            Err(Error::DegenerateRegion) => {
                warn!("{name}: selected region is empty, skipped");
                Ok(())
            }
            Err(e) => Err(e),
        }
    };
    put("PSNR_P", psnr_region(&gen, &clip.video, &clip.mask, Region::Preserved))?;
    put("SSIM_P", ssim_region(&gen, &clip.video, &clip.mask, Region::Preserved))?;
    if gen.len() >= 2 {
        put("TC_pixel", temporal_consistency_pixel(&gen))?;
    }
    if let Some(bg) = &args.background {
        let bg = load_frames(bg, manifest.spec())?;
        put("PSNR_E", psnr_region(&gen, &bg, &clip.mask, Region::Edited))?;
        put("SSIM_E", ssim_region(&gen, &bg, &clip.mask, Region::Edited))?;
    }
    Ok(Some(out))
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    if args.ingest_csv.is_none() && args.generated.is_none() {
        return Err(Error::InvalidArgument(
            "evaluate needs --ingest-csv and/or --manifest with --generated".into(),
        ));
    }
    let config = match &args.metrics_config {
        Some(p) => MetricsConfig::load(p)?,
        None => MetricsConfig::default(),
    };
    let computed = pixel_metrics(&args)?;
    let table = match &args.ingest_csv {
        Some(p) => {
            let mut t: MetricsTable<f64> = MetricsTable::load_csv(p, &config)?;
            if let Some(m) = &computed {
                for (name, &v) in m {
                    if !t.set(&args.method, name, v) {
                        info!("computed metric {name} has no column in the ingested table");
                    }
                }
                t = t.validated()?;
            }
            Some(t)
        }
        None => None,
    };
    let scores = table.as_ref().map(normalized_avg_score).transpose()?;

    let staged = Staged::new(&args.out)?;
    if let Some(m) = &computed {
        staged.write_json(
            "metrics.json",
            &serde_json::json!({ "method": args.method, "metrics": m }),
        )?;
        let path = staged.path().join("metrics.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["metric", "value"])?;
        for (k, v) in m {
            w.write_record([k.as_str(), &format!("{v:.6}")])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    if let Some(s) = &scores {
        for d in &s.dropped {
            warn!("column {d} is constant across methods and was dropped");
        }
        let path = staged.path().join("scores.csv");
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        s.write_csv(file)?;
        staged.write_json(
            "scores.json",
            &ScoresReport {
                scores: s
                    .methods
                    .iter()
                    .zip(&s.scores)
                    .map(|(m, &v)| MethodScore {
                        method: m.clone(),
                        score: v,
                    })
                    .collect(),
                columns_used: s.used.clone(),
                columns_dropped: s.dropped.clone(),
            },
        )?;
    }
    staged.commit()
}
