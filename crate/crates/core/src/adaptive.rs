//! Inference-time adaptive distortion.
//!
//! Edge-map similarities of the edited region pick a contrast factor and a
//! blur strength through fixed quadratics; the scaled, blurred reference is
//! pasted into the masked region.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{
    canny, gaussian_blur, ssim_masked, BinaryMask, CannyConfig, EdgeMap, Frame, GaussianKernel,
};
use crate::task::TaskKind;
use crate::video::{MaskVideo, VideoTensor};

/// Weight of the video-similarity term in the blur strength.
pub const VIDEO_TERM_WEIGHT: f64 = 1.2;
/// Scale from the combined polynomial to sigma and kernel size.
pub const BLUR_SCALE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPair {
    /// Reference image vs. first frame, edited region.
    pub sim_i: f64,
    /// Mean over consecutive frame pairs, edited region.
    pub sim_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    pub alpha: f64,
    pub sigma: f64,
    pub k: usize,
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.sigma.is_finite() {
            return Err(Error::InvalidArgument("alpha and sigma must be finite".into()));
        }
        if self.k == 0 || self.k.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "kernel size must be odd and positive, got {}",
                self.k
            )));
        }
        Ok(())
    }

    /// Kernel size actually used on an `height x width` frame.
    pub fn effective_k(&self, height: usize, width: usize) -> usize {
        self.k.min(2 * height.min(width) - 1)
    }
}

/// `3000 s^2 + 6000 s + 300`, driven by the image similarity.
pub fn image_term(sim_i: f64) -> f64 {
    3000.0 * sim_i * sim_i + 6000.0 * sim_i + 300.0
}

/// `4622.64 s^2 + 92453.28 s + 4623.64`, driven by the video similarity.
pub fn video_term(sim_v: f64) -> f64 {
    4622.64 * sim_v * sim_v + 92453.28 * sim_v + 4623.64
}

/// Contrast factor `-36 s^2 + 72 s - 35`; equals 1 at `s = 1`.
pub fn contrast(sim_v: f64) -> f64 {
    -36.0 * sim_v * sim_v + 72.0 * sim_v - 35.0
}

/// Nearest odd integer, floored at 1. Ties between two odd integers
/// (even `x`) go upward.
pub fn nearest_odd(x: f64) -> usize {
    if !x.is_finite() || x <= 1.0 {
        return 1;
    }
    let n = ((x - 1.0) / 2.0).round();
    2 * (n as usize) + 1
}

pub fn fit_params(sims: SimilarityPair) -> AdaptiveParams {
    let raw = image_term(sims.sim_i) + VIDEO_TERM_WEIGHT * video_term(sims.sim_v);
    let scaled = BLUR_SCALE * raw;
    AdaptiveParams {
        alpha: contrast(sims.sim_v),
        sigma: scaled.max(crate::imaging::MIN_SIGMA),
        k: nearest_odd(scaled),
    }
}

fn edge_ssim(a: &EdgeMap, b: &EdgeMap, mask: &BinaryMask, what: &str) -> Result<f64> {
    match ssim_masked::<f64>(a.as_frame(), b.as_frame(), Some(mask)) {
        Err(Error::DegenerateRegion) => {
            warn!("{what}: empty mask, using global SSIM");
            ssim_masked(a.as_frame(), b.as_frame(), None)
        }
        other => other,
    }
}

pub fn compute_similarities(
    video: &VideoTensor,
    mask: &MaskVideo,
    ref_image: &Frame,
    config: CannyConfig,
) -> Result<SimilarityPair> {
    video.check_mask(mask)?;
    if video.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "similarities need at least 2 frames, got {}",
            video.len()
        )));
    }
    if !ref_image.same_spatial(video.height(), video.width()) {
        return Err(Error::ShapeMismatch(format!(
            "reference image {}x{} vs video {}x{}",
            ref_image.height(),
            ref_image.width(),
            video.height(),
            video.width()
        )));
    }
    let edges = video
        .frames()
        .par_iter()
        .map(|f| canny(f, config))
        .collect::<Result<Vec<_>>>()?;
    let ref_edges = canny(ref_image, config)?;
    let sim_i = edge_ssim(&edges[0], &ref_edges, mask.frame(0), "frame 0 vs reference image")?;
    let pairs = (1..edges.len())
        .into_par_iter()
        .map(|t| edge_ssim(&edges[t], &edges[t - 1], mask.frame(t), &format!("frame {t}")))
        .collect::<Result<Vec<_>>>()?;
    let sim_v = pairs.iter().sum::<f64>() / pairs.len() as f64;
    Ok(SimilarityPair { sim_i, sim_v })
}

/// Contrast scaling, Gaussian blur of the scaled frame, masked paste.
pub fn apply_adaptive_distorter(
    video: &VideoTensor,
    mask: &MaskVideo,
    params: &AdaptiveParams,
) -> Result<VideoTensor> {
    video.check_mask(mask)?;
    params.validate()?;
    let k = params.effective_k(video.height(), video.width());
    let kernel = GaussianKernel::new(params.sigma, k)?;
    let alpha = params.alpha;
    video.try_map_frames(|i, frame| {
        let m = mask.frame(i);
        if m.is_empty() {
            return Ok(frame.clone());
        }
        let scaled = frame.map(|v| (alpha * v as f64).round().clamp(0.0, 255.0) as u8);
        let blurred = gaussian_blur(&scaled, &kernel);
        frame.composite(&blurred, m)
    })
}

/// Everything one adaptive run produced.
#[derive(Debug, Clone)]
pub struct AodcOutput {
    pub video: VideoTensor,
    pub similarities: Option<SimilarityPair>,
    pub params: Option<AdaptiveParams>,
    /// Kernel size after capping to the frame.
    pub effective_k: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct AdaptiveDistorter {
    pub canny: CannyConfig,
    /// Skip fitting and use these parameters.
    pub overrides: Option<AdaptiveParams>,
}

impl AdaptiveDistorter {
    pub fn run(
        &self,
        task: TaskKind,
        video: &VideoTensor,
        mask: &MaskVideo,
        ref_image: &Frame,
    ) -> Result<AodcOutput> {
        video.check_mask(mask)?;
        if task.zeroes_control_signal() {
            let [f, h, w, c] = video.dims();
            return Ok(AodcOutput {
                video: VideoTensor::zeros(f, h, w, c)?,
                similarities: None,
                params: None,
                effective_k: None,
            });
        }
        let (similarities, params) = match self.overrides {
            Some(p) => (None, p),
            None => {
                let sims = compute_similarities(video, mask, ref_image, self.canny)?;
                (Some(sims), fit_params(sims))
            }
        };
        let out = apply_adaptive_distorter(video, mask, &params)?;
        Ok(AodcOutput {
            video: out,
            similarities,
            effective_k: Some(params.effective_k(video.height(), video.width())),
            params: Some(params),
        })
    }
}

/// Adaptive control signal for `task` with default settings.
pub fn make_aodc(
    task: TaskKind,
    video: &VideoTensor,
    mask: &MaskVideo,
    ref_image: &Frame,
) -> Result<VideoTensor> {
    AdaptiveDistorter::default()
        .run(task, video, mask, ref_image)
        .map(|o| o.video)
}
