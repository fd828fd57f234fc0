//! Training-time random distortion: per-channel colour arithmetic followed
//! by mosaicking, pasted into the masked region.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{mosaic, Frame};
use crate::video::{composite, MaskVideo, VideoTensor};

pub const THETA_RANGE: (f64, f64) = (1.5, 3.0);
pub const DELTAS: [i32; 4] = [-100, -50, 50, 100];
pub const BLOCKS: [usize; 7] = [8, 10, 12, 15, 16, 20, 24];

/// Whether the target channel is multiplied or divided by `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMode {
    Up,
    Down,
}

impl ScaleMode {
    pub fn from_index(mode: u8) -> Result<Self> {
        match mode {
            0 => Ok(ScaleMode::Up),
            1 => Ok(ScaleMode::Down),
            m => Err(Error::InvalidArgument(format!("scaling mode must be 0 or 1, got {m}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            ScaleMode::Up => 0,
            ScaleMode::Down => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomDistortionParams {
    pub theta: f64,
    pub target_channel: usize,
    pub delta: i32,
    pub block: usize,
    pub mode: ScaleMode,
}

impl RandomDistortionParams {
    /// Checks the sampling-set invariants; used for explicit overrides.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = THETA_RANGE;
        if !(lo..=hi).contains(&self.theta) {
            return Err(Error::InvalidArgument(format!(
                "theta {} outside [{lo}, {hi}]",
                self.theta
            )));
        }
        if self.target_channel > 2 {
            return Err(Error::InvalidArgument(format!(
                "target channel {} outside 0..=2",
                self.target_channel
            )));
        }
        if !DELTAS.contains(&self.delta) {
            return Err(Error::InvalidArgument(format!(
                "delta {} not in {DELTAS:?}",
                self.delta
            )));
        }
        if !BLOCKS.contains(&self.block) {
            return Err(Error::InvalidArgument(format!(
                "block {} not in {BLOCKS:?}",
                self.block
            )));
        }
        Ok(())
    }
}

/// Draws one parameter set. Draw order is fixed: theta, channel, delta,
/// block, mode.
pub fn sample_random_params<R: Rng + ?Sized>(rng: &mut R) -> RandomDistortionParams {
    let theta = rng.gen_range(THETA_RANGE.0..=THETA_RANGE.1);
    let target_channel = rng.gen_range(0..3);
    let delta = *DELTAS.choose(rng).expect("non-empty");
    let block = *BLOCKS.choose(rng).expect("non-empty");
    let mode = if rng.gen_bool(0.5) { ScaleMode::Down } else { ScaleMode::Up };
    RandomDistortionParams {
        theta,
        target_channel,
        delta,
        block,
        mode,
    }
}

pub fn params_from_seed(seed: u64) -> RandomDistortionParams {
    sample_random_params(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn distort_frame(frame: &Frame, p: &RandomDistortionParams) -> Frame {
    let mut out = frame.clone();
    let theta = p.theta;
    let delta = p.delta;
    for px in out.data_mut().chunks_exact_mut(3) {
        for (c, v) in px.iter_mut().enumerate() {
            let x = *v as f64;
            let y = if c == p.target_channel {
                match p.mode {
                    ScaleMode::Up => x * theta,
                    ScaleMode::Down => x / theta,
                }
            } else if c == 0 {
                x + delta as f64
            } else {
                x - delta as f64
            };
            *v = y.round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

/// Colour distortion: the target channel is scaled by `theta`; channel 0
/// (when not the target) gets `+delta`, the others `-delta`.
pub fn color_distort(video: &VideoTensor, params: &RandomDistortionParams) -> Result<VideoTensor> {
    if video.channels() != 3 {
        return Err(Error::InvalidArgument("colour distortion needs 3-channel video".into()));
    }
    video.try_map_frames(|_, f| Ok(distort_frame(f, params)))
}

/// Colour distortion followed by mosaicking, without masking.
pub fn distorted_video(video: &VideoTensor, params: &RandomDistortionParams) -> Result<VideoTensor> {
    if video.channels() != 3 {
        return Err(Error::InvalidArgument("colour distortion needs 3-channel video".into()));
    }
    video.try_map_frames(|_, f| mosaic(&distort_frame(f, params), params.block))
}

/// Random distortion control signal: distorted pixels inside the mask,
/// the untouched reference outside.
pub fn apply_random_distorter(
    video: &VideoTensor,
    mask: &MaskVideo,
    params: &RandomDistortionParams,
) -> Result<VideoTensor> {
    video.check_mask(mask)?;
    let distorted = distorted_video(video, params)?;
    composite(video, &distorted, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixel_video(rgb: [u8; 3]) -> VideoTensor {
        VideoTensor::new(vec![Frame::new(1, 1, 3, rgb.to_vec()).unwrap()]).unwrap()
    }

    fn params(theta: f64, c: usize, delta: i32, mode: ScaleMode) -> RandomDistortionParams {
        RandomDistortionParams {
            theta,
            target_channel: c,
            delta,
            block: 8,
            mode,
        }
    }

    #[test]
    fn color_branches() {
        let out = color_distort(&pixel_video([100, 100, 100]), &params(2.0, 1, 50, ScaleMode::Up)).unwrap();
        assert_eq!(out.frame(0).data(), &[150, 200, 50]);
        let out = color_distort(&pixel_video([200, 30, 255]), &params(2.0, 0, 100, ScaleMode::Down)).unwrap();
        assert_eq!(out.frame(0).data(), &[100, 0, 155]);
    }

    #[test]
    fn zero_is_fixed_under_scaling() {
        for mode in [ScaleMode::Up, ScaleMode::Down] {
            let out = color_distort(&pixel_video([0, 0, 0]), &params(1.5, 2, 50, mode)).unwrap();
            assert_eq!(out.frame(0).get(0, 0, 2), 0);
        }
    }

    #[test]
    fn division_rounds_to_nearest() {
        // 5 / 3 = 1.67 -> 2
        let out = color_distort(&pixel_video([5, 0, 0]), &params(3.0, 0, 50, ScaleMode::Down)).unwrap();
        assert_eq!(out.frame(0).get(0, 0, 0), 2);
    }

    #[test]
    fn same_seed_same_params() {
        assert_eq!(params_from_seed(17), params_from_seed(17));
        let p = params_from_seed(17);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn validate_rejects_out_of_set() {
        let mut p = params_from_seed(1);
        p.block = 9;
        assert!(p.validate().is_err());
        let mut p = params_from_seed(1);
        p.theta = 3.5;
        assert!(p.validate().is_err());
        let mut p = params_from_seed(1);
        p.delta = 10;
        assert!(p.validate().is_err());
        let mut p = params_from_seed(1);
        p.target_channel = 3;
        assert!(p.validate().is_err());
    }

    #[test]
    fn gray_video_rejected() {
        let v = VideoTensor::zeros(1, 2, 2, 1).unwrap();
        assert!(color_distort(&v, &params_from_seed(0)).is_err());
    }
}
