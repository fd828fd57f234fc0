//! Latent-space preservation composition.
//!
//! Instead of zero padding after the reference-image latent, the slots
//! after the first carry the video latent with edited cells zeroed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::Frame;
use crate::scalar::Scalar;
use crate::task::TaskKind;
use crate::video::{MaskVideo, VideoTensor};

/// Real tensor laid out `T x H x W x C`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTensor<T> {
    dims: [usize; 4],
    data: Vec<T>,
}

impl<T: Scalar> LatentTensor<T> {
    pub fn new(dims: [usize; 4], data: Vec<T>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("latent dims must be positive: {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "latent {dims:?} needs {n} values, got {}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArithmetic(v.as_f64()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 4]) -> Result<Self> {
        Self::new(dims, vec![T::zero(); dims.iter().product()])
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn t_frames(&self) -> usize {
        self.dims[0]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    fn slot_len(&self) -> usize {
        self.dims[1] * self.dims[2] * self.dims[3]
    }

    /// Values of temporal slot `t`.
    pub fn slot(&self, t: usize) -> &[T] {
        let n = self.slot_len();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn get(&self, t: usize, y: usize, x: usize, c: usize) -> T {
        let [_, h, w, ch] = self.dims;
        self.data[((t * h + y) * w + x) * ch + c]
    }

    pub fn cast<U: Scalar>(&self) -> LatentTensor<U> {
        LatentTensor {
            dims: self.dims,
            data: self.data.iter().map(|&v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Binary latent-resolution mask, same layout as [`LatentTensor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentMask {
    dims: [usize; 4],
    data: Vec<u8>,
}

impl LatentMask {
    pub fn new(dims: [usize; 4], data: Vec<u8>) -> Result<Self> {
        if data.len() != dims.iter().product::<usize>() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!("latent mask {dims:?} vs {} values", data.len())));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidArgument("latent mask values must be 0 or 1".into()));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, t: usize, y: usize, x: usize, c: usize) -> bool {
        let [_, h, w, ch] = self.dims;
        self.data[((t * h + y) * w + x) * ch + c] != 0
    }
}

/// Pixel ranges covered by each latent cell.
///
/// Slot 0 holds frame 0 alone; every later slot covers `temporal_factor`
/// frames. Spatial cells are `spatial_factor` squares, partial at the edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentLayout {
    pub spatial_factor: usize,
    pub temporal_factor: usize,
}

impl LatentLayout {
    pub fn new(spatial_factor: usize, temporal_factor: usize) -> Result<Self> {
        if spatial_factor == 0 || temporal_factor == 0 {
            return Err(Error::InvalidArgument("latent factors must be >= 1".into()));
        }
        Ok(Self {
            spatial_factor,
            temporal_factor,
        })
    }

    pub fn slots(&self, frames: usize) -> usize {
        1 + (frames - 1).div_ceil(self.temporal_factor)
    }

    pub fn spatial(&self, pixels: usize) -> usize {
        pixels.div_ceil(self.spatial_factor)
    }

    pub fn frame_range(&self, slot: usize, frames: usize) -> std::ops::Range<usize> {
        if slot == 0 {
            0..1
        } else {
            let start = 1 + (slot - 1) * self.temporal_factor;
            start..(start + self.temporal_factor).min(frames)
        }
    }

    pub fn pixel_range(&self, cell: usize, pixels: usize) -> std::ops::Range<usize> {
        let start = cell * self.spatial_factor;
        start..(start + self.spatial_factor).min(pixels)
    }
}

/// Deterministic encoder from pixels to latents.
pub trait LatentProvider<T: Scalar> {
    fn layout(&self) -> LatentLayout;

    fn channels(&self) -> usize;

    fn encode_video(&self, video: &VideoTensor) -> Result<LatentTensor<T>>;

    /// Encodes a single image; the result has one temporal slot.
    fn encode_image(&self, image: &Frame) -> Result<LatentTensor<T>>;

    fn latent_dims(&self, frames: usize, height: usize, width: usize) -> [usize; 4] {
        let l = self.layout();
        [l.slots(frames), l.spatial(height), l.spatial(width), self.channels()]
    }
}

/// Average-pooling stand-in for a video VAE. Intensities map to `[0, 1]`;
/// latent channel `j` reads pixel channel `j mod C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MockLatentProvider {
    layout: LatentLayout,
    channels: usize,
}

impl MockLatentProvider {
    pub fn new(spatial_factor: usize, temporal_factor: usize, channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidArgument("latent channels must be >= 1".into()));
        }
        Ok(Self {
            layout: LatentLayout::new(spatial_factor, temporal_factor)?,
            channels,
        })
    }

    fn encode_frames<T: Scalar>(&self, frames: &[Frame]) -> Result<LatentTensor<T>> {
        let f0 = &frames[0];
        let (h, w, pc) = (f0.height(), f0.width(), f0.channels());
        let dims = LatentProvider::<T>::latent_dims(self, frames.len(), h, w);
        let [slots, lh, lw, lc] = dims;
        let l = self.layout;
        let scale = T::lit(1.0 / 255.0);
        let mut data = Vec::with_capacity(dims.iter().product());
        for s in 0..slots {
            let fr = l.frame_range(s, frames.len());
            for cy in 0..lh {
                let yr = l.pixel_range(cy, h);
                for cx in 0..lw {
                    let xr = l.pixel_range(cx, w);
                    let count = fr.len() * yr.len() * xr.len();
                    let mut sums = vec![0u64; pc];
                    for f in &frames[fr.clone()] {
                        for y in yr.clone() {
                            for x in xr.clone() {
                                for (c, s) in sums.iter_mut().enumerate() {
                                    *s += f.get(y, x, c) as u64;
                                }
                            }
                        }
                    }
                    for j in 0..lc {
                        let mean = T::lit(sums[j % pc] as f64) / T::from_count(count);
                        data.push(mean * scale);
                    }
                }
            }
        }
        LatentTensor::new(dims, data)
    }
}

impl<T: Scalar> LatentProvider<T> for MockLatentProvider {
    fn layout(&self) -> LatentLayout {
        self.layout
    }

    fn channels(&self) -> usize {
        self.channels
    }

    fn encode_video(&self, video: &VideoTensor) -> Result<LatentTensor<T>> {
        self.encode_frames(video.frames())
    }

    fn encode_image(&self, image: &Frame) -> Result<LatentTensor<T>> {
        self.encode_frames(std::slice::from_ref(image))
    }
}

pub fn mock_latent_provider(
    spatial_factor: usize,
    temporal_factor: usize,
    channels: usize,
) -> Result<MockLatentProvider> {
    MockLatentProvider::new(spatial_factor, temporal_factor, channels)
}

/// Max-pools the pixel mask onto the provider's latent grid: a cell is set
/// if any pixel it covers is set. Broadcast across latent channels.
pub fn downsample_mask<T: Scalar, P: LatentProvider<T> + ?Sized>(
    mask: &MaskVideo,
    provider: &P,
) -> Result<LatentMask> {
    let (f, h, w) = (mask.len(), mask.height(), mask.width());
    let dims = provider.latent_dims(f, h, w);
    let [slots, lh, lw, lc] = dims;
    let l = provider.layout();
    let mut data = Vec::with_capacity(dims.iter().product());
    for s in 0..slots {
        let fr = l.frame_range(s, f);
        for cy in 0..lh {
            let yr = l.pixel_range(cy, h);
            for cx in 0..lw {
                let xr = l.pixel_range(cx, w);
                let any = mask.frames()[fr.clone()]
                    .iter()
                    .any(|m| yr.clone().any(|y| xr.clone().any(|x| m.get(y, x))));
                data.extend(std::iter::repeat_n(any as u8, lc));
            }
        }
    }
    LatentMask::new(dims, data)
}

/// `[z_image, z_video[1:] ⊙ (1 - z_mask[1:])]` along time; style transfer
/// replaces the second part with zeros.
pub fn compose_cfp<T: Scalar>(
    z_video: &LatentTensor<T>,
    z_image: &LatentTensor<T>,
    z_mask: &LatentMask,
    task: TaskKind,
) -> Result<LatentTensor<T>> {
    let vd = z_video.dims();
    let id = z_image.dims();
    if id[0] != 1 {
        return Err(Error::ShapeMismatch(format!(
            "image latent must have one temporal slot, has {}",
            id[0]
        )));
    }
    if id[1..] != vd[1..] {
        return Err(Error::ShapeMismatch(format!(
            "image latent {id:?} vs video latent {vd:?}"
        )));
    }
    if z_mask.dims() != vd {
        return Err(Error::ShapeMismatch(format!(
            "latent mask {:?} vs video latent {vd:?}",
            z_mask.dims()
        )));
    }
    let n = z_video.slot_len();
    let mut data = Vec::with_capacity(z_video.data.len());
    data.extend_from_slice(z_image.slot(0));
    let rest = &z_video.data[n..];
    if task.drops_preserved_latent() {
        data.extend(std::iter::repeat_n(T::zero(), rest.len()));
    } else {
        data.extend(
            rest.iter()
                .zip(&z_mask.data[n..])
                .map(|(&v, &m)| if m != 0 { T::zero() } else { v }),
        );
    }
    LatentTensor::new(vd, data)
}
