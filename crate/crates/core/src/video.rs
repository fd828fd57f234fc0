use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::{BinaryMask, Frame};

/// A stack of equally shaped frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoTensor {
    frames: Vec<Frame>,
}

impl VideoTensor {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidArgument("video needs at least one frame".into()))?;
        if let Some(i) = frames.iter().position(|f| !f.same_shape(first)) {
            return Err(Error::ShapeMismatch(format!("frame {i} differs from frame 0")));
        }
        Ok(Self { frames })
    }

    pub fn zeros(frames: usize, height: usize, width: usize, channels: usize) -> Result<Self> {
        let f = Frame::filled(height, width, channels, 0)?;
        Self::new(vec![f; frames])
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn channels(&self) -> usize {
        self.frames[0].channels()
    }

    /// `(frames, height, width, channels)`.
    pub fn dims(&self) -> [usize; 4] {
        [self.len(), self.height(), self.width(), self.channels()]
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &Frame {
        &self.frames[i]
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn is_all_zero(&self) -> bool {
        self.frames.iter().all(|f| f.data().iter().all(|&v| v == 0))
    }

    /// Frame-parallel map.
    pub fn try_map_frames<F>(&self, f: F) -> Result<VideoTensor>
    where
        F: Fn(usize, &Frame) -> Result<Frame> + Sync + Send,
    {
        let frames = self
            .frames
            .par_iter()
            .enumerate()
            .map(|(i, fr)| f(i, fr))
            .collect::<Result<Vec<_>>>()?;
        VideoTensor::new(frames)
    }

    /// Flattened `F x H x W x C` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.frames.iter().flat_map(|f| f.data().iter().copied()).collect()
    }

    pub fn from_bytes(dims: [usize; 4], bytes: &[u8]) -> Result<Self> {
        let [f, h, w, c] = dims;
        let per = h * w * c;
        if bytes.len() != f * per {
            return Err(Error::ShapeMismatch(format!(
                "{dims:?} video needs {} bytes, got {}",
                f * per,
                bytes.len()
            )));
        }
        let frames = bytes
            .chunks_exact(per.max(1))
            .map(|chunk| Frame::new(h, w, c, chunk.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames)
    }

    pub fn check_mask(&self, mask: &MaskVideo) -> Result<()> {
        if mask.len() != self.len() || !mask.frame(0).same_spatial(self.height(), self.width()) {
            return Err(Error::ShapeMismatch(format!(
                "video {}x{}x{} vs mask {}x{}x{}",
                self.len(),
                self.height(),
                self.width(),
                mask.len(),
                mask.height(),
                mask.width()
            )));
        }
        Ok(())
    }
}

/// Per-frame binary masks; set pixels mark the edited region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskVideo {
    frames: Vec<BinaryMask>,
}

impl MaskVideo {
    pub fn new(frames: Vec<BinaryMask>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidArgument("mask video needs at least one frame".into()))?;
        let (h, w) = (first.height(), first.width());
        if let Some(i) = frames.iter().position(|m| !m.same_spatial(h, w)) {
            return Err(Error::ShapeMismatch(format!("mask frame {i} differs from frame 0")));
        }
        Ok(Self { frames })
    }

    pub fn filled(frames: usize, height: usize, width: usize, set: bool) -> Result<Self> {
        Self::new(vec![BinaryMask::filled(height, width, set)?; frames])
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn frames(&self) -> &[BinaryMask] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &BinaryMask {
        &self.frames[i]
    }

    pub fn complement(&self) -> MaskVideo {
        MaskVideo {
            frames: self.frames.iter().map(BinaryMask::complement).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.frames.iter().map(BinaryMask::count).sum()
    }

    pub fn try_map_frames<F>(&self, f: F) -> Result<MaskVideo>
    where
        F: Fn(&BinaryMask) -> Result<BinaryMask> + Sync + Send,
    {
        let frames = self.frames.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        MaskVideo::new(frames)
    }
}

/// Frame-wise `inside ⊙ M + base ⊙ (1 - M)`.
pub fn composite(base: &VideoTensor, inside: &VideoTensor, mask: &MaskVideo) -> Result<VideoTensor> {
    base.check_mask(mask)?;
    if base.dims() != inside.dims() {
        return Err(Error::ShapeMismatch("composite operands differ".into()));
    }
    base.try_map_frames(|i, f| f.composite(inside.frame(i), mask.frame(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_frames() {
        let a = Frame::filled(2, 2, 3, 0).unwrap();
        let b = Frame::filled(2, 3, 3, 0).unwrap();
        assert!(VideoTensor::new(vec![a, b]).is_err());
        assert!(VideoTensor::new(vec![]).is_err());
    }

    #[test]
    fn bytes_round_trip() {
        let v = VideoTensor::new(vec![
            Frame::from_fn(2, 3, 3, |y, x, c| (y * 9 + x * 3 + c) as u8).unwrap(),
            Frame::filled(2, 3, 3, 7).unwrap(),
        ])
        .unwrap();
        assert_eq!(VideoTensor::from_bytes(v.dims(), &v.to_bytes()).unwrap(), v);
    }

    #[test]
    fn mask_dimension_check() {
        let v = VideoTensor::zeros(2, 4, 4, 3).unwrap();
        assert!(v.check_mask(&MaskVideo::filled(2, 4, 4, true).unwrap()).is_ok());
        assert!(v.check_mask(&MaskVideo::filled(3, 4, 4, true).unwrap()).is_err());
        assert!(v.check_mask(&MaskVideo::filled(2, 4, 5, true).unwrap()).is_err());
    }
}
