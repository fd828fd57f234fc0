use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rounds to the nearest integer and saturates to `[0, 255]`.
pub fn clip_u8<T: Scalar>(value: T) -> Result<u8> {
    if !value.is_finite() {
        return Err(Error::InvalidArithmetic(value.as_f64()));
    }
    Ok(saturate(value))
}

/// `clip_u8` for values already known to be finite.
#[inline]
pub(crate) fn saturate<T: Scalar>(value: T) -> u8 {
    let v = value.round();
    if v <= T::zero() {
        0
    } else if v >= T::lit(255.0) {
        255
    } else {
        v.to_u8().unwrap_or(0)
    }
}

/// An 8-bit image, row-major with interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "frames have 1 or 3 channels, got {channels}"
            )));
        }
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("empty frame".into()));
        }
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "{height}x{width}x{channels} frame needs {} bytes, got {}",
                height * width * channels,
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, v: u8) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    pub fn same_shape(&self, other: &Frame) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    pub fn same_spatial(&self, height: usize, width: usize) -> bool {
        self.height == height && self.width == width
    }

    /// Applies `f` to every byte.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> Frame {
        Frame {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    /// Pixels where `mask` is set come from `inside`, the rest from `self`.
    pub fn composite(&self, inside: &Frame, mask: &BinaryMask) -> Result<Frame> {
        if !self.same_shape(inside) || !mask.same_spatial(self.height, self.width) {
            return Err(Error::ShapeMismatch("composite operands differ in shape".into()));
        }
        let c = self.channels;
        let mut data = self.data.clone();
        for (i, &m) in mask.data().iter().enumerate() {
            if m != 0 {
                data[i * c..(i + 1) * c].copy_from_slice(&inside.data[i * c..(i + 1) * c]);
            }
        }
        Ok(Frame { data, ..*self })
    }
}

/// Single-plane binary mask with values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl BinaryMask {
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("empty mask".into()));
        }
        if data.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "{height}x{width} mask needs {} values, got {}",
                height * width,
                data.len()
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidArgument("mask values must be 0 or 1".into()));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, set: bool) -> Result<Self> {
        Self::new(height, width, vec![set as u8; height * width])
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(y, x) as u8);
            }
        }
        Self::new(height, width, data)
    }

    /// Binarizes a grayscale plane: values `>= threshold` become 1.
    pub fn threshold(height: usize, width: usize, gray: &[u8], threshold: u8) -> Result<Self> {
        Self::new(
            height,
            width,
            gray.iter().map(|&v| (v >= threshold) as u8).collect(),
        )
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> bool {
        self.data[y * self.width + x] != 0
    }

    pub fn same_spatial(&self, height: usize, width: usize) -> bool {
        self.height == height && self.width == width
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            data: self.data.iter().map(|&v| 1 - v).collect(),
            ..*self
        }
    }

    /// Grayscale view with set pixels at 255.
    pub fn to_gray(&self) -> Vec<u8> {
        self.data.iter().map(|&v| v * 255).collect()
    }
}

/// Binary edge map, values exactly 0 or 255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap(Frame);

impl EdgeMap {
    pub(crate) fn from_edges(height: usize, width: usize, edges: Vec<bool>) -> Self {
        let data = edges.into_iter().map(|e| if e { 255 } else { 0 }).collect();
        EdgeMap(Frame::new(height, width, 1, data).expect("edge map shape"))
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn data(&self) -> &[u8] {
        &self.0.data
    }

    pub fn is_edge(&self, y: usize, x: usize) -> bool {
        self.0.get(y, x, 0) == 255
    }

    pub fn edge_count(&self) -> usize {
        self.0.data.iter().filter(|&&v| v == 255).count()
    }

    pub fn as_frame(&self) -> &Frame {
        &self.0
    }

    pub fn into_frame(self) -> Frame {
        self.0
    }
}
