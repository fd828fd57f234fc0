//! `ODSC` raw tensor container.
//!
//! ```text
//! offset  size      field
//! 0       4         magic "ODSC"
//! 4       1         version (1)
//! 5       1         dtype: 0 = u8, 1 = f32 little-endian
//! 6       1         ndim
//! 7       8*ndim    dims, u64 little-endian
//! ...               payload, row-major
//! ```

use std::path::Path;

use crate::cfp::LatentTensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::video::VideoTensor;

pub const MAGIC: [u8; 4] = *b"ODSC";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    U8,
    F32,
}

impl Dtype {
    pub fn code(self) -> u8 {
        match self {
            Dtype::U8 => 0,
            Dtype::F32 => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Dtype::U8),
            1 => Ok(Dtype::F32),
            c => Err(Error::UnknownDtype(c)),
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::F32 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dtype::U8 => "u8",
            Dtype::F32 => "f32",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawData {
    U8(Vec<u8>),
    F32(Vec<f32>),
}

impl RawData {
    pub fn dtype(&self) -> Dtype {
        match self {
            RawData::U8(_) => Dtype::U8,
            RawData::F32(_) => Dtype::F32,
        }
    }

    fn len(&self) -> usize {
        match self {
            RawData::U8(v) => v.len(),
            RawData::F32(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawTensor {
    pub dims: Vec<usize>,
    pub data: RawData,
}

impl RawTensor {
    pub fn new(dims: Vec<usize>, data: RawData) -> Result<Self> {
        if dims.len() > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!("too many dims: {}", dims.len())));
        }
        let n: usize = dims.iter().product();
        if n != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "dims {dims:?} hold {n} elements, data has {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let dtype = self.data.dtype();
        let n: usize = self.dims.iter().product();
        let mut out = Vec::with_capacity(7 + 8 * self.dims.len() + n * dtype.size());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(dtype.code());
        out.push(self.dims.len() as u8);
        for &d in &self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        match &self.data {
            RawData::U8(v) => out.extend_from_slice(v),
            RawData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = |needed: usize| {
            if bytes.len() < needed {
                Err(Error::LengthMismatch {
                    expected: needed,
                    found: bytes.len(),
                })
            } else {
                Ok(())
            }
        };
        header(7)?;
        let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let dtype = Dtype::from_code(bytes[5])?;
        let ndim = bytes[6] as usize;
        let body = 7 + 8 * ndim;
        header(body)?;
        let dims = bytes[7..body]
            .chunks_exact(8)
            .map(|c| {
                let d = u64::from_le_bytes(c.try_into().expect("8 bytes"));
                usize::try_from(d).map_err(|_| Error::InvalidArgument(format!("dim {d} too large")))
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = dims
            .iter()
            .try_fold(dtype.size(), |acc, &d| acc.checked_mul(d))
            .and_then(|p| p.checked_add(body))
            .ok_or_else(|| Error::InvalidArgument(format!("dims {dims:?} overflow")))?;
        if bytes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: bytes.len(),
            });
        }
        let payload = &bytes[body..];
        let data = match dtype {
            Dtype::U8 => RawData::U8(payload.to_vec()),
            Dtype::F32 => RawData::F32(
                payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
                    .collect(),
            ),
        };
        Self::new(dims, data)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn from_video(video: &VideoTensor) -> Self {
        RawTensor {
            dims: video.dims().to_vec(),
            data: RawData::U8(video.to_bytes()),
        }
    }

    pub fn to_video(&self) -> Result<VideoTensor> {
        let dims = self.dims4()?;
        match &self.data {
            RawData::U8(v) => VideoTensor::from_bytes(dims, v),
            other => Err(Error::DtypeMismatch {
                expected: "u8",
                found: other.dtype().name(),
            }),
        }
    }

    /// Stores the latent as f32.
    pub fn from_latent<T: Scalar>(latent: &LatentTensor<T>) -> Self {
        RawTensor {
            dims: latent.dims().to_vec(),
            data: RawData::F32(latent.data().iter().map(|v| v.to_f32().unwrap_or(f32::NAN)).collect()),
        }
    }

    pub fn to_latent<T: Scalar>(&self) -> Result<LatentTensor<T>> {
        let dims = self.dims4()?;
        match &self.data {
            RawData::F32(v) => LatentTensor::new(dims, v.iter().map(|&x| T::lit(x as f64)).collect()),
            other => Err(Error::DtypeMismatch {
                expected: "f32",
                found: other.dtype().name(),
            }),
        }
    }

    fn dims4(&self) -> Result<[usize; 4]> {
        self.dims
            .as_slice()
            .try_into()
            .map_err(|_| Error::ShapeMismatch(format!("expected 4 dims, got {:?}", self.dims)))
    }
}
