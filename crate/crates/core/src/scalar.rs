use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the numeric kernels are written against.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FftNum + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Infallible for the supported floats.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_byte(v: u8) -> Self {
        Self::lit(v as f64)
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
