use super::frame::{saturate, Frame};
use super::kernel::GaussianKernel;
use super::plane::Plane;
use crate::scalar::Scalar;

/// Per-channel Gaussian blur with replicate-edge borders.
///
/// Runs as two separable passes in `T`; the result is rounded once at the
/// end, so it agrees with direct 2D convolution up to rounding.
pub fn gaussian_blur<T: Scalar>(frame: &Frame, kernel: &GaussianKernel<T>) -> Frame {
    if kernel.size() == 1 {
        return frame.clone();
    }
    let c = frame.channels();
    let mut out = frame.clone();
    for ch in 0..c {
        let plane = Plane::<T>::from_channel(frame, ch).separable(kernel.profile());
        for (dst, &v) in out.data_mut().iter_mut().skip(ch).step_by(c).zip(&plane.data) {
            *dst = saturate(v);
        }
    }
    out
}
