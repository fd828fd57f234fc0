//! Pixel-level primitives shared by the distorters and the metrics.

mod blur;
mod canny;
mod frame;
mod kernel;
mod morph;
mod mosaic;
pub(crate) mod plane;
mod ssim;

pub use blur::gaussian_blur;
pub use canny::{canny, luma, CannyConfig};
pub use frame::{clip_u8, BinaryMask, EdgeMap, Frame};
pub use kernel::{GaussianKernel, MIN_SIGMA};
pub use morph::{dilate, sample_dilation_kernel, DILATION_KERNELS};
pub use mosaic::mosaic;
pub use ssim::{ssim_map, ssim_masked, ssim_masked_with, SsimConfig};
