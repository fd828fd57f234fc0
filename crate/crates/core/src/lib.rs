//! Control-signal generation, latent preservation composition and
//! evaluation metrics for mask-guided video editing.
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the precisions used by the pipeline and the CLI.

pub mod adaptive;
pub mod cfp;
pub mod error;
pub mod imaging;
pub mod io;
pub mod metrics;
pub mod random;
pub mod scalar;
pub mod task;
pub mod video;

pub use error::{Error, ErrorCategory, Result};
pub use imaging::{clip_u8, BinaryMask, EdgeMap, Frame, GaussianKernel};
pub use scalar::Scalar;
pub use task::TaskKind;
pub use video::{MaskVideo, VideoTensor};

/// Double-precision blur kernel, used by the distorters and SSIM.
pub type Kernel = GaussianKernel<f64>;
/// Single-precision blur kernel.
pub type Kernel32 = GaussianKernel<f32>;
/// Latent tensor as written to disk.
pub type Latent = cfp::LatentTensor<f32>;
/// Double-precision latent tensor.
pub type Latent64 = cfp::LatentTensor<f64>;
/// Metrics table used for score aggregation.
pub type Table = metrics::MetricsTable<f64>;
