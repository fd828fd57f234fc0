//! Frame directories, the raw tensor container and clip manifests.

mod frames;
mod manifest;
mod raw;

pub use frames::{
    load_frames, load_image, load_mask_video, save_frames, save_image, save_mask_video, FrameSpec,
    MASK_THRESHOLD,
};
pub use manifest::{Clip, ClipManifest};
pub use raw::{Dtype, RawData, RawTensor, MAGIC, VERSION};
