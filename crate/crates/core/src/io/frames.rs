use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, RgbImage};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::{BinaryMask, Frame};
use crate::video::{MaskVideo, VideoTensor};

/// Gray level at or above which a mask pixel counts as set.
pub const MASK_THRESHOLD: u8 = 128;

const LOSSLESS: &[&str] = &["png"];
const LOSSY: &[&str] = &["jpg", "jpeg", "webp", "avif", "heic", "heif"];

/// Expected clip geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSpec {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
}

/// Numbered frame files in `dir`, ordered by index and checked to be
/// exactly `0..frames`.
fn indexed_files(dir: &Path, frames: usize) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found: BTreeMap<usize, PathBuf> = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(ext) = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) else {
            continue;
        };
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if stem.is_empty() || !stem.bytes().all(|b| b.is_ascii_digit()) {
            continue;
        }
        if LOSSY.contains(&ext.as_str()) {
            return Err(Error::LossySource(path));
        }
        if !LOSSLESS.contains(&ext.as_str()) {
            continue;
        }
        let index: usize = stem
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad frame index in {}", path.display())))?;
        if let Some(prev) = found.insert(index, path.clone()) {
            return Err(Error::InvalidArgument(format!(
                "frame index {index} appears twice: {} and {}",
                prev.display(),
                path.display()
            )));
        }
    }
    if let Some(index) = (0..frames).find(|i| !found.contains_key(i)) {
        return Err(Error::MissingFrame {
            index,
            dir: dir.to_path_buf(),
        });
    }
    if found.len() != frames {
        return Err(Error::FrameCount {
            expected: frames,
            found: found.len(),
            dir: dir.to_path_buf(),
        });
    }
    Ok(found.into_values().collect())
}

fn decode(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn check_dims(path: &Path, h: usize, w: usize, spec: FrameSpec) -> Result<()> {
    if (h, w) != (spec.height, spec.width) {
        return Err(Error::ShapeMismatch(format!(
            "{} is {h}x{w}, expected {}x{}",
            path.display(),
            spec.height,
            spec.width
        )));
    }
    Ok(())
}

fn rgb_frame(img: DynamicImage) -> Result<Frame> {
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    Frame::new(h as usize, w as usize, 3, rgb.into_raw())
}

pub fn load_image(path: &Path) -> Result<Frame> {
    if let Some(ext) = path.extension().and_then(|e| e.to_str()) {
        if LOSSY.contains(&ext.to_ascii_lowercase().as_str()) {
            return Err(Error::LossySource(path.to_path_buf()));
        }
    }
    rgb_frame(decode(path)?)
}

/// Loads `0..F` numbered PNG frames as RGB.
pub fn load_frames(dir: &Path, spec: FrameSpec) -> Result<VideoTensor> {
    let files = indexed_files(dir, spec.frames)?;
    let frames = files
        .par_iter()
        .map(|p| {
            let f = rgb_frame(decode(p)?)?;
            check_dims(p, f.height(), f.width(), spec)?;
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    VideoTensor::new(frames)
}

/// Loads numbered grayscale frames, binarized at [`MASK_THRESHOLD`].
pub fn load_mask_video(dir: &Path, spec: FrameSpec) -> Result<MaskVideo> {
    let files = indexed_files(dir, spec.frames)?;
    let masks = files
        .par_iter()
        .map(|p| {
            let g = decode(p)?.to_luma8();
            let (w, h) = g.dimensions();
            check_dims(p, h as usize, w as usize, spec)?;
            BinaryMask::threshold(h as usize, w as usize, g.as_raw(), MASK_THRESHOLD)
        })
        .collect::<Result<Vec<_>>>()?;
    MaskVideo::new(masks)
}

fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("{index:05}.png"))
}

fn save_png(path: &Path, result: image::ImageResult<()>) -> Result<()> {
    result.map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_image(path: &Path, frame: &Frame) -> Result<()> {
    let (w, h) = (frame.width() as u32, frame.height() as u32);
    let res = match frame.channels() {
        3 => RgbImage::from_raw(w, h, frame.data().to_vec()).expect("shape checked").save(path),
        _ => GrayImage::from_raw(w, h, frame.data().to_vec()).expect("shape checked").save(path),
    };
    save_png(path, res)
}

/// Writes frames as `00000.png`, `00001.png`, ...
pub fn save_frames(dir: &Path, video: &VideoTensor) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    video
        .frames()
        .par_iter()
        .enumerate()
        .try_for_each(|(i, f)| save_image(&frame_path(dir, i), f))
}

/// Writes masks as 0/255 grayscale PNGs.
pub fn save_mask_video(dir: &Path, mask: &MaskVideo) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    mask.frames().par_iter().enumerate().try_for_each(|(i, m)| {
        let path = frame_path(dir, i);
        let img = GrayImage::from_raw(m.width() as u32, m.height() as u32, m.to_gray())
            .expect("shape checked");
        save_png(&path, img.save(&path))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(frames: usize) -> FrameSpec {
        FrameSpec {
            frames,
            height: 4,
            width: 5,
        }
    }

    fn clip(frames: usize) -> VideoTensor {
        VideoTensor::new(
            (0..frames)
                .map(|i| Frame::from_fn(4, 5, 3, |y, x, c| (i * 50 + y * 10 + x * 3 + c) as u8).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let v = clip(3);
        save_frames(dir.path(), &v).unwrap();
        assert_eq!(load_frames(dir.path(), spec(3)).unwrap(), v);
    }

    #[test]
    fn missing_index_named() {
        let dir = tempfile::tempdir().unwrap();
        save_frames(dir.path(), &clip(3)).unwrap();
        match load_frames(dir.path(), spec(4)) {
            Err(Error::MissingFrame { index, .. }) => assert_eq!(index, 3),
            other => panic!("{other:?}"),
        }
        std::fs::remove_file(dir.path().join("00001.png")).unwrap();
        match load_frames(dir.path(), spec(3)) {
            Err(Error::MissingFrame { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extra_frames_rejected() {
        let dir = tempfile::tempdir().unwrap();
        save_frames(dir.path(), &clip(3)).unwrap();
        assert!(matches!(
            load_frames(dir.path(), spec(2)),
            Err(Error::FrameCount { found: 3, .. })
        ));
    }

    #[test]
    fn numeric_order_not_lexical() {
        let dir = tempfile::tempdir().unwrap();
        let v = clip(11);
        for (i, f) in v.frames().iter().enumerate() {
            save_image(&dir.path().join(format!("{i}.png")), f).unwrap();
        }
        assert_eq!(load_frames(dir.path(), spec(11)).unwrap(), v);
    }

    #[test]
    fn lossy_rejected_and_dims_checked() {
        let dir = tempfile::tempdir().unwrap();
        save_frames(dir.path(), &clip(1)).unwrap();
        let bad = FrameSpec {
            frames: 1,
            height: 5,
            width: 5,
        };
        assert!(matches!(load_frames(dir.path(), bad), Err(Error::ShapeMismatch(_))));
        std::fs::write(dir.path().join("00001.jpg"), b"not really").unwrap();
        assert!(matches!(load_frames(dir.path(), spec(2)), Err(Error::LossySource(_))));
    }

    #[test]
    fn mask_binarization() {
        let dir = tempfile::tempdir().unwrap();
        let g = GrayImage::from_raw(3, 1, vec![127, 128, 255]).unwrap();
        g.save(dir.path().join("0.png")).unwrap();
        let m = load_mask_video(
            dir.path(),
            FrameSpec {
                frames: 1,
                height: 1,
                width: 3,
            },
        )
        .unwrap();
        assert_eq!(m.frame(0).data(), &[0, 1, 1]);
    }
}
