use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::frames::{load_frames, load_image, load_mask_video, FrameSpec};
use crate::adaptive::AdaptiveParams;
use crate::error::{Error, Result};
use crate::imaging::Frame;
use crate::random::RandomDistortionParams;
use crate::task::TaskKind;
use crate::video::{MaskVideo, VideoTensor};

/// One editing clip: reference video, mask video and reference image.
///
/// Relative paths resolve against the manifest's directory.
///
/// ```toml
/// task = "swap"
/// frames = 49
/// height = 480
/// width = 720
/// video = "video"
/// mask = "mask"
/// reference_image = "reference.png"
/// seed = 7
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipManifest {
    pub task: TaskKind,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub video: PathBuf,
    pub mask: PathBuf,
    pub reference_image: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomDistortionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<AdaptiveParams>,
}

/// Loaded clip assets.
#[derive(Debug, Clone)]
pub struct Clip {
    pub video: VideoTensor,
    pub mask: MaskVideo,
    pub reference_image: Frame,
}

impl ClipManifest {
    pub fn from_toml_str(s: &str, base: &Path) -> Result<Self> {
        let mut m: ClipManifest = toml::from_str(s).map_err(|e| Error::Manifest(e.to_string()))?;
        for p in [&mut m.video, &mut m.mask, &mut m.reference_image] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&s, base)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn spec(&self) -> FrameSpec {
        FrameSpec {
            frames: self.frames,
            height: self.height,
            width: self.width,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.frames == 0 || self.height == 0 || self.width == 0 {
            return Err(Error::Manifest("frames, height and width must be positive".into()));
        }
        for (what, p, dir) in [
            ("video", &self.video, true),
            ("mask", &self.mask, true),
            ("reference_image", &self.reference_image, false),
        ] {
            let ok = if dir { p.is_dir() } else { p.is_file() };
            if !ok {
                return Err(Error::Manifest(format!("{what} path {} does not exist", p.display())));
            }
        }
        if let Some(r) = &self.random {
            r.validate()?;
        }
        if let Some(a) = &self.adaptive {
            a.validate()?;
        }
        Ok(())
    }

    pub fn load_clip(&self) -> Result<Clip> {
        let spec = self.spec();
        let video = load_frames(&self.video, spec)?;
        let mask = load_mask_video(&self.mask, spec)?;
        let reference_image = load_image(&self.reference_image)?;
        if !reference_image.same_spatial(self.height, self.width) {
            return Err(Error::ShapeMismatch(format!(
                "reference image is {}x{}, expected {}x{}",
                reference_image.height(),
                reference_image.width(),
                self.height,
                self.width
            )));
        }
        Ok(Clip {
            video,
            mask,
            reference_image,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{save_frames, save_image, save_mask_video};

    fn write_clip(dir: &Path) {
        let v = VideoTensor::new(vec![Frame::filled(4, 6, 3, 9).unwrap(); 2]).unwrap();
        save_frames(&dir.join("video"), &v).unwrap();
        save_mask_video(&dir.join("mask"), &MaskVideo::filled(2, 4, 6, true).unwrap()).unwrap();
        save_image(&dir.join("ref.png"), v.frame(0)).unwrap();
    }

    const TEXT: &str = r#"
task = "swap"
frames = 2
height = 4
width = 6
video = "video"
mask = "mask"
reference_image = "ref.png"
seed = 3
"#;

    #[test]
    fn relative_paths_and_loading() {
        let dir = tempfile::tempdir().unwrap();
        write_clip(dir.path());
        std::fs::write(dir.path().join("clip.toml"), TEXT).unwrap();
        let m = ClipManifest::load(&dir.path().join("clip.toml")).unwrap();
        assert_eq!(m.task, TaskKind::Swap);
        assert_eq!(m.seed, Some(3));
        let clip = m.load_clip().unwrap();
        assert_eq!(clip.video.dims(), [2, 4, 6, 3]);
        assert_eq!(clip.mask.count(), 48);
    }

    #[test]
    fn missing_paths_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_clip(dir.path());
        std::fs::remove_dir_all(dir.path().join("mask")).unwrap();
        assert!(matches!(
            ClipManifest::from_toml_str(TEXT, dir.path()),
            Err(Error::Manifest(_))
        ));
    }

    #[test]
    fn bad_overrides_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_clip(dir.path());
        let text = format!(
            "{TEXT}\n[random]\ntheta = 9.0\ntarget_channel = 0\ndelta = 50\nblock = 8\nmode = \"up\"\n"
        );
        assert!(ClipManifest::from_toml_str(&text, dir.path()).is_err());
        let text = format!("{TEXT}\n[adaptive]\nalpha = 1.0\nsigma = 2.0\nk = 3\n");
        let m = ClipManifest::from_toml_str(&text, dir.path()).unwrap();
        assert_eq!(m.adaptive.unwrap().k, 3);
        assert!(ClipManifest::from_toml_str("task = \"warp\"", dir.path()).is_err());
    }
}
