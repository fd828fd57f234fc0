#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use discokit::io::{save_frames, save_image, save_mask_video};
use discokit::{BinaryMask, Frame, MaskVideo, VideoTensor};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discokit"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Checkerboard background with a bright square drifting right.
pub fn synthetic_video(frames: usize, h: usize, w: usize) -> VideoTensor {
    let side = (h.min(w) / 3).max(2);
    VideoTensor::new(
        (0..frames)
            .map(|t| {
                let x0 = (w / 4 + t) % (w - side).max(1);
                let y0 = h / 3;
                Frame::from_fn(h, w, 3, |y, x, c| {
                    if (y0..y0 + side).contains(&y) && (x0..x0 + side).contains(&x) {
                        [230, 60 + (t % 50) as u8, 40][c]
                    } else {
                        let cell = (x / 12 + y / 12) % 2;
                        (30 + 150 * cell + (x + 2 * y + 7 * c) % 40) as u8
                    }
                })
                .unwrap()
            })
            .collect(),
    )
    .unwrap()
}

/// A box around where the square travels.
pub fn synthetic_mask(frames: usize, h: usize, w: usize) -> MaskVideo {
    let m = BinaryMask::from_fn(h, w, |y, x| y >= h / 4 && y < 3 * h / 4 && x >= w / 5 && x < 4 * w / 5).unwrap();
    MaskVideo::new(vec![m; frames]).unwrap()
}

/// Writes a clip and its manifest under `dir`; `extra` is appended to the
/// manifest verbatim.
pub fn write_clip(dir: &Path, frames: usize, h: usize, w: usize, task: &str, extra: &str) -> PathBuf {
    let video = synthetic_video(frames, h, w);
    save_frames(&dir.join("video"), &video).unwrap();
    save_mask_video(&dir.join("mask"), &synthetic_mask(frames, h, w)).unwrap();
    let reference = video.frame(0).map(|v| v.saturating_add(10));
    save_image(&dir.join("reference.png"), &reference).unwrap();
    let manifest = dir.join("clip.toml");
    std::fs::write(
        &manifest,
        format!(
            "task = \"{task}\"\nframes = {frames}\nheight = {h}\nwidth = {w}\nvideo = \"video\"\nmask = \"mask\"\nreference_image = \"reference.png\"\nseed = 7\n{extra}"
        ),
    )
    .unwrap();
    manifest
}

/// Relative path to bytes for every file under `root`.
pub fn tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
