//! Brute-force reference implementations, written directly from the
//! definitions and independent of the library's fast paths.
#![allow(dead_code)]

use discokit::cfp::LatentLayout;
use discokit::{BinaryMask, Frame, MaskVideo, VideoTensor};
use rand::Rng;

/// Unnormalized 2D Gaussian over the full grid, normalized by its own sum.
pub fn kernel_2d(sigma: f64, size: usize) -> Vec<Vec<f64>> {
    let sigma = sigma.max(0.1);
    let r = (size / 2) as i64;
    let mut w = vec![vec![0.0; size]; size];
    let mut total = 0.0;
    for i in -r..=r {
        for j in -r..=r {
            let v = (-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp();
            w[(i + r) as usize][(j + r) as usize] = v;
            total += v;
        }
    }
    for row in &mut w {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    w
}

/// Direct O(k^2)-per-pixel convolution with clamped (replicate) indexing,
/// returned unrounded.
pub fn blur_2d(frame: &Frame, sigma: f64, size: usize) -> Vec<f64> {
    let w = kernel_2d(sigma, size);
    let r = (size / 2) as isize;
    let (h, wd, c) = (frame.height() as isize, frame.width() as isize, frame.channels());
    let mut out = Vec::with_capacity(frame.data().len());
    for y in 0..h {
        for x in 0..wd {
            for ch in 0..c {
                let mut acc = 0.0;
                for i in -r..=r {
                    for j in -r..=r {
                        let yy = (y + i).clamp(0, h - 1) as usize;
                        let xx = (x + j).clamp(0, wd - 1) as usize;
                        acc += w[(i + r) as usize][(j + r) as usize] * frame.get(yy, xx, ch) as f64;
                    }
                }
                out.push(acc);
            }
        }
    }
    out
}

/// Tile means computed by explicit enumeration.
pub fn mosaic(frame: &Frame, block: usize) -> Frame {
    let (h, w, c) = (frame.height(), frame.width(), frame.channels());
    Frame::from_fn(h, w, c, |y, x, ch| {
        let (ty, tx) = (y / block * block, x / block * block);
        let mut sum = 0.0;
        let mut n = 0.0;
        for yy in ty..(ty + block).min(h) {
            for xx in tx..(tx + block).min(w) {
                sum += frame.get(yy, xx, ch) as f64;
                n += 1.0;
            }
        }
        (sum / n).round() as u8
    })
    .unwrap()
}

pub fn dilate(mask: &BinaryMask, k: usize) -> BinaryMask {
    let r = (k / 2) as isize;
    let (h, w) = (mask.height() as isize, mask.width() as isize);
    BinaryMask::from_fn(mask.height(), mask.width(), |y, x| {
        let mut any = false;
        for i in -r..=r {
            for j in -r..=r {
                let yy = (y as isize + i).clamp(0, h - 1) as usize;
                let xx = (x as isize + j).clamp(0, w - 1) as usize;
                any |= mask.get(yy, xx);
            }
        }
        any
    })
    .unwrap()
}

/// Whether any pixel covered by latent cell `(slot, cy, cx)` is masked,
/// found by scanning every pixel and mapping it to its cell.
pub fn latent_cell_masked(mask: &MaskVideo, layout: LatentLayout) -> Vec<Vec<Vec<bool>>> {
    let f = mask.len();
    let slots = 1 + (f - 1).div_ceil(layout.temporal_factor);
    let lh = mask.height().div_ceil(layout.spatial_factor);
    let lw = mask.width().div_ceil(layout.spatial_factor);
    let mut cells = vec![vec![vec![false; lw]; lh]; slots];
    for t in 0..f {
        let slot = if t == 0 { 0 } else { 1 + (t - 1) / layout.temporal_factor };
        for y in 0..mask.height() {
            for x in 0..mask.width() {
                if mask.frame(t).get(y, x) {
                    cells[slot][y / layout.spatial_factor][x / layout.spatial_factor] = true;
                }
            }
        }
    }
    cells
}

pub fn random_frame<R: Rng>(rng: &mut R, h: usize, w: usize, c: usize) -> Frame {
    Frame::from_fn(h, w, c, |_, _, _| rng.gen()).unwrap()
}

pub fn random_video<R: Rng>(rng: &mut R, f: usize, h: usize, w: usize) -> VideoTensor {
    VideoTensor::new((0..f).map(|_| random_frame(rng, h, w, 3)).collect()).unwrap()
}

/// A few random rectangles per frame, occasionally empty or full.
pub fn random_mask<R: Rng>(rng: &mut R, f: usize, h: usize, w: usize) -> MaskVideo {
    let frames = (0..f)
        .map(|_| match rng.gen_range(0..10) {
            0 => BinaryMask::filled(h, w, false).unwrap(),
            1 => BinaryMask::filled(h, w, true).unwrap(),
            _ => {
                let rects: Vec<(usize, usize, usize, usize)> = (0..rng.gen_range(1..4))
                    .map(|_| {
                        let y0 = rng.gen_range(0..h);
                        let x0 = rng.gen_range(0..w);
                        (y0, x0, rng.gen_range(y0..=h), rng.gen_range(x0..=w))
                    })
                    .collect();
                BinaryMask::from_fn(h, w, |y, x| {
                    rects.iter().any(|&(y0, x0, y1, x1)| y >= y0 && y < y1 && x >= x0 && x < x1)
                })
                .unwrap()
            }
        })
        .collect();
    MaskVideo::new(frames).unwrap()
}

/// Min-max normalized average written out cell by cell.
pub fn minmax_scores(rows: &[Vec<f64>], lower_better: &[bool]) -> Vec<f64> {
    let cols = rows[0].len();
    let mut out = vec![0.0; rows.len()];
    for j in 0..cols {
        let lo = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        for (i, r) in rows.iter().enumerate() {
            out[i] += if lower_better[j] { (hi - r[j]) / (hi - lo) } else { (r[j] - lo) / (hi - lo) };
        }
    }
    out.iter().map(|s| s / cols as f64).collect()
}
