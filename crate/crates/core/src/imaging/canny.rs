use super::frame::{EdgeMap, Frame};
use super::kernel::GaussianKernel;
use super::plane::Plane;
use crate::error::{Error, Result};

const SMOOTH_SIGMA: f64 = 1.4;
const SMOOTH_SIZE: usize = 5;

/// Hysteresis thresholds on the L2 Sobel magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyConfig {
    pub low: f64,
    pub high: f64,
}

impl Default for CannyConfig {
    fn default() -> Self {
        Self {
            low: 100.0,
            high: 200.0,
        }
    }
}

/// `round(0.299 R + 0.587 G + 0.114 B)`; single-channel frames pass through.
pub fn luma(frame: &Frame) -> Vec<u8> {
    if frame.channels() == 1 {
        return frame.data().to_vec();
    }
    frame
        .data()
        .chunks_exact(3)
        .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64).round() as u8)
        .collect()
}

/// Canny edge detector: 5x5 Gaussian (sigma 1.4), Sobel gradients,
/// non-maximum suppression and 8-connected hysteresis.
///
/// The one-pixel frame border never carries edges.
pub fn canny(frame: &Frame, config: CannyConfig) -> Result<EdgeMap> {
    if !(config.low <= config.high) {
        return Err(Error::InvalidArgument(format!(
            "canny low threshold {} exceeds high {}",
            config.low, config.high
        )));
    }
    let (h, w) = (frame.height(), frame.width());
    let gray = Plane::<f64> {
        height: h,
        width: w,
        data: luma(frame).into_iter().map(f64::from).collect(),
    };
    let kernel = GaussianKernel::new(SMOOTH_SIGMA, SMOOTH_SIZE)?;
    let smooth = gray.separable(kernel.profile());
    let at = |y: isize, x: isize| {
        let yy = y.clamp(0, h as isize - 1) as usize;
        let xx = x.clamp(0, w as isize - 1) as usize;
        smooth.data[yy * w + xx]
    };

    let mut gx = vec![0.0; h * w];
    let mut gy = vec![0.0; h * w];
    let mut mag = vec![0.0; h * w];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let dx = (at(y - 1, x + 1) + 2.0 * at(y, x + 1) + at(y + 1, x + 1))
                - (at(y - 1, x - 1) + 2.0 * at(y, x - 1) + at(y + 1, x - 1));
            let dy = (at(y + 1, x - 1) + 2.0 * at(y + 1, x) + at(y + 1, x + 1))
                - (at(y - 1, x - 1) + 2.0 * at(y - 1, x) + at(y - 1, x + 1));
            let i = y as usize * w + x as usize;
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = dx.hypot(dy);
        }
    }

    let thin = suppress_non_maxima(&mag, &gx, &gy, h, w);
    Ok(EdgeMap::from_edges(h, w, hysteresis(&thin, h, w, config)))
}

fn suppress_non_maxima(mag: &[f64], gx: &[f64], gy: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    if h < 3 || w < 3 {
        return out;
    }
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            let mut angle = gy[i].atan2(gx[i]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            // (previous, next) neighbours along the gradient direction.
            let (prev, next) = if !(22.5..157.5).contains(&angle) {
                (i - 1, i + 1)
            } else if angle < 67.5 {
                (i - w - 1, i + w + 1)
            } else if angle < 112.5 {
                (i - w, i + w)
            } else {
                (i - w + 1, i + w - 1)
            };
            // Strict on one side so plateaus of equal magnitude stay one pixel wide.
            if m > mag[prev] && m >= mag[next] {
                out[i] = m;
            }
        }
    }
    out
}

fn hysteresis(thin: &[f64], h: usize, w: usize, config: CannyConfig) -> Vec<bool> {
    let mut edges = vec![false; h * w];
    let mut stack = Vec::new();
    let weak = |v: f64| v > 0.0 && v >= config.low;
    for start in 0..h * w {
        if edges[start] || !(thin[start] > 0.0 && thin[start] >= config.high) {
            continue;
        }
        edges[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (y, x) = ((i / w) as isize, (i % w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (ny, nx) = (y + dy, x + dx);
                    if ny < 0 || nx < 0 || ny >= h as isize || nx >= w as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if !edges[j] && weak(thin[j]) {
                        edges[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    edges
}
