//! Real-valued single-channel planes and separable filtering.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::frame::Frame;
use crate::scalar::Scalar;

/// Taps above which a 1D pass switches from direct summation to FFT.
const FFT_THRESHOLD: usize = 33;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Plane<T> {
    pub height: usize,
    pub width: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Plane<T> {
    pub fn from_channel(frame: &Frame, channel: usize) -> Self {
        let c = frame.channels();
        Plane {
            height: frame.height(),
            width: frame.width(),
            data: frame
                .data()
                .iter()
                .skip(channel)
                .step_by(c)
                .map(|&v| T::from_byte(v))
                .collect(),
        }
    }

    pub fn zip_map(&self, other: &Plane<T>, f: impl Fn(T, T) -> T) -> Plane<T> {
        Plane {
            height: self.height,
            width: self.width,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Separable correlation with a symmetric odd-length profile,
    /// replicate-edge borders, rows then columns.
    pub fn separable(&self, profile: &[T]) -> Plane<T> {
        let rows = filter_lines(&self.data, self.height, self.width, 1, self.width, profile);
        let data = filter_lines(&rows, self.width, self.height, self.width, 1, profile);
        Plane {
            height: self.height,
            width: self.width,
            data,
        }
    }
}

/// Filters `count` lines of `len` samples. Sample `i` of line `l` lives at
/// `l * line_stride + i * step`.
fn filter_lines<T: Scalar>(
    src: &[T],
    count: usize,
    len: usize,
    step: usize,
    line_stride: usize,
    profile: &[T],
) -> Vec<T> {
    let mut out = vec![T::zero(); src.len()];
    if profile.len() == 1 {
        for (o, &s) in out.iter_mut().zip(src) {
            *o = s * profile[0];
        }
        return out;
    }
    if profile.len() <= FFT_THRESHOLD {
        let r = profile.len() / 2;
        let mut line = vec![T::zero(); len];
        for l in 0..count {
            for (i, v) in line.iter_mut().enumerate() {
                *v = src[l * line_stride + i * step];
            }
            for x in 0..len {
                let mut acc = T::zero();
                for (t, &w) in profile.iter().enumerate() {
                    let idx = (x + t).saturating_sub(r).min(len - 1);
                    acc = acc + w * line[idx];
                }
                out[l * line_stride + x * step] = acc;
            }
        }
        return out;
    }
    let conv = FftLineFilter::new(len, profile);
    let mut buf = conv.scratch();
    let mut l = 0;
    // Two real lines per complex transform.
    while l < count {
        let second = (l + 1 < count).then_some(l + 1);
        conv.run(&mut buf, |i| {
            let re = src[l * line_stride + i * step];
            let im = second.map_or(T::zero(), |m| src[m * line_stride + i * step]);
            (re, im)
        });
        for x in 0..len {
            let v = conv.output(&buf, x);
            out[l * line_stride + x * step] = v.re;
            if let Some(m) = second {
                out[m * line_stride + x * step] = v.im;
            }
        }
        l += 2;
    }
    out
}

struct FftLineFilter<T: Scalar> {
    len: usize,
    radius: usize,
    taps: usize,
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    spectrum: Vec<Complex<T>>,
}

impl<T: Scalar> FftLineFilter<T> {
    fn new(len: usize, profile: &[T]) -> Self {
        let radius = profile.len() / 2;
        let size = (len + 2 * radius).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let scale = T::one() / T::from_count(size);
        let mut spectrum = vec![Complex::new(T::zero(), T::zero()); size];
        for (t, &w) in profile.iter().enumerate() {
            spectrum[t] = Complex::new(w * scale, T::zero());
        }
        forward.process(&mut spectrum);
        Self {
            len,
            radius,
            taps: profile.len(),
            size,
            forward,
            inverse,
            spectrum,
        }
    }

    fn scratch(&self) -> Vec<Complex<T>> {
        vec![Complex::new(T::zero(), T::zero()); self.size]
    }

    /// Loads the replicate-padded line into `buf` and convolves in place.
    fn run(&self, buf: &mut [Complex<T>], sample: impl Fn(usize) -> (T, T)) {
        let padded = self.len + 2 * self.radius;
        for (p, slot) in buf.iter_mut().enumerate() {
            *slot = if p < padded {
                let i = p.saturating_sub(self.radius).min(self.len - 1);
                let (re, im) = sample(i);
                Complex::new(re, im)
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        self.forward.process(buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b = *b * *s;
        }
        self.inverse.process(buf);
    }

    /// Output sample `x`; the symmetric profile makes convolution equal
    /// to correlation, offset by `taps - 1`.
    fn output(&self, buf: &[Complex<T>], x: usize) -> Complex<T> {
        buf[x + self.taps - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct<T: Scalar>(line: &[T], profile: &[T]) -> Vec<T> {
        let r = profile.len() as isize / 2;
        let n = line.len() as isize;
        (0..n)
            .map(|x| {
                profile
                    .iter()
                    .enumerate()
                    .map(|(t, &w)| w * line[(x + t as isize - r).clamp(0, n - 1) as usize])
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fft_path_matches_direct_sum() {
        let len = 37;
        let count = 5;
        let src: Vec<f64> = (0..len * count).map(|i| ((i * 7919) % 256) as f64).collect();
        let k = crate::imaging::GaussianKernel::new(9.0f64, 61).unwrap();
        let got = filter_lines(&src, count, len, 1, len, k.profile());
        for l in 0..count {
            let want = direct(&src[l * len..(l + 1) * len], k.profile());
            for x in 0..len {
                assert!((got[l * len + x] - want[x]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fft_path_f32_close() {
        let len = 20;
        let src: Vec<f32> = (0..len * 3).map(|i| ((i * 31) % 256) as f32).collect();
        let k = crate::imaging::GaussianKernel::new(100.0f32, 39).unwrap();
        let got = filter_lines(&src, 3, len, 1, len, k.profile());
        for l in 0..3 {
            let want = direct(&src[l * len..(l + 1) * len], k.profile());
            for x in 0..len {
                assert!((got[l * len + x] - want[x]).abs() < 1e-2);
            }
        }
    }
}
