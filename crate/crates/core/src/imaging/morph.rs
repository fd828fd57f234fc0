use rand::Rng;

use super::frame::BinaryMask;
use crate::error::{Error, Result};

/// Kernel sizes drawn for training-time mask dilation.
pub const DILATION_KERNELS: [usize; 11] = [1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21];

pub fn sample_dilation_kernel<R: Rng + ?Sized>(rng: &mut R) -> usize {
    DILATION_KERNELS[rng.gen_range(0..DILATION_KERNELS.len())]
}

/// Binary dilation: max over a `kernel x kernel` window, replicate border.
pub fn dilate(mask: &BinaryMask, kernel: usize) -> Result<BinaryMask> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "dilation kernel must be odd and positive, got {kernel}"
        )));
    }
    if kernel == 1 {
        return Ok(mask.clone());
    }
    let (h, w) = (mask.height(), mask.width());
    let r = kernel / 2;
    let src = mask.data();
    // Square max filter is separable.
    let mut rows = vec![0u8; h * w];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let lo = x.saturating_sub(r);
            let hi = (x + r).min(w - 1);
            rows[y * w + x] = line[lo..=hi].iter().copied().max().unwrap_or(0);
        }
    }
    let mut out = vec![0u8; h * w];
    for y in 0..h {
        let lo = y.saturating_sub(r);
        let hi = (y + r).min(h - 1);
        for x in 0..w {
            out[y * w + x] = (lo..=hi).map(|yy| rows[yy * w + x]).max().unwrap_or(0);
        }
    }
    BinaryMask::new(h, w, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn single_pixel_grows_to_block() {
        let m = BinaryMask::from_fn(11, 11, |y, x| (y, x) == (5, 5)).unwrap();
        let d = dilate(&m, 3).unwrap();
        for y in 0..11 {
            for x in 0..11 {
                let inside = (4..=6).contains(&y) && (4..=6).contains(&x);
                assert_eq!(d.get(y, x), inside, "({y},{x})");
            }
        }
    }

    #[test]
    fn kernel_one_is_identity_and_even_rejected() {
        let m = BinaryMask::from_fn(4, 5, |y, x| (y + x) % 3 == 0).unwrap();
        assert_eq!(dilate(&m, 1).unwrap(), m);
        assert!(dilate(&m, 4).is_err());
        assert!(dilate(&m, 0).is_err());
    }

    #[test]
    fn sampled_kernels_come_from_the_set() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            assert!(DILATION_KERNELS.contains(&sample_dilation_kernel(&mut rng)));
        }
    }
}
