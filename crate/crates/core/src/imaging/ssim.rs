use super::frame::{BinaryMask, Frame};
use super::kernel::GaussianKernel;
use super::plane::Plane;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gaussian-windowed SSIM parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimConfig {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
        }
    }
}

/// Per-pixel SSIM map, averaged over channels. Windows use replicate borders.
pub fn ssim_map<T: Scalar>(a: &Frame, b: &Frame, config: &SsimConfig) -> Result<Vec<T>> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch(format!(
            "ssim operands {}x{}x{} and {}x{}x{}",
            a.height(),
            a.width(),
            a.channels(),
            b.height(),
            b.width(),
            b.channels()
        )));
    }
    let window = GaussianKernel::<T>::new(T::lit(config.sigma), config.window)?;
    let profile = window.profile();
    let c1 = T::lit((config.k1 * config.dynamic_range).powi(2));
    let c2 = T::lit((config.k2 * config.dynamic_range).powi(2));
    let two = T::lit(2.0);

    let n = a.height() * a.width();
    let mut acc = vec![T::zero(); n];
    for ch in 0..a.channels() {
        let x = Plane::<T>::from_channel(a, ch);
        let y = Plane::<T>::from_channel(b, ch);
        let mu_x = x.separable(profile);
        let mu_y = y.separable(profile);
        let xx = x.zip_map(&x, |p, q| p * q).separable(profile);
        let yy = y.zip_map(&y, |p, q| p * q).separable(profile);
        let xy = x.zip_map(&y, |p, q| p * q).separable(profile);
        for i in 0..n {
            let (mx, my) = (mu_x.data[i], mu_y.data[i]);
            let mxy = mx * my;
            let var_x = xx.data[i] - mx * mx;
            let var_y = yy.data[i] - my * my;
            let cov = xy.data[i] - mxy;
            let num = (two * mxy + c1) * (two * cov + c2);
            let den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
            acc[i] = acc[i] + num / den;
        }
    }
    let channels = T::from_count(a.channels());
    Ok(acc.into_iter().map(|v| v / channels).collect())
}

/// Mean SSIM over the set pixels of `mask`, or over the whole frame.
///
/// An empty mask is an error; callers that want a fallback use `None`.
pub fn ssim_masked<T: Scalar>(a: &Frame, b: &Frame, mask: Option<&BinaryMask>) -> Result<T> {
    ssim_masked_with(a, b, mask, &SsimConfig::default())
}

pub fn ssim_masked_with<T: Scalar>(
    a: &Frame,
    b: &Frame,
    mask: Option<&BinaryMask>,
    config: &SsimConfig,
) -> Result<T> {
    if let Some(m) = mask {
        if !m.same_spatial(a.height(), a.width()) {
            return Err(Error::ShapeMismatch("ssim mask differs from frame".into()));
        }
        if m.is_empty() {
            return Err(Error::DegenerateRegion);
        }
    }
    let map = ssim_map::<T>(a, b, config)?;
    let (sum, count) = match mask {
        Some(m) => map
            .iter()
            .zip(m.data())
            .filter(|(_, &s)| s != 0)
            .fold((T::zero(), 0usize), |(s, n), (&v, _)| (s + v, n + 1)),
        None => map.iter().fold((T::zero(), 0usize), |(s, n), &v| (s + v, n + 1)),
    };
    Ok(sum / T::from_count(count))
}
