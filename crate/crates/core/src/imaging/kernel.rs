use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest blur sigma accepted; smaller values are raised to this.
pub const MIN_SIGMA: f64 = 0.1;

/// Normalized square Gaussian kernel of odd size.
///
/// The 2D weights factor as an outer product of the stored 1D profile,
/// so `weight(i, j) = profile[i] * profile[j]` and the grid sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel<T> {
    size: usize,
    sigma: T,
    profile: Vec<T>,
}

impl<T: Scalar> GaussianKernel<T> {
    /// Builds the kernel. `sigma` below 0.1 (or NaN) is clamped to 0.1.
    pub fn new(sigma: T, size: usize) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "kernel size must be odd and positive, got {size}"
            )));
        }
        let min = T::lit(MIN_SIGMA);
        let sigma = if sigma >= min { sigma } else { min };
        if !sigma.is_finite() {
            return Err(Error::InvalidArithmetic(sigma.as_f64()));
        }
        let radius = (size / 2) as i64;
        let two_var = T::lit(2.0) * sigma * sigma;
        let raw: Vec<T> = (-radius..=radius)
            .map(|i| {
                let d = T::lit(i as f64);
                (-(d * d) / two_var).exp()
            })
            .collect();
        let total: T = raw.iter().copied().sum();
        let profile = raw.into_iter().map(|w| w / total).collect();
        Ok(Self {
            size,
            sigma,
            profile,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Normalized 1D profile, length `size`.
    pub fn profile(&self) -> &[T] {
        &self.profile
    }

    /// Weight at offset `(di, dj)` from the center, each in `[-b, b]`.
    pub fn weight(&self, di: isize, dj: isize) -> T {
        let r = self.radius() as isize;
        self.profile[(di + r) as usize] * self.profile[(dj + r) as usize]
    }

    /// Full `size x size` weight grid, row-major.
    pub fn weights(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.size * self.size);
        for &a in &self.profile {
            for &b in &self.profile {
                out.push(a * b);
            }
        }
        out
    }
}
