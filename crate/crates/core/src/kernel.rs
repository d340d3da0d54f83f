//! Rapidly decaying positive weight functions used inside every weak expectation.

use crate::error::{Error, Result};

/// Default bandwidth used by all built-in experiments.
pub const DEFAULT_BANDWIDTH: f64 = 3.0;

/// A positive, rapidly decaying weight on R^d.
pub trait Kernel: Send + Sync {
    fn dimension(&self) -> usize;

    /// Kernel value at `x`; `x.len()` must equal [`Kernel::dimension`].
    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

/// Isotropic Gaussian kernel `exp(-|x|^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    bandwidth: f64,
    dimension: usize,
}

impl GaussianKernel {
    pub fn new(bandwidth: f64, dimension: usize) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidInput(format!(
                "kernel bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        if dimension == 0 {
            return Err(Error::InvalidInput("kernel dimension must be >= 1".into()));
        }
        Ok(Self { bandwidth, dimension })
    }

    pub fn univariate(bandwidth: f64) -> Result<Self> {
        Self::new(bandwidth, 1)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Value as a function of the squared norm; skips the dimension check.
    #[inline]
    pub fn at_norm_sq(&self, r2: f64) -> f64 {
        (-0.5 * r2 / (self.bandwidth * self.bandwidth)).exp()
    }

    /// Univariate shortcut.
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.at_norm_sq(x * x)
    }

    /// The kernel whose value is the square of this one: bandwidth sigma / sqrt(2).
    pub fn squared(&self) -> Self {
        self.power(2.0)
    }

    /// `phi^nu` for `nu > 0`, again Gaussian with bandwidth sigma / sqrt(nu).
    pub fn power(&self, nu: f64) -> Self {
        assert!(nu > 0.0, "kernel power must be positive");
        Self {
            bandwidth: self.bandwidth / nu.sqrt(),
            dimension: self.dimension,
        }
    }
}

impl Default for GaussianKernel {
    fn default() -> Self {
        Self {
            bandwidth: DEFAULT_BANDWIDTH,
            dimension: 1,
        }
    }
}

impl Kernel for GaussianKernel {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(self.at_norm_sq(x.iter().map(|v| v * v).sum()))
    }
}
