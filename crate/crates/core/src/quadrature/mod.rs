//! Numerical integration: adaptive Gauss-Kronrod in one dimension, the
//! Faddeeva function, tensor Gauss-Hermite cubature and a polar rule for
//! radially symmetric densities in the plane.

mod adaptive;
mod faddeeva;
mod hermite;
mod polar;

pub use adaptive::{integrate_1d, integrate_1d_vec, integrate_interval, Integral, VecIntegral};
pub use faddeeva::{faddeeva, ComplexValue};
pub use hermite::{cubature_2d, gauss_hermite_rule, HermiteRule};
pub use polar::integrate_radial_2d;

/// Tolerances and window for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of the integration window in units of the kernel bandwidth.
    pub truncation_radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            truncation_radius: 12.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(crate::Error::InvalidInput(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(crate::Error::InvalidInput(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.truncation_radius > 0.0) {
            return Err(crate::Error::InvalidInput(
                "truncation radius must be positive".into(),
            ));
        }
        Ok(())
    }
}
