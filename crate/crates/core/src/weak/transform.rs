use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::GaussianKernel;
use crate::models::ParametricModel;
use crate::quadrature::{integrate_1d_vec, ComplexValue, QuadratureSpec};
use num_complex::Complex64;

/// Weak characteristic function `integral of e^{itx} phi(x) f(x) dx` on a
/// grid of frequencies, in one adaptive pass (univariate models only).
pub fn theoretical_weak_cf_grid(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    ts: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<ComplexValue>> {
    if model.dimension() != 1 {
        return Err(Error::InvalidInput("the weak characteristic function is univariate only".into()));
    }
    let half = spec.truncation_radius * kernel.bandwidth();
    let mu = model.location()[0];
    let mut bps = vec![-half, half];
    if mu.abs() < half {
        bps.insert(1, mu);
    }
    let r = integrate_1d_vec(
        |x, out: &mut [f64]| {
            let w = kernel.at(x) * model.density_unchecked(&[x]);
            for (k, t) in ts.iter().enumerate() {
                let (s, c) = (t * x).sin_cos();
                out[2 * k] = w * c;
                out[2 * k + 1] = w * s;
            }
        },
        2 * ts.len(),
        &bps,
        spec,
    )?;
    Ok(r.values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

pub fn theoretical_weak_cf(model: &ParametricModel, kernel: &GaussianKernel, t: f64) -> Result<ComplexValue> {
    Ok(theoretical_weak_cf_grid(model, kernel, &[t], &QuadratureSpec::default())?[0])
}

/// `n^{-1} sum_i e^{i t X_i} phi(X_i)`.
pub fn empirical_weak_cf(data: &Dataset, kernel: &GaussianKernel, t: f64) -> Result<ComplexValue> {
    if data.dim() != 1 {
        return Err(Error::InvalidInput("the weak characteristic function is univariate only".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    let sum = data
        .as_slice()
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &x| {
            let (s, c) = (t * x).sin_cos();
            acc + Complex64::new(c, s) * kernel.at(x)
        });
    Ok(sum / data.len() as f64)
}

/// Principal-branch logarithm of the weak characteristic function.
pub fn weak_cgf(model: &ParametricModel, kernel: &GaussianKernel, t: f64) -> Result<ComplexValue> {
    let cf = theoretical_weak_cf(model, kernel, t)?;
    if cf.norm() < f64::MIN_POSITIVE {
        return Err(Error::Domain(format!("weak characteristic function vanishes at t = {t}")));
    }
    Ok(cf.ln())
}
