use super::index::{MomentIndex, MomentSet, TestPolynomial};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{GaussianKernel, Kernel};
use crate::models::{DataModel, ParametricModel};
use crate::quadrature::{faddeeva, integrate_1d_vec, integrate_radial_2d, QuadratureSpec};
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

/// Theoretical weak moments for a moment set at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMomentVector {
    pub values: Vec<f64>,
    pub kernel: GaussianKernel,
    pub theta: Vec<f64>,
}

fn check_kernel(model: &ParametricModel, kernel: &GaussianKernel) -> Result<()> {
    if kernel.dimension() != model.dimension() {
        return Err(Error::DimensionMismatch { expected: model.dimension(), got: kernel.dimension() });
    }
    Ok(())
}

/// `integral of p(x) * phi(x) * f_theta(x) dx` for every polynomial `p`,
/// computed in one adaptive pass.
pub fn theoretical_weak_expectations(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    polys: &[TestPolynomial],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    check_kernel(model, kernel)?;
    let sigma = kernel.bandwidth();
    let k = polys.len();
    match model.dimension() {
        1 => {
            let half = spec.truncation_radius * sigma;
            let mu = model.location()[0];
            let s = model.scale();
            let mut bps = vec![-half, half];
            bps.extend([mu - s, mu, mu + s].into_iter().filter(|b| b.abs() < half));
            bps.sort_by(f64::total_cmp);
            bps.dedup();
            let r = integrate_1d_vec(
                |x, out: &mut [f64]| {
                    let w = kernel.at(x) * model.density_unchecked(&[x]);
                    for (o, p) in out.iter_mut().zip(polys) {
                        *o = w * p.evaluate(&[x]);
                    }
                },
                k,
                &bps,
                spec,
            )?;
            Ok(r.values)
        }
        2 => {
            let c = [model.location()[0], model.location()[1]];
            let cn = (c[0] * c[0] + c[1] * c[1]).sqrt();
            let r = integrate_radial_2d(
                c,
                |r| model.radial_density(r),
                |x, out: &mut [f64]| {
                    let w = kernel.at_norm_sq(x[0] * x[0] + x[1] * x[1]);
                    for (o, p) in out.iter_mut().zip(polys) {
                        *o = w * p.evaluate(&x);
                    }
                },
                k,
                |r| cn * r / (sigma * sigma),
                cn + spec.truncation_radius * sigma,
                spec,
            )?;
            Ok(r.values)
        }
        d => Err(Error::InvalidInput(format!("weak moments are implemented for d <= 2, got {d}"))),
    }
}

/// Weak expectations under a clean model or a contamination mixture.
pub fn mixture_weak_expectations(
    model: &DataModel,
    kernel: &GaussianKernel,
    polys: &[TestPolynomial],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let mut total = vec![0.0; polys.len()];
    for (w, m) in model.components() {
        if w == 0.0 {
            continue;
        }
        let v = theoretical_weak_expectations(m, kernel, polys, spec)?;
        total.iter_mut().zip(v).for_each(|(t, x)| *t += w * x);
    }
    Ok(total)
}

pub fn theoretical_weak_moment(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    index: &MomentIndex,
) -> Result<f64> {
    if !index.is_valid_for(model.dimension()) {
        return Err(Error::InvalidInput(format!("moment index {index} does not match the model dimension")));
    }
    let p = index.polynomial(model.dimension());
    Ok(theoretical_weak_expectations(model, kernel, &[p], &QuadratureSpec::default())?[0])
}

pub fn theoretical_weak_moments(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    set: &MomentSet,
    spec: &QuadratureSpec,
) -> Result<WeakMomentVector> {
    set.check_dimension(model.dimension())?;
    let polys: Vec<TestPolynomial> =
        set.indices().iter().map(|a| a.polynomial(model.dimension())).collect();
    Ok(WeakMomentVector {
        values: theoretical_weak_expectations(model, kernel, &polys, spec)?,
        kernel: *kernel,
        theta: model.theta().to_vec(),
    })
}

/// `m_j / m_0`.
pub fn normalised_weak_moment(model: &ParametricModel, kernel: &GaussianKernel, j: u32) -> Result<f64> {
    let polys = [TestPolynomial::constant(1), MomentIndex::Power(j).polynomial(1)];
    let v = theoretical_weak_expectations(model, kernel, &polys, &QuadratureSpec::default())?;
    Ok(v[1] / v[0])
}

/// Mean of `psi(X_i) * phi(X_i)`; the kernel weight sits inside the average.
pub fn empirical_weak_expectation<F>(data: &Dataset, kernel: &GaussianKernel, psi: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if data.dim() != kernel.dimension() {
        return Err(Error::DimensionMismatch { expected: kernel.dimension(), got: data.dim() });
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    let sum: f64 = data
        .rows()
        .map(|x| psi(x) * kernel.at_norm_sq(x.iter().map(|v| v * v).sum()))
        .sum();
    Ok(sum / data.len() as f64)
}

/// Empirical weak moments for every index in `set`, in one pass over the data.
pub fn empirical_weak_moments(data: &Dataset, kernel: &GaussianKernel, set: &MomentSet) -> Result<Vec<f64>> {
    set.check_dimension(data.dim())?;
    if data.dim() != kernel.dimension() {
        return Err(Error::DimensionMismatch { expected: kernel.dimension(), got: data.dim() });
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    let mut acc = vec![0.0; set.len()];
    for x in data.rows() {
        let w = kernel.at_norm_sq(x.iter().map(|v| v * v).sum());
        for (a, idx) in acc.iter_mut().zip(set.indices()) {
            *a += idx.evaluate(x) * w;
        }
    }
    let n = data.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

fn cauchy_w(mu: f64, sigma: f64) -> Complex64 {
    faddeeva(Complex64::new(mu, 1.0) / (sigma * SQRT_2))
}

/// Weak `m_0` of Cauchy(mu, 1) under the Gaussian kernel:
/// `Re w((mu + i) / (sigma sqrt 2))` (a Voigt profile).
pub fn cauchy_weak_m0_faddeeva(mu: f64, sigma: f64) -> f64 {
    cauchy_w(mu, sigma).re
}

/// Remainder in `m_1 = mu * m_0 + R`; shifting `x -> x + mu` gives
/// `R = -Im w((mu + i) / (sigma sqrt 2))`.
pub fn cauchy_weak_m1_remainder(mu: f64, sigma: f64) -> f64 {
    -cauchy_w(mu, sigma).im
}

pub fn cauchy_weak_m1_faddeeva(mu: f64, sigma: f64) -> f64 {
    let w = cauchy_w(mu, sigma);
    mu * w.re - w.im
}

/// Smallest `mu > 0` at which the Cauchy ratio `m_1 / m_0` stops increasing.
pub fn moment_ratio_turning_point(sigma: f64) -> f64 {
    let ratio = |mu: f64| cauchy_weak_m1_faddeeva(mu, sigma) / cauchy_weak_m0_faddeeva(mu, sigma);
    let slope = |mu: f64| (ratio(mu + 1e-6) - ratio(mu - 1e-6)) / 2e-6;
    let step = 0.01 * sigma;
    let mut lo = 0.0;
    while slope(lo + step) > 0.0 {
        lo += step;
        if lo > 100.0 * sigma {
            return f64::INFINITY;
        }
    }
    let mut hi = lo + step;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ContaminatedModel;

    fn k3() -> GaussianKernel {
        GaussianKernel::univariate(3.0).unwrap()
    }

    #[test]
    fn symmetric_first_moment_vanishes() {
        let m1 = theoretical_weak_moment(&ParametricModel::cauchy(0.0), &k3(), &MomentIndex::Power(1)).unwrap();
        assert!(m1.abs() < 1e-14);
        let k2 = GaussianKernel::new(3.0, 2).unwrap();
        let b = ParametricModel::bivariate_cauchy([0.0, 0.0]);
        let v = theoretical_weak_moment(&b, &k2, &MomentIndex::MultiIndex(vec![1, 0])).unwrap();
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn faddeeva_and_quadrature_routes_agree() {
        for i in 0..=32 {
            let mu = -8.0 + 0.5 * i as f64;
            let m = ParametricModel::cauchy(mu);
            let polys = [TestPolynomial::constant(1), MomentIndex::Power(1).polynomial(1)];
            let q = theoretical_weak_expectations(&m, &k3(), &polys, &QuadratureSpec::default()).unwrap();
            assert!((q[0] - cauchy_weak_m0_faddeeva(mu, 3.0)).abs() < 1e-10, "mu={mu}");
            assert!((q[1] - cauchy_weak_m1_faddeeva(mu, 3.0)).abs() < 1e-10, "mu={mu}");
        }
    }

    #[test]
    fn cauchy_weak_m0_at_two() {
        // value fixed by both routes; 40-digit Voigt reference 0.65903305370682929
        let v = cauchy_weak_m0_faddeeva(2.0, 3.0);
        assert!((v - 0.659_033_053_706_829_3).abs() < 1e-12);
    }

    #[test]
    fn bivariate_m0_matches_independent_cubature() {
        // the polar reduction against a direct radial integral
        let k2 = GaussianKernel::new(3.0, 2).unwrap();
        let b = ParametricModel::bivariate_cauchy([0.0, 0.0]);
        let polys = [TestPolynomial::constant(2)];
        let v = theoretical_weak_expectations(&b, &k2, &polys, &QuadratureSpec::default()).unwrap()[0];
        // radial closed form: integral_0^inf r e^{-r^2/18} (1 + r^2)^{-3/2} dr
        let spec = QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-13, ..Default::default() };
        let radial = crate::quadrature::integrate_interval(
            |r| r * (-r * r / 18.0).exp() * (1.0 + r * r).powf(-1.5),
            0.0,
            60.0,
            &spec,
        )
        .unwrap()
        .value;
        assert!((v - radial).abs() < 1e-10, "{v} vs {radial}");
    }

    #[test]
    fn moments_are_finite_on_grid() {
        for sigma in [0.5, 1.0, 3.0, 5.0] {
            let k = GaussianKernel::univariate(sigma).unwrap();
            for m in [
                ParametricModel::cauchy(-4.0),
                ParametricModel::cauchy(20.0),
                ParametricModel::student_t(3.0, 1.0, 0.2).unwrap(),
                ParametricModel::student_t(1.5, 0.0, 10.0).unwrap(),
            ] {
                for j in 0..=6 {
                    let v = theoretical_weak_moment(&m, &k, &MomentIndex::Power(j)).unwrap();
                    assert!(v.is_finite());
                }
            }
        }
    }

    #[test]
    fn empirical_expectations() {
        let k = k3();
        let one = Dataset::univariate(vec![0.0]);
        assert_eq!(empirical_weak_expectation(&one, &k, |x| x[0]).unwrap(), 0.0);
        let pm = Dataset::univariate(vec![1.0, -1.0]);
        assert_eq!(empirical_weak_expectation(&pm, &k, |x| x[0]).unwrap(), 0.0);
        let d = ParametricModel::cauchy(2.0).sample(1000, 1);
        let mass = empirical_weak_expectation(&d, &k, |_| 1.0).unwrap();
        assert!(mass > 0.0 && mass <= 1.0);
        let set = MomentSet::powers(&[0, 1, 2]).unwrap();
        let v = empirical_weak_moments(&d, &k, &set).unwrap();
        assert!((v[0] - mass).abs() < 1e-15);
        assert!(empirical_weak_expectation(&Dataset::univariate(vec![]), &k, |_| 1.0).is_err());
    }

    #[test]
    fn mixture_expectation_is_weighted_sum() {
        let k = k3();
        let mix: DataModel =
            ContaminatedModel::new(ParametricModel::cauchy(2.0), ParametricModel::cauchy(7.0), 0.1).unwrap().into();
        let p = [MomentIndex::Power(1).polynomial(1)];
        let v = mixture_weak_expectations(&mix, &k, &p, &QuadratureSpec::default()).unwrap()[0];
        let expected = 0.9 * cauchy_weak_m1_faddeeva(2.0, 3.0) + 0.1 * cauchy_weak_m1_faddeeva(7.0, 3.0);
        assert!((v - expected).abs() < 1e-10);
    }

    #[test]
    fn ratio_turning_point_for_sigma_three() {
        let mu_star = moment_ratio_turning_point(3.0);
        // strictly increasing on [-7, 7]
        assert!(mu_star > 7.0 && mu_star < 7.3, "{mu_star}");
        let k = k3();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=140 {
            let mu = -7.0 + 0.1 * i as f64;
            let r = normalised_weak_moment(&ParametricModel::cauchy(mu), &k, 1).unwrap();
            assert!(r > prev, "mu={mu}");
            prev = r;
        }
    }
}
