use super::optim::{minimise, Bounds, Outcome};
use super::{CfGrid, check_data, matrix_rows, resolve_start, EstimateResult, EstimatorConfig, Method, WeightingScheme};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::{Family, ParametricModel};
use crate::robustness::{sandwich_s, sandwich_variance};
use crate::weak::{empirical_weak_moments, theoretical_weak_cf_grid, theoretical_weak_expectations, MomentSet, TestPolynomial};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn trust_box(start: &[f64], family: Family, config: &EstimatorConfig) -> Bounds {
    let half = config.trust_bandwidths * config.kernel.bandwidth();
    let mut lower: Vec<f64> = start.iter().map(|v| v - half).collect();
    let upper: Vec<f64> = start.iter().map(|v| v + half).collect();
    if let Some(k) = family.scale_index() {
        lower[k] = 1e-3 * start[k];
    }
    Bounds { lower, upper }
}

fn moment_polys(set: &MomentSet, dim: usize) -> Vec<TestPolynomial> {
    set.indices().iter().map(|a| a.polynomial(dim)).collect()
}

fn unpack(config: &EstimatorConfig) -> Result<(&MomentSet, WeightingScheme)> {
    match &config.method {
        Method::WeakMoment { moments, weighting } => Ok((moments, *weighting)),
        other => Err(Error::InvalidInput(format!("{} is not a weak-moment method", other.label()))),
    }
}

/// Empirical covariance of `psi(X_i) phi(X_i) - m(theta)` (uncentred, i.e.
/// taken about the model moments at `theta`).
fn empirical_score_covariance(data: &Dataset, config: &EstimatorConfig, set: &MomentSet, theta: &[f64]) -> Result<DMatrix<f64>> {
    let dim = data.dim();
    let model = ParametricModel::new(config.family, theta.to_vec())?;
    let polys = moment_polys(set, dim);
    let m = theoretical_weak_expectations(&model, &config.kernel, &polys, &config.quadrature)?;
    let k = polys.len();
    let mut s = DMatrix::zeros(k, k);
    let mut v = DVector::zeros(k);
    for x in data.rows() {
        let w = config.kernel.at_norm_sq(x.iter().map(|c| c * c).sum());
        for (i, p) in polys.iter().enumerate() {
            v[i] = p.evaluate(x) * w - m[i];
        }
        s.ger(1.0, &v, &v, 1.0);
    }
    Ok(s / data.len() as f64)
}

fn solve_moment_problem(
    data: &Dataset,
    config: &EstimatorConfig,
    set: &MomentSet,
    weight: &DMatrix<f64>,
    start: &[f64],
) -> Result<Outcome> {
    let target = empirical_weak_moments(data, &config.kernel, set)?;
    solve_for_target(&target, config, set, weight, start)
}

fn solve_for_target(
    target: &[f64],
    config: &EstimatorConfig,
    set: &MomentSet,
    weight: &DMatrix<f64>,
    start: &[f64],
) -> Result<Outcome> {
    let dim = config.family.dimension();
    let polys = moment_polys(set, dim);
    let family = config.family;
    let residual = |theta: &[f64]| -> Result<Vec<f64>> {
        let model = ParametricModel::new(family, theta.to_vec())?;
        let m = theoretical_weak_expectations(&model, &config.kernel, &polys, &config.quadrature)?;
        Ok(m.iter().zip(target).map(|(a, b)| a - b).collect())
    };
    let bounds = trust_box(start, family, config);
    let out = minimise(&residual, weight, start, &bounds, config.max_iter, config.tol)?;
    if out.converged {
        check_rank(&residual, &out.theta)?;
    }
    Ok(out)
}

/// Match a given vector of weak moments (for instance population moments
/// under a contaminated law) with weighting `W`, starting from `start`.
pub fn solve_weak_moments(
    target: &[f64],
    config: &EstimatorConfig,
    weight: &DMatrix<f64>,
    start: &[f64],
) -> Result<EstimateResult> {
    config.validate()?;
    let (set, _) = unpack(config)?;
    if target.len() != set.len() || weight.nrows() != set.len() || weight.ncols() != set.len() {
        return Err(Error::DimensionMismatch { expected: set.len(), got: target.len() });
    }
    ParametricModel::new(config.family, start.to_vec())?;
    let out = solve_for_target(target, config, set, weight, start)?;
    Ok(EstimateResult {
        theta: out.theta,
        converged: out.converged,
        iterations: out.iterations,
        objective: out.objective,
        asymptotic_cov: None,
        start_used: start.to_vec(),
    })
}

fn check_rank<F>(f: &F, theta: &[f64]) -> Result<()>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let jac = super::fd_jacobian(f, theta, None)?;
    let sv = jac.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min <= 1e-8 * max {
        return Err(Error::Identifiability(format!(
            "moment Jacobian is rank deficient at theta = {theta:?} (singular values {:?})",
            sv.as_slice()
        )));
    }
    Ok(())
}

fn attach_covariance(
    result: &mut EstimateResult,
    config: &EstimatorConfig,
    set: &MomentSet,
    weight: &DMatrix<f64>,
) -> Result<()> {
    if !config.covariance {
        return Ok(());
    }
    let model = ParametricModel::new(config.family, result.theta.clone())?;
    let g = crate::robustness::moment_jacobian(&model, &config.kernel, set, &config.quadrature)?;
    let s = sandwich_s(&model, &config.kernel, set, &config.quadrature)?;
    let v = sandwich_variance(&g, &s, weight)?;
    result.asymptotic_cov = Some(matrix_rows(&v));
    Ok(())
}

/// Weak-moment estimator with identity weighting. With as many moments as
/// parameters this is the root of the moment-matching system nearest the
/// start; otherwise it minimises `g' g`.
pub fn estimate_weak_moment(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    config.validate()?;
    check_data(data, config.family)?;
    let (set, _) = unpack(config)?;
    let start = resolve_start(data, config)?;
    let w = DMatrix::identity(set.len(), set.len());
    let out = solve_moment_problem(data, config, set, &w, &start)?;
    let mut result = EstimateResult {
        theta: out.theta,
        converged: out.converged,
        iterations: out.iterations,
        objective: out.objective,
        asymptotic_cov: None,
        start_used: start,
    };
    attach_covariance(&mut result, config, set, &w)?;
    Ok(result)
}

/// Two-step GMM: identity weighting first, then `W = (S_hat + ridge I)^{-1}`
/// with `S_hat` the empirical score covariance at the first-step estimate.
pub fn estimate_gmm_two_step(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    config.validate()?;
    check_data(data, config.family)?;
    let (set, weighting) = unpack(config)?;
    let ridge = match weighting {
        WeightingScheme::TwoStepOptimal { ridge } => ridge,
        WeightingScheme::Identity => super::DEFAULT_RIDGE,
    };
    let start = resolve_start(data, config)?;
    let k = set.len();
    let step1 = solve_moment_problem(data, config, set, &DMatrix::identity(k, k), &start)?;
    let s_hat = empirical_score_covariance(data, config, set, &step1.theta)?;
    let w = (s_hat + DMatrix::identity(k, k) * ridge)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("S_hat + ridge I is singular".into()))?;
    let w = (&w + w.transpose()) * 0.5;
    let step2 = solve_moment_problem(data, config, set, &w, &step1.theta)?;
    let mut result = EstimateResult {
        theta: step2.theta,
        converged: step1.converged && step2.converged,
        iterations: step1.iterations + step2.iterations,
        objective: step2.objective,
        asymptotic_cov: None,
        start_used: start,
    };
    attach_covariance(&mut result, config, set, &w)?;
    Ok(result)
}

/// Minimise `sum_k w_k |cf_hat(t_k) - cf_theta(t_k)|^2` over theta.
pub fn estimate_weak_cf(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    config.validate()?;
    check_data(data, config.family)?;
    let grid = match &config.method {
        Method::WeakCf(grid) => grid,
        other => return Err(Error::InvalidInput(format!("{} is not the weak-CF method", other.label()))),
    };
    let start = resolve_start(data, config)?;
    let kernel = &config.kernel;
    let mut target = vec![0.0; 2 * grid.t.len()];
    for &x in data.as_slice() {
        let phi = kernel.at(x);
        for (k, t) in grid.t.iter().enumerate() {
            let (s, c) = (t * x).sin_cos();
            target[2 * k] += phi * c;
            target[2 * k + 1] += phi * s;
        }
    }
    let n = data.len() as f64;
    let target: Vec<Complex64> = target.chunks_exact(2).map(|c| Complex64::new(c[0] / n, c[1] / n)).collect();
    solve_cf_target(&target, config, grid, start)
}

/// Fit the weak CF to given values on the configured grid.
pub fn solve_weak_cf(target: &[Complex64], config: &EstimatorConfig, start: &[f64]) -> Result<EstimateResult> {
    config.validate()?;
    let grid = match &config.method {
        Method::WeakCf(grid) => grid,
        other => return Err(Error::InvalidInput(format!("{} is not the weak-CF method", other.label()))),
    };
    if target.len() != grid.t.len() {
        return Err(Error::DimensionMismatch { expected: grid.t.len(), got: target.len() });
    }
    ParametricModel::new(config.family, start.to_vec())?;
    solve_cf_target(target, config, grid, start.to_vec())
}

fn solve_cf_target(target: &[Complex64], config: &EstimatorConfig, grid: &CfGrid, start: Vec<f64>) -> Result<EstimateResult> {
    let kernel = &config.kernel;
    let root_w: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let family = config.family;
    let residual = |theta: &[f64]| -> Result<Vec<f64>> {
        let model = ParametricModel::new(family, theta.to_vec())?;
        let cf = theoretical_weak_cf_grid(&model, kernel, &grid.t, &config.quadrature)?;
        let mut r = Vec::with_capacity(2 * cf.len());
        for (k, z) in cf.iter().enumerate() {
            r.push(root_w[k] * (z.re - target[k].re));
            r.push(root_w[k] * (z.im - target[k].im));
        }
        Ok(r)
    };
    let bounds = trust_box(&start, family, config);
    let w = DMatrix::identity(2 * grid.t.len(), 2 * grid.t.len());
    let out = minimise(&residual, &w, &start, &bounds, config.max_iter, config.tol)?;
    Ok(EstimateResult {
        theta: out.theta,
        converged: out.converged,
        iterations: out.iterations,
        objective: out.objective,
        asymptotic_cov: None,
        start_used: start,
    })
}
