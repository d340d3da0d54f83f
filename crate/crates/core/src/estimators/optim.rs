//! Weighted least-squares solver shared by the moment-matching estimators.
//!
//! Minimises `g(theta)' W g(theta)` with Gauss-Newton steps, a backtracking
//! line search and a box constraint. When `g` has as many components as
//! theta the step is the Newton step of the root-finding problem.

use crate::error::Result;
use nalgebra::{DMatrix, DVector};

/// Relative step below which an overidentified fit that can no longer
/// decrease its objective is treated as stationary.
const ROUNDOFF_STEP: f64 = 1e-6;

pub(crate) struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    fn project(&self, theta: &mut [f64]) {
        for (k, v) in theta.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }

    fn on_boundary(&self, theta: &[f64]) -> bool {
        theta.iter().enumerate().any(|(k, &v)| {
            let tol = 1e-9 * (1.0 + v.abs());
            (v - self.lower[k]).abs() <= tol || (v - self.upper[k]).abs() <= tol
        })
    }
}

pub(crate) struct Outcome {
    pub theta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
}

/// Central-difference Jacobian of `f` at `theta`, step `1e-5 * max(1, |theta_k|)`.
pub(crate) fn fd_jacobian<F>(f: &F, theta: &[f64], lower: Option<&[f64]>) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p = theta.len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for k in 0..p {
        let h = 1e-5 * theta[k].abs().max(1.0);
        let mut up = theta.to_vec();
        let mut dn = theta.to_vec();
        up[k] += h;
        dn[k] -= h;
        // one-sided near a hard lower bound (scale parameters)
        let one_sided = lower.is_some_and(|lo| dn[k] <= lo[k]);
        let col = if one_sided {
            let f0 = f(theta)?;
            let f1 = f(&up)?;
            f1.iter().zip(&f0).map(|(a, b)| (a - b) / h).collect()
        } else {
            let fu = f(&up)?;
            let fd = f(&dn)?;
            fu.iter().zip(&fd).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        cols.push(col);
    }
    let k = cols[0].len();
    Ok(DMatrix::from_fn(k, p, |i, j| cols[j][i]))
}

fn quad_form(g: &DVector<f64>, w: &DMatrix<f64>) -> f64 {
    (g.transpose() * w * g)[(0, 0)]
}

pub(crate) fn minimise<F>(
    f: &F,
    weight: &DMatrix<f64>,
    start: &[f64],
    bounds: &Bounds,
    max_iter: usize,
    tol: f64,
) -> Result<Outcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p = start.len();
    let mut theta = start.to_vec();
    bounds.project(&mut theta);
    let mut g = DVector::from_vec(f(&theta)?);
    let square = g.len() == p;
    let mut q = quad_form(&g, weight);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut stationary = false;
    let hard_lower = Some(bounds.lower.as_slice());

    while iterations < max_iter {
        let jac = fd_jacobian(f, &theta, hard_lower)?;
        let grad = jac.transpose() * weight * &g;
        residual = if square { g.norm() } else { grad.norm() };
        if residual <= tol {
            break;
        }
        let step = if square {
            jac.clone().lu().solve(&(-&g))
        } else {
            let h = jac.transpose() * weight * &jac;
            h.cholesky().map(|c| c.solve(&(-&grad)))
        };
        let step = match step {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            // singular step: report the current iterate as unconverged
            _ => break,
        };
        // finite-difference noise floors the gradient; a negligible
        // Gauss-Newton step marks stationarity of an overidentified fit
        let theta_norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !square && step.norm() <= tol * (1.0 + theta_norm) {
            stationary = true;
            break;
        }
        iterations += 1;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + alpha * s).collect();
            bounds.project(&mut trial);
            let gt = DVector::from_vec(f(&trial)?);
            let qt = quad_form(&gt, weight);
            if qt < q {
                theta = trial;
                g = gt;
                q = qt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // no representable decrease: stationary if the step is already negligible
            if !square && step.norm() <= ROUNDOFF_STEP * (1.0 + theta_norm) {
                stationary = true;
            }
            break;
        }
    }
    if residual > tol && !stationary {
        let jac = fd_jacobian(f, &theta, hard_lower)?;
        residual = if square { g.norm() } else { (jac.transpose() * weight * &g).norm() };
    }
    let converged = (residual <= tol || stationary) && !bounds.on_boundary(&theta);
    Ok(Outcome { theta, converged, iterations, objective: q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // x^2 + y^2 = 4, x - y = 0
        let f = |t: &[f64]| Ok(vec![t[0] * t[0] + t[1] * t[1] - 4.0, t[0] - t[1]]);
        let b = Bounds { lower: vec![-10.0; 2], upper: vec![10.0; 2] };
        let out = minimise(&f, &DMatrix::identity(2, 2), &[1.0, 0.5], &b, 50, 1e-12).unwrap();
        assert!(out.converged);
        assert!((out.theta[0] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn overdetermined_least_squares() {
        // fit a constant c to (1, 2, 3) with weights: minimiser is the weighted mean
        let f = |t: &[f64]| Ok(vec![t[0] - 1.0, t[0] - 2.0, t[0] - 3.0]);
        let w = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 2.0]));
        let b = Bounds { lower: vec![-10.0], upper: vec![10.0] };
        let out = minimise(&f, &w, &[0.0], &b, 50, 1e-10).unwrap();
        assert!(out.converged);
        assert!((out.theta[0] - 9.0 / 4.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_solution_is_not_converged() {
        let f = |t: &[f64]| Ok(vec![t[0] - 5.0]);
        let b = Bounds { lower: vec![-1.0], upper: vec![1.0] };
        let out = minimise(&f, &DMatrix::identity(1, 1), &[0.0], &b, 50, 1e-12).unwrap();
        assert!(!out.converged);
        assert_eq!(out.theta[0], 1.0);
    }
}
