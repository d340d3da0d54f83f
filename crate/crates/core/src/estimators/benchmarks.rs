use super::{check_data, median_start, pooled_mad_scale, resolve_start, EstimateResult, EstimatorConfig, Method, MAD_CONSISTENCY};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::Family;

/// Sample median; the mean of the two middle order statistics for even n.
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of an empty sample");
    let mut v = xs.to_vec();
    let n = v.len();
    let mid = n / 2;
    let (_, &mut hi, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

/// Raw median absolute deviation about `centre` (no consistency factor).
pub fn mad(xs: &[f64], centre: f64) -> f64 {
    let dev: Vec<f64> = xs.iter().map(|x| (x - centre).abs()).collect();
    median(&dev)
}

fn closed_form(theta: Vec<f64>, start: Vec<f64>) -> EstimateResult {
    EstimateResult { theta, converged: true, iterations: 0, objective: 0.0, asymptotic_cov: None, start_used: start }
}

fn means(data: &Dataset) -> Vec<f64> {
    (0..data.dim()).map(|k| data.column(k).iter().sum::<f64>() / data.len() as f64).collect()
}

/// Classical estimators used for comparison.
pub fn benchmark_estimate(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    config.validate()?;
    let family = config.family;
    check_data(data, family)?;
    let has_scale = family.scale_index().is_some();
    let d = data.dim();
    match &config.method {
        Method::Median | Method::CoordMedian | Method::MedMad => {
            if matches!(config.method, Method::Median) && d != 1 {
                return Err(Error::InvalidInput("Median is univariate; use CoordMedian".into()));
            }
            let theta = median_start(data, family)?;
            Ok(closed_form(theta.clone(), theta))
        }
        Method::SpatialMedian => spatial_median(data, config),
        Method::MeanSd => {
            let mut theta = means(data);
            if has_scale {
                let n = data.len() as f64;
                let var = (0..d)
                    .map(|k| data.column(k).iter().map(|x| (x - theta[k]).powi(2)).sum::<f64>() / (n - 1.0))
                    .sum::<f64>()
                    / d as f64;
                theta.push(var.sqrt());
            }
            Ok(closed_form(theta, Vec::new()))
        }
        Method::Huber { k } => {
            let k = *k;
            m_location(data, config, |r| r.clamp(-k, k) / r)
        }
        Method::Tukey { c } => {
            let c = *c;
            m_location(data, config, |r| if r.abs() <= c { (1.0 - (r / c).powi(2)).powi(2) } else { 0.0 })
        }
        Method::Mle => match family {
            Family::CauchyLocation => cauchy_mle(data, config),
            Family::StudentTLocationScale { nu } => t_mle_em(data, config, nu),
            Family::BivariateCauchyLocation => t_mle_em(data, config, 1.0),
            Family::BivariateT3LocationScale => t_mle_em(data, config, 3.0),
        },
        other => Err(Error::InvalidInput(format!("{} is not a benchmark method", other.label()))),
    }
}

/// Location M-estimate by iterative reweighting with a fixed MAD scale.
/// `weight(r)` is `psi(r) / r` for the standardised residual `r`.
fn m_location<W: Fn(f64) -> f64>(data: &Dataset, config: &EstimatorConfig, weight: W) -> Result<EstimateResult> {
    if data.dim() != 1 {
        return Err(Error::InvalidInput("Huber and Tukey estimates are univariate".into()));
    }
    let xs = data.as_slice();
    let start = median(xs);
    let scale = MAD_CONSISTENCY * mad(xs, start);
    if !(scale > 0.0) {
        return Err(Error::Numerical("median absolute deviation is zero".into()));
    }
    let mut mu = start;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let (mut sw, mut swx) = (0.0, 0.0);
        for &x in xs {
            let r = (x - mu) / scale;
            let w = if r == 0.0 { 1.0 } else { weight(r) };
            sw += w;
            swx += w * x;
        }
        if !(sw > 0.0) {
            return Err(Error::Numerical("all observations received zero weight".into()));
        }
        let next = swx / sw;
        let step = (next - mu).abs();
        mu = next;
        if step <= config.tol * scale {
            converged = true;
            break;
        }
    }
    let mut theta = vec![mu];
    if config.family.scale_index().is_some() {
        theta.push(scale);
    }
    Ok(EstimateResult { theta, converged, iterations, objective: 0.0, asymptotic_cov: None, start_used: vec![start] })
}

/// Weiszfeld iteration for the geometric median, started at the
/// coordinatewise median. Points coinciding with the iterate are skipped.
fn spatial_median(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    let d = data.dim();
    let start = median_start(data, config.family)?;
    let mut mu = start[..d].to_vec();
    let scale = pooled_mad_scale(data, &mu).unwrap_or(1.0);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter.max(1000) {
        iterations += 1;
        let mut num = vec![0.0; d];
        let mut den = 0.0;
        for x in data.rows() {
            let dist = x.iter().zip(&mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if dist < 1e-12 * scale {
                continue;
            }
            den += 1.0 / dist;
            num.iter_mut().zip(x).for_each(|(n, xi)| *n += xi / dist);
        }
        let next: Vec<f64> = num.iter().map(|n| n / den).collect();
        let step = next.iter().zip(&mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        mu = next;
        if step <= config.tol * scale {
            converged = true;
            break;
        }
    }
    let mut theta = mu.clone();
    if config.family.scale_index().is_some() {
        theta.push(pooled_mad_scale(data, &mu)?);
    }
    Ok(EstimateResult { theta, converged, iterations, objective: 0.0, asymptotic_cov: None, start_used: start })
}

fn cauchy_loglik(xs: &[f64], mu: f64) -> f64 {
    -xs.iter().map(|x| (1.0 + (x - mu).powi(2)).ln()).sum::<f64>()
}

/// Cauchy location MLE by safeguarded Newton from the median.
fn cauchy_mle(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    let xs = data.as_slice();
    let start = resolve_start(data, config)?;
    let n = xs.len() as f64;
    let mut mu = start[0];
    let mut ll = cauchy_loglik(xs, mu);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        let (mut score, mut hess) = (0.0, 0.0);
        for &x in xs {
            let u = x - mu;
            let q = 1.0 + u * u;
            score += 2.0 * u / q;
            hess += 2.0 * (u * u - 1.0) / (q * q);
        }
        if (score / n).abs() <= config.tol {
            converged = true;
            break;
        }
        iterations += 1;
        // fall back to a unit ascent step where the log-likelihood is not concave
        let step = if hess < 0.0 { -score / hess } else { score.signum() };
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..50 {
            let trial = mu + alpha * step;
            let lt = cauchy_loglik(xs, trial);
            if lt > ll {
                mu = trial;
                ll = lt;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            // at the optimum up to rounding of the log-likelihood
            converged = hess < 0.0 && step.abs() <= 1e-6 * (1.0 + mu.abs());
            break;
        }
    }
    if !converged || !mu.is_finite() {
        return Ok(EstimateResult {
            theta: start.clone(),
            converged: false,
            iterations,
            objective: -cauchy_loglik(xs, start[0]) / n,
            asymptotic_cov: None,
            start_used: start,
        });
    }
    Ok(EstimateResult { theta: vec![mu], converged, iterations, objective: -ll / n, asymptotic_cov: None, start_used: start })
}

/// EM (iteratively reweighted) MLE for t laws with scatter `s^2 I`; the
/// scale is held at one for the location-only bivariate Cauchy family.
fn t_mle_em(data: &Dataset, config: &EstimatorConfig, nu: f64) -> Result<EstimateResult> {
    let d = data.dim();
    let family = config.family;
    let fit_scale = family.scale_index().is_some();
    let start = resolve_start(data, config)?;
    let mut mu = start[..d].to_vec();
    let mut s = if fit_scale { start[d] } else { 1.0 };
    let n = data.len() as f64;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter.max(2000) {
        iterations += 1;
        let mut sw = 0.0;
        let mut swx = vec![0.0; d];
        let mut weights = Vec::with_capacity(data.len());
        for x in data.rows() {
            let r2 = x.iter().zip(&mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (s * s);
            let w = (nu + d as f64) / (nu + r2);
            weights.push(w);
            sw += w;
            swx.iter_mut().zip(x).for_each(|(a, xi)| *a += w * xi);
        }
        let next_mu: Vec<f64> = swx.iter().map(|a| a / sw).collect();
        let next_s = if fit_scale {
            let ss: f64 = data
                .rows()
                .zip(&weights)
                .map(|(x, w)| w * x.iter().zip(&next_mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                .sum();
            (ss / (n * d as f64)).sqrt()
        } else {
            1.0
        };
        let step = next_mu.iter().zip(&mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() + (next_s - s).abs();
        mu = next_mu;
        s = next_s;
        if !(s > 0.0) || mu.iter().any(|v| !v.is_finite()) {
            break;
        }
        if step <= config.tol * s {
            converged = true;
            break;
        }
    }
    if !converged {
        return Ok(EstimateResult { theta: start.clone(), converged, iterations, objective: 0.0, asymptotic_cov: None, start_used: start });
    }
    let mut theta = mu;
    if fit_scale {
        theta.push(s);
    }
    Ok(EstimateResult { theta, converged, iterations, objective: 0.0, asymptotic_cov: None, start_used: start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{EstimatorConfig, HUBER_K};
    use crate::models::ParametricModel;

    #[test]
    fn median_small_samples() {
        assert_eq!(median(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 100.0], 3.0), 1.0);
    }

    #[test]
    fn huber_and_tukey_limits_give_the_mean() {
        let data = ParametricModel::cauchy(0.5).sample(301, 7);
        let mean = data.as_slice().iter().sum::<f64>() / 301.0;
        for method in [Method::Huber { k: 1e12 }, Method::Tukey { c: 1e12 }] {
            let cfg = EstimatorConfig::new(Family::CauchyLocation, method);
            let r = benchmark_estimate(&data, &cfg).unwrap();
            assert!((r.theta[0] - mean).abs() < 1e-8, "{} vs {}", r.theta[0], mean);
        }
    }

    #[test]
    fn huber_is_between_median_and_mean_on_symmetric_data() {
        let data = Dataset::univariate(vec![-1.0, 0.0, 1.0, 2.0, 3.0]);
        let cfg = EstimatorConfig::new(Family::CauchyLocation, Method::Huber { k: HUBER_K });
        let r = benchmark_estimate(&data, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.theta[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cauchy_mle_solves_the_score_equation() {
        let data = ParametricModel::cauchy(2.0).sample(500, 11);
        let cfg = EstimatorConfig::new(Family::CauchyLocation, Method::Mle);
        let r = benchmark_estimate(&data, &cfg).unwrap();
        assert!(r.converged);
        let score: f64 = data.as_slice().iter().map(|x| 2.0 * (x - r.theta[0]) / (1.0 + (x - r.theta[0]).powi(2))).sum();
        assert!(score.abs() < 1e-6);
        assert!((r.theta[0] - 2.0).abs() < 0.3);
    }

    #[test]
    fn t_mle_recovers_scale() {
        let model = ParametricModel::student_t(3.0, 1.0, 2.0).unwrap();
        let data = model.sample(4000, 3);
        let cfg = EstimatorConfig::new(model.family(), Method::Mle);
        let r = benchmark_estimate(&data, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.theta[0] - 1.0).abs() < 0.15 && (r.theta[1] - 2.0).abs() < 0.15, "{:?}", r.theta);
    }

    #[test]
    fn spatial_median_is_the_geometric_median() {
        // three vertices of an equilateral triangle: the Fermat point is the centroid
        let h = 3f64.sqrt() / 2.0;
        let data = Dataset::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let cfg = EstimatorConfig::new(Family::BivariateCauchyLocation, Method::SpatialMedian);
        let r = benchmark_estimate(&data, &cfg).unwrap();
        assert!((r.theta[0] - 0.5).abs() < 1e-7 && (r.theta[1] - h / 3.0).abs() < 1e-7, "{:?}", r.theta);
    }

    #[test]
    fn mean_sd_closed_form() {
        let data = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0]);
        let cfg = EstimatorConfig::new(Family::StudentTLocationScale { nu: 3.0 }, Method::MeanSd);
        let r = benchmark_estimate(&data, &cfg).unwrap();
        assert_eq!(r.theta[0], 2.5);
        assert!((r.theta[1] - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
