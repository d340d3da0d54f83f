// Estimate a Cauchy location from a simulated sample with the weak-moment
// estimator, its two-step GMM variant and the CF-matching variant.

use weak_moments::estimators::{estimate, CfGrid, EstimatorConfig, Method, WeightingScheme};
use weak_moments::weak::MomentSet;
use weak_moments::{Family, GaussianKernel, ParametricModel};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let truth = ParametricModel::cauchy(2.0);
    let data = truth.sample(1000, 7);
    let kernel = GaussianKernel::univariate(3.0)?;

    let mut configs = vec![
        EstimatorConfig::weak_moment(Family::CauchyLocation, MomentSet::powers(&[1])?, WeightingScheme::Identity),
        EstimatorConfig::weak_moment(Family::CauchyLocation, MomentSet::powers(&[1, 2])?, WeightingScheme::two_step()),
        EstimatorConfig::new(Family::CauchyLocation, Method::WeakCf(CfGrid::default_for(&kernel))),
    ];
    for cfg in &mut configs {
        cfg.covariance = true;
    }
    for cfg in &configs {
        let fit = estimate(&data, cfg)?;
        let se = fit.asymptotic_cov.as_ref().map(|v| (v[0][0] / data.len() as f64).sqrt());
        println!(
            "{:<14} mu = {:.4}  se = {}  converged = {}  iterations = {}",
            cfg.method.label(),
            fit.theta[0],
            se.map_or("-".to_string(), |s| format!("{s:.4}")),
            fit.converged,
            fit.iterations
        );
        if !fit.converged {
            return Err(format!("{} did not converge", cfg.method.label()).into());
        }
    }
    Ok(())
}
