// Fit a contaminated Cauchy sample with every univariate estimator.

use weak_moments::estimators::{estimate, EstimatorConfig, Method, WeightingScheme, HUBER_K, TUKEY_C};
use weak_moments::weak::MomentSet;
use weak_moments::{ContaminatedModel, Family, ParametricModel};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let law = ContaminatedModel::new(ParametricModel::cauchy(2.0), ParametricModel::cauchy(7.0), 0.1)?;
    let data = law.sample(2000, 11);

    let methods = vec![
        Method::WeakMoment { moments: MomentSet::powers(&[1])?, weighting: WeightingScheme::Identity },
        Method::WeakMoment { moments: MomentSet::powers(&[1, 2])?, weighting: WeightingScheme::two_step() },
        Method::Median,
        Method::Mle,
        Method::Huber { k: HUBER_K },
        Method::Tukey { c: TUKEY_C },
    ];
    println!("true mu = 2, 10% of the sample centred at 7");
    for m in methods {
        let cfg = EstimatorConfig::new(Family::CauchyLocation, m);
        let fit = estimate(&data, &cfg)?;
        println!("{:<14} mu = {:+.4}  bias = {:+.4}", cfg.method.label(), fit.theta[0], fit.theta[0] - 2.0);
    }
    Ok(())
}
