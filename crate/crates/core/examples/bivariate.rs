// Bivariate models: Cauchy location and t3 location-scale, weak moments
// against spatial median, coordinatewise median and MLE.

use weak_moments::estimators::{estimate, EstimatorConfig, Method, WeightingScheme};
use weak_moments::weak::MomentSet;
use weak_moments::{Family, ParametricModel};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cauchy = ParametricModel::bivariate_cauchy([1.0, 1.0]);
    let data = cauchy.sample(1000, 3);
    let first = MomentSet::parse_list("(1,0);(0,1)")?;
    for m in [
        Method::WeakMoment { moments: first, weighting: WeightingScheme::Identity },
        Method::SpatialMedian,
        Method::CoordMedian,
        Method::Mle,
    ] {
        let cfg = EstimatorConfig::new(Family::BivariateCauchyLocation, m);
        let fit = estimate(&data, &cfg)?;
        println!("{:<16} mu = ({:.4}, {:.4})", cfg.method.label(), fit.theta[0], fit.theta[1]);
    }

    let t3 = ParametricModel::bivariate_t3([0.0, 0.0], 1.0)?;
    let data = t3.sample(1000, 5);
    let set = MomentSet::parse_list("(1,0);(0,1);radial2")?;
    for m in [
        Method::WeakMoment { moments: set, weighting: WeightingScheme::two_step() },
        Method::Mle,
        Method::MeanSd,
        Method::MedMad,
    ] {
        let cfg = EstimatorConfig::new(Family::BivariateT3LocationScale, m);
        let fit = estimate(&data, &cfg)?;
        println!("{:<16} theta = ({:.4}, {:.4}, {:.4})", cfg.method.label(), fit.theta[0], fit.theta[1], fit.theta[2]);
    }
    Ok(())
}
