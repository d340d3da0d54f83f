// Influence function, gross error sensitivity and the far-tail plateau of
// the weak-moment estimator at a standard Cauchy, next to the median.

use weak_moments::quadrature::QuadratureSpec;
use weak_moments::robustness::{median_gross_error_sensitivity, InfluenceMap, InfluenceProfile, GES_RESOLUTION};
use weak_moments::weak::MomentSet;
use weak_moments::estimators::WeightingScheme;
use weak_moments::{GaussianKernel, ParametricModel};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = ParametricModel::cauchy(0.0);
    let kernel = GaussianKernel::univariate(3.0)?;
    let map = InfluenceMap::new(&model, &kernel, &MomentSet::powers(&[1])?, WeightingScheme::Identity, &QuadratureSpec::default())?;

    for x in [0.5, 1.0, 3.0, 5.0, 10.0, 30.0] {
        println!("IF({x:>5.1}) = {:+.5}", map.evaluate(&[x])[0]);
    }
    println!("GES weak moment = {:.4}", map.gross_error_sensitivity(GES_RESOLUTION));
    println!("GES median      = {:.4}", median_gross_error_sensitivity(&model)?);
    println!("plateau         = {:.2e}", map.plateau()[0]);

    let grid = InfluenceProfile::symmetric_grid(3.0, 4.0, 9);
    let profile = InfluenceProfile::compute(&map, &grid)?;
    let mut csv = Vec::new();
    profile.write_csv(&["mu"], &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}
