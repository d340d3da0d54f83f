// Asymptotic sandwich variance across locations and weightings, with the
// median as reference.

use weak_moments::estimators::WeightingScheme;
use weak_moments::quadrature::QuadratureSpec;
use weak_moments::robustness::{median_asymptotic_variance, sandwich_pieces};
use weak_moments::weak::MomentSet;
use weak_moments::{GaussianKernel, ParametricModel};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = GaussianKernel::univariate(3.0)?;
    let spec = QuadratureSpec::default();
    let j1 = MomentSet::powers(&[1])?;
    let j12 = MomentSet::powers(&[1, 2])?;
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "mu", "V WM", "V GMM-I", "V GMM-eff", "V median");
    for mu in [0.0, 1.0, 2.0] {
        let model = ParametricModel::cauchy(mu);
        let wm = sandwich_pieces(&model, &kernel, &j1, WeightingScheme::Identity, &spec)?;
        let gi = sandwich_pieces(&model, &kernel, &j12, WeightingScheme::Identity, &spec)?;
        let eff = sandwich_pieces(&model, &kernel, &j12, WeightingScheme::TwoStepOptimal { ridge: 0.0 }, &spec)?;
        println!(
            "{mu:>4.1} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            wm.v[(0, 0)],
            gi.v[(0, 0)],
            eff.v[(0, 0)],
            median_asymptotic_variance(&model)?
        );
    }
    let t3 = ParametricModel::student_t(3.0, 0.0, 1.0)?;
    let p = sandwich_pieces(&t3, &kernel, &j12, WeightingScheme::TwoStepOptimal { ridge: 0.0 }, &spec)?;
    println!("t3 (mu, s) efficient V:\n{}", p.v);
    Ok(())
}
