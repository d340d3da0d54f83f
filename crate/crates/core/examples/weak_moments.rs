// Weak moments of a Cauchy law: closed form against adaptive quadrature,
// plus the weak cumulants of a symmetric t3.

use weak_moments::kernel::GaussianKernel;
use weak_moments::models::ParametricModel;
use weak_moments::weak::{cauchy_weak_m0_faddeeva, cauchy_weak_m1_faddeeva, theoretical_weak_moments, weak_cumulants, MomentSet};
use weak_moments::quadrature::QuadratureSpec;

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = GaussianKernel::univariate(3.0)?;
    let set = MomentSet::powers(&[0, 1])?;
    println!("{:>6} {:>18} {:>18} {:>10}", "mu", "m0 (Faddeeva)", "m0 (quadrature)", "|diff|");
    for mu in [-4.0, -1.0, 0.0, 0.5, 2.0, 6.0] {
        let closed = cauchy_weak_m0_faddeeva(mu, 3.0);
        let quad = theoretical_weak_moments(&ParametricModel::cauchy(mu), &kernel, &set, &QuadratureSpec::default())?.values;
        println!("{mu:>6.1} {closed:>18.14} {:>18.14} {:>10.2e}", quad[0], (closed - quad[0]).abs());
        let m1 = cauchy_weak_m1_faddeeva(mu, 3.0);
        if (m1 - quad[1]).abs() > 1e-9 {
            return Err(format!("m1 mismatch at mu = {mu}").into());
        }
    }

    let t3 = ParametricModel::student_t(3.0, 0.0, 1.0)?;
    let m = theoretical_weak_moments(&t3, &kernel, &MomentSet::powers(&[0, 1, 2, 3, 4])?, &QuadratureSpec::default())?.values;
    let kappa = weak_cumulants(&m)?;
    println!("t3 weak cumulants: {:?}", kappa);
    Ok(())
}
