// Recover a density from its kernel-weighted version by Tikhonov
// regularisation, and measure the convergence rate in lambda.

use weak_moments::reconstruction::{empirical_g, forward_multiply, log_spaced, rate_experiment, tikhonov_invert, GridFunction};
use weak_moments::{GaussianKernel, ParametricModel};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = GaussianKernel::univariate(3.0)?;
    let grid = GridFunction::default_grid(&kernel);
    let f = GridFunction::from_fn(grid.clone(), |x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())?;
    let g = forward_multiply(&f, &kernel)?;
    for lambda in [1e-2, 1e-4, 1e-6, 1e-8] {
        let h = tikhonov_invert(&g, &kernel, lambda)?;
        println!("lambda = {lambda:.0e}  |h - f| = {:.3e}", h.sub(&f)?.l2_norm());
    }

    let ones = GridFunction::from_fn(grid.clone(), |_| 1.0)?;
    for nu in [0.5, 1.0] {
        let r = rate_experiment(&kernel, nu, &log_spaced(-6.0, -2.0, 9), &ones)?;
        println!("source exponent nu = {nu}: fitted slope {:.3}", r.slope);
    }

    let data = ParametricModel::cauchy(0.0).sample(2000, 1);
    let g_hat = empirical_g(&data, &kernel, grid, 0.15)?;
    let f_hat = tikhonov_invert(&g_hat, &kernel, 1e-3)?;
    let centre = f_hat.restrict(-0.5, 0.5)?;
    let peak = centre.values().iter().cloned().fold(f64::MIN, f64::max);
    println!("empirical reconstruction near 0: {peak:.3} (true 1/pi = {:.3})", 1.0 / std::f64::consts::PI);
    Ok(())
}
