// Library weak moments against brute-force composite Simpson sums written
// out here from the closed-form densities.

use std::f64::consts::PI;
use weak_moments::quadrature::{cubature_2d, QuadratureSpec};
use weak_moments::weak::{cauchy_weak_m1_faddeeva, theoretical_weak_moments, MomentSet};
use weak_moments::{GaussianKernel, ParametricModel};

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn phi(x: f64, sigma: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp()
}

#[test]
fn t3_moments_match_simpson() {
    let kernel = GaussianKernel::univariate(3.0).unwrap();
    let (mu, s) = (0.7, 1.3);
    let model = ParametricModel::student_t(3.0, mu, s).unwrap();
    let lib = theoretical_weak_moments(&model, &kernel, &MomentSet::powers(&[0, 1, 2, 3, 4]).unwrap(), &QuadratureSpec::default())
        .unwrap()
        .values;
    let dens = |x: f64| {
        let z = (x - mu) / s;
        2.0 / (PI * 3f64.sqrt() * s) * (1.0 + z * z / 3.0).powi(-2)
    };
    for (j, v) in lib.iter().enumerate() {
        let oracle = simpson(|x| x.powi(j as i32) * phi(x, 3.0) * dens(x), -45.0, 45.0, 400_000);
        assert!((v - oracle).abs() < 1e-10, "m{j}: {v} vs {oracle}");
    }
}

#[test]
fn cauchy_m1_closed_form_matches_simpson() {
    for mu in [-5.0, -0.3, 0.0, 2.0, 7.1] {
        let oracle = simpson(|x| x * phi(x, 3.0) / (PI * (1.0 + (x - mu).powi(2))), -45.0, 45.0, 400_000);
        let v = cauchy_weak_m1_faddeeva(mu, 3.0);
        assert!((v - oracle).abs() < 1e-10, "mu = {mu}: {v} vs {oracle}");
    }
}

#[test]
fn bivariate_t3_moments_match_tensor_rules() {
    let kernel = GaussianKernel::new(3.0, 2).unwrap();
    let (m, s) = ([0.4, -0.2], 1.2);
    let model = ParametricModel::bivariate_t3(m, s).unwrap();
    let set = MomentSet::parse_list("(0,0);(1,0);(0,1);(2,0);(1,1);radial2").unwrap();
    let lib = theoretical_weak_moments(&model, &kernel, &set, &QuadratureSpec::default()).unwrap().values;
    let dens = |x: [f64; 2]| {
        let r2 = ((x[0] - m[0]).powi(2) + (x[1] - m[1]).powi(2)) / (s * s);
        (1.0 + r2 / 3.0).powf(-2.5) / (2.0 * PI * s * s)
    };
    let tests: [fn([f64; 2]) -> f64; 6] = [
        |_| 1.0,
        |x| x[0],
        |x| x[1],
        |x| x[0] * x[0],
        |x| x[0] * x[1],
        |x| x[0] * x[0] + x[1] * x[1],
    ];
    for (k, psi) in tests.iter().enumerate() {
        let integrand = |x: [f64; 2]| psi(x) * phi((x[0] * x[0] + x[1] * x[1]).sqrt(), 3.0) * dens(x);
        let hermite = cubature_2d(integrand, 3.0, 150).unwrap();
        let tensor = simpson(|y| simpson(|x| integrand([x, y]), -40.0, 40.0, 1600), -40.0, 40.0, 1600);
        assert!((lib[k] - tensor).abs() < 1e-8, "moment {k}: {} vs Simpson {tensor}", lib[k]);
        // algebraic tails cap the Hermite accuracy
        assert!((lib[k] - hermite).abs() < 1e-5, "moment {k}: {} vs Hermite {hermite}", lib[k]);
    }
}
