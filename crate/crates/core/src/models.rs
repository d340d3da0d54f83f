//! Parametric families, contamination mixtures and their seeded samplers.

use crate::data::Dataset;
use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Cauchy(mu, 1); theta = (mu).
    CauchyLocation,
    /// Student t with `nu` degrees of freedom; theta = (mu, s).
    StudentTLocationScale { nu: f64 },
    /// Bivariate Cauchy with identity scatter; theta = (mu1, mu2).
    BivariateCauchyLocation,
    /// Bivariate t with 3 degrees of freedom and scatter s^2 I; theta = (mu1, mu2, s).
    BivariateT3LocationScale,
}

impl Family {
    pub fn dimension(&self) -> usize {
        match self {
            Family::CauchyLocation | Family::StudentTLocationScale { .. } => 1,
            Family::BivariateCauchyLocation | Family::BivariateT3LocationScale => 2,
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            Family::CauchyLocation => 1,
            Family::StudentTLocationScale { .. } | Family::BivariateCauchyLocation => 2,
            Family::BivariateT3LocationScale => 3,
        }
    }

    /// Index of the scale parameter in theta, if the family has one.
    pub fn scale_index(&self) -> Option<usize> {
        match self {
            Family::StudentTLocationScale { .. } => Some(1),
            Family::BivariateT3LocationScale => Some(2),
            _ => None,
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::CauchyLocation => &["mu"],
            Family::StudentTLocationScale { .. } => &["mu", "s"],
            Family::BivariateCauchyLocation => &["mu1", "mu2"],
            Family::BivariateT3LocationScale => &["mu1", "mu2", "s"],
        }
    }

    /// Degrees of freedom of the underlying (multivariate) t law.
    fn dof(&self) -> f64 {
        match self {
            Family::CauchyLocation | Family::BivariateCauchyLocation => 1.0,
            Family::StudentTLocationScale { nu } => *nu,
            Family::BivariateT3LocationScale => 3.0,
        }
    }
}

/// A family together with a parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricModel {
    family: Family,
    theta: Vec<f64>,
}

impl ParametricModel {
    pub fn new(family: Family, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != family.n_params() {
            return Err(Error::DimensionMismatch { expected: family.n_params(), got: theta.len() });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("parameters must be finite".into()));
        }
        if let Family::StudentTLocationScale { nu } = family {
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(Error::InvalidInput(format!("degrees of freedom must be positive, got {nu}")));
            }
        }
        if let Some(k) = family.scale_index() {
            if theta[k] <= 0.0 {
                return Err(Error::InvalidInput(format!("scale must be positive, got {}", theta[k])));
            }
        }
        Ok(Self { family, theta })
    }

    pub fn cauchy(mu: f64) -> Self {
        Self::new(Family::CauchyLocation, vec![mu]).expect("finite location")
    }

    pub fn student_t(nu: f64, mu: f64, s: f64) -> Result<Self> {
        Self::new(Family::StudentTLocationScale { nu }, vec![mu, s])
    }

    pub fn bivariate_cauchy(mu: [f64; 2]) -> Self {
        Self::new(Family::BivariateCauchyLocation, mu.to_vec()).expect("finite location")
    }

    pub fn bivariate_t3(mu: [f64; 2], s: f64) -> Result<Self> {
        Self::new(Family::BivariateT3LocationScale, vec![mu[0], mu[1], s])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn dimension(&self) -> usize {
        self.family.dimension()
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(self.family, theta)
    }

    pub fn location(&self) -> &[f64] {
        &self.theta[..self.dimension()]
    }

    pub fn scale(&self) -> f64 {
        self.family.scale_index().map_or(1.0, |k| self.theta[k])
    }

    /// Density as a function of the distance `r = |x - location|`; the
    /// families here are all spherically symmetric about their location.
    pub fn radial_density(&self, r: f64) -> f64 {
        let s = self.scale();
        let nu = self.family.dof();
        let d = self.dimension() as f64;
        let q = (r / s).powi(2) / nu;
        self.normaliser() * (1.0 + q).powf(-(nu + d) / 2.0)
    }

    fn normaliser(&self) -> f64 {
        let s = self.scale();
        match self.family {
            Family::CauchyLocation => 1.0 / PI,
            Family::StudentTLocationScale { nu } => {
                (libm::lgamma((nu + 1.0) / 2.0) - libm::lgamma(nu / 2.0)).exp()
                    / ((nu * PI).sqrt() * s)
            }
            // Gamma(3/2) / pi^(3/2)
            Family::BivariateCauchyLocation => 0.5 / PI,
            // Gamma(5/2) / (Gamma(3/2) * 3 pi s^2) = 1 / (2 pi s^2)
            Family::BivariateT3LocationScale => 0.5 / (PI * s * s),
        }
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.density_unchecked(x))
    }

    pub(crate) fn density_unchecked(&self, x: &[f64]) -> f64 {
        self.radial_density(self.distance(x))
    }

    fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.location())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: x.len() });
        }
        Ok(())
    }

    /// Gradient of `log f_theta(x)` with respect to theta.
    pub fn log_density_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let d = self.dimension();
        let nu = self.family.dof();
        let s = self.scale();
        let diff: Vec<f64> = x.iter().zip(self.location()).map(|(a, b)| a - b).collect();
        let q = diff.iter().map(|v| v * v).sum::<f64>() / (s * s);
        let u = 1.0 + q / nu;
        let mut grad: Vec<f64> = diff
            .iter()
            .map(|v| (nu + d as f64) / (nu * s * s) * v / u)
            .collect();
        if self.family.scale_index().is_some() {
            grad.push(-(d as f64) / s + (nu + d as f64) / nu * q / (s * u));
        }
        Ok(grad)
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let s = self.scale();
        match self.family {
            Family::CauchyLocation => {
                let u: f64 = rng.gen();
                out[0] = self.theta[0] + (PI * (u - 0.5)).tan();
            }
            Family::StudentTLocationScale { nu } => {
                let z: f64 = StandardNormal.sample(rng);
                let w = ChiSquared::new(nu).expect("nu > 0").sample(rng);
                out[0] = self.theta[0] + s * z / (w / nu).sqrt();
            }
            Family::BivariateCauchyLocation | Family::BivariateT3LocationScale => {
                let nu = self.family.dof();
                let angle = 2.0 * PI * rng.gen::<f64>();
                let radial = ChiSquared::new(2.0).expect("dof").sample(rng);
                let mixing = ChiSquared::new(nu).expect("dof").sample(rng);
                let r = s * (nu * radial / mixing).sqrt();
                out[0] = self.theta[0] + r * angle.cos();
                out[1] = self.theta[1] + r * angle.sin();
            }
        }
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        let mut rng = stream_rng(seed, 0);
        let d = self.dimension();
        let mut values = vec![0.0; n * d];
        for row in values.chunks_exact_mut(d) {
            self.draw(&mut rng, row);
        }
        Dataset::new(d, values).expect("consistent shape")
    }
}

/// ChaCha8 generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `(1 - epsilon) * base + epsilon * contaminant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminatedModel {
    pub base: ParametricModel,
    pub contaminant: ParametricModel,
    pub epsilon: f64,
}

impl ContaminatedModel {
    pub fn new(base: ParametricModel, contaminant: ParametricModel, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidInput(format!("epsilon must lie in [0, 1), got {epsilon}")));
        }
        if base.dimension() != contaminant.dimension() {
            return Err(Error::DimensionMismatch {
                expected: base.dimension(),
                got: contaminant.dimension(),
            });
        }
        Ok(Self { base, contaminant, epsilon })
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        Ok((1.0 - self.epsilon) * self.base.density(x)? + self.epsilon * self.contaminant.density(x)?)
    }

    /// Base draws come from stream 0 exactly as in [`ParametricModel::sample`],
    /// contaminant draws from stream 1 and component labels from stream 2,
    /// so `epsilon = 0` reproduces the base sample bit for bit.
    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        let d = self.base.dimension();
        let mut base_rng = stream_rng(seed, 0);
        let mut cont_rng = stream_rng(seed, 1);
        let mut label_rng = stream_rng(seed, 2);
        let mut values = vec![0.0; n * d];
        let mut spare = vec![0.0; d];
        for row in values.chunks_exact_mut(d) {
            self.base.draw(&mut base_rng, row);
            self.contaminant.draw(&mut cont_rng, &mut spare);
            if label_rng.gen::<f64>() < self.epsilon {
                row.copy_from_slice(&spare);
            }
        }
        Dataset::new(d, values).expect("consistent shape")
    }
}

/// Either a clean parametric model or a contamination mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataModel {
    Pure(ParametricModel),
    Contaminated(ContaminatedModel),
}

impl DataModel {
    pub fn dimension(&self) -> usize {
        match self {
            DataModel::Pure(m) => m.dimension(),
            DataModel::Contaminated(c) => c.base.dimension(),
        }
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        match self {
            DataModel::Pure(m) => m.density(x),
            DataModel::Contaminated(c) => c.density(x),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        match self {
            DataModel::Pure(m) => m.sample(n, seed),
            DataModel::Contaminated(c) => c.sample(n, seed),
        }
    }

    /// Mixture components with their weights.
    pub fn components(&self) -> Vec<(f64, &ParametricModel)> {
        match self {
            DataModel::Pure(m) => vec![(1.0, m)],
            DataModel::Contaminated(c) => vec![(1.0 - c.epsilon, &c.base), (c.epsilon, &c.contaminant)],
        }
    }
}

impl From<ParametricModel> for DataModel {
    fn from(m: ParametricModel) -> Self {
        DataModel::Pure(m)
    }
}

impl From<ContaminatedModel> for DataModel {
    fn from(c: ContaminatedModel) -> Self {
        DataModel::Contaminated(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_interval, QuadratureSpec};
    use rand::Rng;

    fn spec() -> QuadratureSpec {
        QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, ..Default::default() }
    }

    // integral over the real line via x = t / (1 - t^2)
    fn total_mass_1d(f: impl Fn(f64) -> f64) -> f64 {
        integrate_interval(
            |t| {
                let x = t / (1.0 - t * t);
                let dx = (1.0 + t * t) / (1.0 - t * t).powi(2);
                f(x) * dx
            },
            -1.0,
            1.0,
            &spec(),
        )
        .unwrap()
        .value
    }

    // integral over the plane of a function of |x - c|, via r = t / (1 - t)
    fn total_mass_radial(f: impl Fn(f64) -> f64) -> f64 {
        integrate_interval(
            |t| {
                let r = t / (1.0 - t);
                2.0 * PI * r * f(r) / (1.0 - t).powi(2)
            },
            0.0,
            1.0,
            &spec(),
        )
        .unwrap()
        .value
    }

    #[test]
    fn density_values() {
        let c = ParametricModel::cauchy(0.0);
        assert!((c.density(&[0.0]).unwrap() - 1.0 / PI).abs() < 1e-15);
        let b = ParametricModel::bivariate_cauchy([0.0, 0.0]);
        assert!((b.density(&[0.0, 0.0]).unwrap() - 0.5 / PI).abs() < 1e-15);
        // standard t3 at 0: Gamma(2) / (Gamma(3/2) sqrt(3 pi)) = 2 / (pi sqrt 3)
        let t = ParametricModel::student_t(3.0, 0.0, 1.0).unwrap();
        let expected = 2.0 / (PI * 3f64.sqrt());
        assert!((t.density(&[0.0]).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.367_55).abs() < 1e-5);
        assert!(matches!(c.density(&[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn densities_integrate_to_one() {
        for m in [
            ParametricModel::cauchy(2.0),
            ParametricModel::student_t(3.0, 0.5, 1.7).unwrap(),
            ParametricModel::student_t(7.5, -1.0, 0.4).unwrap(),
        ] {
            let mass = total_mass_1d(|x| m.density(&[x]).unwrap());
            assert!((mass - 1.0).abs() < 1e-6, "{m:?}: {mass}");
        }
        for m in [
            ParametricModel::bivariate_cauchy([1.0, 1.0]),
            ParametricModel::bivariate_t3([0.0, 0.0], 1.0).unwrap(),
            ParametricModel::bivariate_t3([0.0, 0.0], 5.0).unwrap(),
        ] {
            let mass = total_mass_radial(|r| m.radial_density(r));
            assert!((mass - 1.0).abs() < 1e-6, "{m:?}: {mass}");
        }
    }

    #[test]
    fn mixture_integrates_to_one() {
        let mix = ContaminatedModel::new(
            ParametricModel::cauchy(2.0),
            ParametricModel::cauchy(7.0),
            0.1,
        )
        .unwrap();
        let mass = total_mass_1d(|x| mix.density(&[x]).unwrap());
        assert!((mass - 1.0).abs() < 1e-6);
        assert!(ContaminatedModel::new(ParametricModel::cauchy(0.0), ParametricModel::cauchy(1.0), 1.0).is_err());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ParametricModel::student_t(3.0, 0.0, 0.0).is_err());
        assert!(ParametricModel::student_t(-1.0, 0.0, 1.0).is_err());
        assert!(ParametricModel::bivariate_t3([0.0, 0.0], -2.0).is_err());
        assert!(ParametricModel::new(Family::CauchyLocation, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn translation_equivariance() {
        let c = 3.7;
        for (m, mc) in [
            (ParametricModel::cauchy(0.2), ParametricModel::cauchy(0.2 + c)),
            (
                ParametricModel::student_t(3.0, 0.2, 1.5).unwrap(),
                ParametricModel::student_t(3.0, 0.2 + c, 1.5).unwrap(),
            ),
        ] {
            for x in [-4.0, -0.3, 0.0, 2.5, 11.0] {
                let a = m.density(&[x]).unwrap();
                let b = mc.density(&[x + c]).unwrap();
                assert!((a - b).abs() < 1e-15 * a.max(1.0));
            }
        }
    }

    #[test]
    fn cauchy_score_values() {
        let m = ParametricModel::cauchy(1.0);
        assert_eq!(m.log_density_grad(&[1.0]).unwrap(), vec![0.0]);
        assert!((m.log_density_grad(&[2.0]).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn score_matches_finite_differences() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..50 {
            let models = [
                ParametricModel::cauchy(rng.gen_range(-3.0..3.0)),
                ParametricModel::student_t(3.0, rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0)).unwrap(),
                ParametricModel::bivariate_cauchy([rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]),
                ParametricModel::bivariate_t3([rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)], rng.gen_range(0.3..3.0)).unwrap(),
            ];
            for m in models {
                let x: Vec<f64> = (0..m.dimension()).map(|_| rng.gen_range(-6.0..6.0)).collect();
                let g = m.log_density_grad(&x).unwrap();
                for k in 0..m.theta().len() {
                    let h = 1e-5;
                    let mut up = m.theta().to_vec();
                    let mut dn = m.theta().to_vec();
                    up[k] += h;
                    dn[k] -= h;
                    let lu = m.with_theta(up).unwrap().density(&x).unwrap().ln();
                    let ld = m.with_theta(dn).unwrap().density(&x).unwrap().ln();
                    let fd = (lu - ld) / (2.0 * h);
                    assert!((fd - g[k]).abs() < 1e-6, "{m:?} x={x:?} k={k}: {fd} vs {}", g[k]);
                }
            }
        }
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
    }

    #[test]
    fn cauchy_sample_median() {
        let d = ParametricModel::cauchy(2.0).sample(100_000, 7);
        let med = median(d.column(0));
        assert!((med - 2.0).abs() < 0.02, "{med}");
    }

    #[test]
    fn t3_sample_variance() {
        let d = ParametricModel::student_t(3.0, 0.0, 1.0).unwrap().sample(100_000, 5);
        let x = d.column(0);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - 3.0).abs() < 0.2, "{var}");
    }

    #[test]
    fn bivariate_sampler_radial_law() {
        // P(|X - mu| <= 1) for the bivariate Cauchy is 1 - 1/sqrt(2)
        let d = ParametricModel::bivariate_cauchy([1.0, -1.0]).sample(100_000, 3);
        let inside = d
            .rows()
            .filter(|r| ((r[0] - 1.0).powi(2) + (r[1] + 1.0).powi(2)).sqrt() <= 1.0)
            .count() as f64
            / 1e5;
        assert!((inside - (1.0 - 0.5f64.sqrt())).abs() < 0.005, "{inside}");
        // bivariate t3 with scale s: P(|X - mu| <= s) = 1 - (1 + 1/3)^(-3/2)
        let d = ParametricModel::bivariate_t3([0.0, 0.0], 2.0).unwrap().sample(100_000, 4);
        let inside = d.rows().filter(|r| (r[0] * r[0] + r[1] * r[1]).sqrt() <= 2.0).count() as f64 / 1e5;
        assert!((inside - (1.0 - (4.0f64 / 3.0).powf(-1.5))).abs() < 0.005, "{inside}");
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let m = ParametricModel::bivariate_t3([0.0, 0.0], 1.0).unwrap();
        assert_eq!(m.sample(100, 99), m.sample(100, 99));
        assert_ne!(m.sample(100, 99), m.sample(100, 100));
    }

    #[test]
    fn zero_epsilon_mixture_equals_base() {
        let base = ParametricModel::cauchy(2.0);
        let mix = ContaminatedModel::new(base.clone(), ParametricModel::cauchy(7.0), 0.0).unwrap();
        assert_eq!(mix.sample(500, 42), base.sample(500, 42));
    }

    #[test]
    fn mixture_contamination_fraction() {
        let mix = ContaminatedModel::new(
            ParametricModel::student_t(3.0, 0.0, 1.0).unwrap(),
            ParametricModel::student_t(3.0, 1000.0, 1.0).unwrap(),
            0.1,
        )
        .unwrap();
        let d = mix.sample(50_000, 1);
        let frac = d.column(0).iter().filter(|&&x| x > 500.0).count() as f64 / 5e4;
        assert!((frac - 0.1).abs() < 0.006, "{frac}");
    }
}
