//! Influence functions, gross error sensitivity and sandwich variances of
//! the weak-moment and GMM estimators.
//!
//! The moment Jacobian is `G = d m / d theta` (no minus sign). With this
//! convention the influence function is `(G'WG)^{-1} G'W Psi(x)`, where
//! `Psi(x) = psi(x) phi(x) - m(theta)`, and it agrees with the derivative of
//! the estimating functional along point-mass contamination.

use crate::error::{Error, Result};
use crate::estimators::{fd_jacobian, WeightingScheme};
use crate::kernel::GaussianKernel;
use crate::models::ParametricModel;
use crate::quadrature::QuadratureSpec;
use crate::weak::{theoretical_weak_expectations, MomentSet, TestPolynomial};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// `x -> psi(x) phi(x) - m(theta)` for each index of a moment set.
#[derive(Debug, Clone)]
pub struct ScoreFunction {
    polys: Vec<TestPolynomial>,
    kernel: GaussianKernel,
    theta: Vec<f64>,
    moments: Vec<f64>,
}

impl ScoreFunction {
    pub fn new(model: &ParametricModel, kernel: &GaussianKernel, set: &MomentSet, spec: &QuadratureSpec) -> Result<Self> {
        set.check_dimension(model.dimension())?;
        let polys: Vec<TestPolynomial> = set.indices().iter().map(|a| a.polynomial(model.dimension())).collect();
        let moments = theoretical_weak_expectations(model, kernel, &polys, spec)?;
        Ok(Self { polys, kernel: *kernel, theta: model.theta().to_vec(), moments })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let w = self.kernel.at_norm_sq(x.iter().map(|c| c * c).sum());
        self.polys.iter().zip(&self.moments).map(|(p, m)| p.evaluate(x) * w - m).collect()
    }
}

/// `S_jk = E_{phi^2}[psi_j psi_k] - m_j m_k`, the first term taken with the
/// squared kernel.
pub fn sandwich_s(model: &ParametricModel, kernel: &GaussianKernel, set: &MomentSet, spec: &QuadratureSpec) -> Result<DMatrix<f64>> {
    set.check_dimension(model.dimension())?;
    let d = model.dimension();
    let polys: Vec<TestPolynomial> = set.indices().iter().map(|a| a.polynomial(d)).collect();
    let k = polys.len();
    let mut products = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in i..k {
            products.push(polys[i].mul(&polys[j]));
        }
    }
    let second = theoretical_weak_expectations(model, &kernel.squared(), &products, spec)?;
    let m = theoretical_weak_expectations(model, kernel, &polys, spec)?;
    let mut s = DMatrix::zeros(k, k);
    let mut idx = 0;
    for i in 0..k {
        for j in i..k {
            let v = second[idx] - m[i] * m[j];
            s[(i, j)] = v;
            s[(j, i)] = v;
            idx += 1;
        }
    }
    Ok(s)
}

/// `d m / d theta` by central differences, step `1e-5 max(1, |theta_k|)`.
pub fn moment_jacobian(model: &ParametricModel, kernel: &GaussianKernel, set: &MomentSet, spec: &QuadratureSpec) -> Result<DMatrix<f64>> {
    set.check_dimension(model.dimension())?;
    let d = model.dimension();
    let polys: Vec<TestPolynomial> = set.indices().iter().map(|a| a.polynomial(d)).collect();
    let f = |theta: &[f64]| theoretical_weak_expectations(&model.with_theta(theta.to_vec())?, kernel, &polys, spec);
    fd_jacobian(&f, model.theta(), None)
}

/// Population weighting matrix: `I`, or `(S + ridge I)^{-1}`; ridge zero
/// gives the efficient weighting `S^{-1}`.
pub fn weighting_matrix(scheme: WeightingScheme, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    scheme.validate()?;
    let k = s.nrows();
    match scheme {
        WeightingScheme::Identity => Ok(DMatrix::identity(k, k)),
        WeightingScheme::TwoStepOptimal { ridge } => {
            let w = (s + DMatrix::identity(k, k) * ridge)
                .try_inverse()
                .ok_or_else(|| Error::Numerical("score covariance is singular".into()))?;
            Ok((&w + w.transpose()) * 0.5)
        }
    }
}

fn bread(g: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if g.ncols() > g.nrows() {
        return Err(Error::Identifiability(format!("{} moments for {} parameters", g.nrows(), g.ncols())));
    }
    let sv = g.singular_values();
    if !(sv.max() > 0.0) || sv.min() <= 1e-10 * sv.max() {
        return Err(Error::Identifiability("moment Jacobian is not of full column rank".into()));
    }
    (g.transpose() * w * g)
        .try_inverse()
        .ok_or_else(|| Error::Identifiability("G'WG is singular".into()))
}

/// `V = (G'WG)^{-1} G'WSWG (G'WG)^{-1}`.
pub fn sandwich_variance(g: &DMatrix<f64>, s: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let b = bread(g, w)?;
    let v = &b * g.transpose() * w * s * w * g * &b;
    Ok((&v + v.transpose()) * 0.5)
}

#[derive(Debug, Clone)]
pub struct SandwichPieces {
    /// `d m / d theta`, K x p.
    pub g: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

pub fn sandwich_pieces(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    set: &MomentSet,
    weighting: WeightingScheme,
    spec: &QuadratureSpec,
) -> Result<SandwichPieces> {
    let g = moment_jacobian(model, kernel, set, spec)?;
    let s = sandwich_s(model, kernel, set, spec)?;
    let w = weighting_matrix(weighting, &s)?;
    let v = sandwich_variance(&g, &s, &w)?;
    Ok(SandwichPieces { g, s, w, v })
}

pub fn asymptotic_variance(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    set: &MomentSet,
    weighting: WeightingScheme,
) -> Result<DMatrix<f64>> {
    Ok(sandwich_pieces(model, kernel, set, weighting, &QuadratureSpec::default())?.v)
}

/// Precomputed influence map `x -> (G'WG)^{-1} G'W Psi(x)`.
#[derive(Debug, Clone)]
pub struct InfluenceMap {
    score: ScoreFunction,
    gain: DMatrix<f64>,
    dim: usize,
}

impl InfluenceMap {
    pub fn new(
        model: &ParametricModel,
        kernel: &GaussianKernel,
        set: &MomentSet,
        weighting: WeightingScheme,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let pieces = sandwich_pieces(model, kernel, set, weighting, spec)?;
        let gain = bread(&pieces.g, &pieces.w)? * pieces.g.transpose() * &pieces.w;
        let score = ScoreFunction::new(model, kernel, set, spec)?;
        Ok(Self { score, gain, dim: model.dimension() })
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let psi = DVector::from_vec(self.score.evaluate(x));
        (&self.gain * psi).iter().copied().collect()
    }

    pub fn norm_at(&self, x: &[f64]) -> f64 {
        self.evaluate(x).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Limit of the influence function far from the origin, taken at
    /// `20 sigma` along the first axis.
    pub fn plateau(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        x[0] = 20.0 * self.score.kernel.bandwidth();
        self.evaluate(&x)
    }

    /// Supremum of the IF norm over a graded grid out to `12 sigma` with
    /// spacing `resolution * sigma`, refined by golden-section search
    /// around the best grid point.
    pub fn gross_error_sensitivity(&self, resolution: f64) -> f64 {
        let sigma = self.score.kernel.bandwidth();
        let h = resolution * sigma;
        let steps = (12.0 / resolution).round() as i64;
        match self.dim {
            1 => {
                let f = |x: f64| self.norm_at(&[x]);
                let (best_x, best) = (-steps..=steps)
                    .map(|k| {
                        let x = k as f64 * h;
                        (x, f(x))
                    })
                    .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                best.max(golden_max(f, best_x - h, best_x + h))
            }
            _ => {
                let n_angle = 360;
                let mut best = (0.0, 0.0, f64::NEG_INFINITY);
                for a in 0..n_angle {
                    let ang = 2.0 * std::f64::consts::PI * a as f64 / n_angle as f64;
                    let (s, c) = ang.sin_cos();
                    for k in 0..=steps {
                        let r = k as f64 * h;
                        let v = self.norm_at(&[r * c, r * s]);
                        if v > best.2 {
                            best = (r, ang, v);
                        }
                    }
                }
                let (r0, a0, v0) = best;
                let (s, c) = a0.sin_cos();
                let radial = golden_max(|r| self.norm_at(&[r * c, r * s]), (r0 - h).max(0.0), r0 + h);
                v0.max(radial)
            }
        }
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

pub fn influence_function(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    set: &MomentSet,
    weighting: WeightingScheme,
    x: &[f64],
) -> Result<Vec<f64>> {
    if x.len() != model.dimension() {
        return Err(Error::DimensionMismatch { expected: model.dimension(), got: x.len() });
    }
    Ok(InfluenceMap::new(model, kernel, set, weighting, &QuadratureSpec::default())?.evaluate(x))
}

/// Default grid spacing for the GES search, in kernel bandwidths.
pub const GES_RESOLUTION: f64 = 0.01;

pub fn gross_error_sensitivity(
    model: &ParametricModel,
    kernel: &GaussianKernel,
    set: &MomentSet,
    weighting: WeightingScheme,
) -> Result<f64> {
    Ok(InfluenceMap::new(model, kernel, set, weighting, &QuadratureSpec::default())?.gross_error_sensitivity(GES_RESOLUTION))
}

/// GES of the sample median for a univariate symmetric model: `1 / (2 f(mu))`.
pub fn median_gross_error_sensitivity(model: &ParametricModel) -> Result<f64> {
    let f0 = univariate_centre_density(model)?;
    Ok(1.0 / (2.0 * f0))
}

/// Asymptotic variance of the sample median: `1 / (4 f(mu)^2)`.
pub fn median_asymptotic_variance(model: &ParametricModel) -> Result<f64> {
    let f0 = univariate_centre_density(model)?;
    Ok(1.0 / (4.0 * f0 * f0))
}

fn univariate_centre_density(model: &ParametricModel) -> Result<f64> {
    if model.dimension() != 1 {
        return Err(Error::InvalidInput("median closed forms are univariate".into()));
    }
    model.density(model.location())
}

/// Influence function tabulated on a grid of univariate points.
#[derive(Debug, Clone, Serialize)]
pub struct InfluenceProfile {
    pub grid: Vec<f64>,
    /// One row per parameter.
    pub if_values: Vec<Vec<f64>>,
    /// Largest IF norm on the grid.
    pub ges: f64,
}

impl InfluenceProfile {
    pub fn compute(map: &InfluenceMap, grid: &[f64]) -> Result<Self> {
        if map.dim != 1 {
            return Err(Error::InvalidInput("influence profiles are tabulated for univariate models".into()));
        }
        let p = map.gain.nrows();
        let mut if_values = vec![Vec::with_capacity(grid.len()); p];
        let mut ges: f64 = 0.0;
        for &x in grid {
            let v = map.evaluate(&[x]);
            ges = ges.max(v.iter().map(|c| c * c).sum::<f64>().sqrt());
            for (row, c) in if_values.iter_mut().zip(v) {
                row.push(c);
            }
        }
        Ok(Self { grid: grid.to_vec(), if_values, ges })
    }

    /// Equispaced grid on `[-extent, extent]` in kernel bandwidths.
    pub fn symmetric_grid(sigma: f64, extent: f64, points: usize) -> Vec<f64> {
        let n = points.max(2);
        (0..n).map(|k| sigma * extent * (2.0 * k as f64 / (n - 1) as f64 - 1.0)).collect()
    }

    pub fn write_csv<W: Write>(&self, names: &[&str], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend(names.iter().map(|n| format!("if_{n}")));
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for (i, x) in self.grid.iter().enumerate() {
            let mut rec = vec![format!("{x}")];
            rec.extend(self.if_values.iter().map(|r| format!("{}", r[i])));
            w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, names: &[&str], path: &Path) -> Result<()> {
        self.write_csv(names, std::fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn j1() -> MomentSet {
        MomentSet::powers(&[1]).unwrap()
    }

    #[test]
    fn s_is_positive_and_symmetric() {
        let k = GaussianKernel::default();
        for mu in [-3.0, 0.0, 2.0, 6.0] {
            let s = sandwich_s(&ParametricModel::cauchy(mu), &k, &MomentSet::powers(&[1, 2]).unwrap(), &QuadratureSpec::default()).unwrap();
            assert!(s[(0, 0)] > 0.0 && s[(1, 1)] > 0.0);
            assert_eq!(s[(0, 1)], s[(1, 0)]);
            assert!(s.determinant() > 0.0);
        }
    }

    #[test]
    fn if_vanishes_at_origin_and_plateaus() {
        let model = ParametricModel::cauchy(0.0);
        let k = GaussianKernel::default();
        let map = InfluenceMap::new(&model, &k, &j1(), WeightingScheme::Identity, &QuadratureSpec::default()).unwrap();
        assert!(map.evaluate(&[0.0])[0].abs() < 1e-12);
        // m_1(0) = 0, so the plateau is zero at the symmetric centre
        assert!(map.evaluate(&[150.0])[0].abs() < 1e-12);
        let shifted = InfluenceMap::new(&ParametricModel::cauchy(2.0), &k, &j1(), WeightingScheme::Identity, &QuadratureSpec::default()).unwrap();
        let m = shifted.score.moments()[0];
        let g = moment_jacobian(&ParametricModel::cauchy(2.0), &k, &j1(), &QuadratureSpec::default()).unwrap()[(0, 0)];
        assert!((shifted.evaluate(&[150.0])[0] + m / g).abs() < 1e-10);
        assert!((shifted.plateau()[0] - shifted.evaluate(&[-150.0])[0]).abs() < 1e-6);
    }

    #[test]
    fn median_closed_forms_at_cauchy() {
        let m = ParametricModel::cauchy(0.0);
        assert!((median_gross_error_sensitivity(&m).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((median_asymptotic_variance(&m).unwrap() - PI * PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn efficient_weighting_dominates_identity() {
        let k = GaussianKernel::default();
        let set = MomentSet::powers(&[1, 2, 3]).unwrap();
        for mu in [0.5, 2.0] {
            let model = ParametricModel::cauchy(mu);
            let vi = asymptotic_variance(&model, &k, &set, WeightingScheme::Identity).unwrap();
            let ve = asymptotic_variance(&model, &k, &set, WeightingScheme::TwoStepOptimal { ridge: 0.0 }).unwrap();
            assert!(ve[(0, 0)] <= vi[(0, 0)] * (1.0 + 1e-9));
            let pieces = sandwich_pieces(&model, &k, &set, WeightingScheme::TwoStepOptimal { ridge: 0.0 }, &QuadratureSpec::default()).unwrap();
            let eff = (pieces.g.transpose() * pieces.s.clone().try_inverse().unwrap() * &pieces.g).try_inverse().unwrap();
            assert!((eff[(0, 0)] - ve[(0, 0)]).abs() < 1e-8 * ve[(0, 0)]);
        }
    }

    #[test]
    fn rank_deficient_jacobian_is_reported() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let s = DMatrix::identity(2, 2);
        assert!(matches!(sandwich_variance(&g, &s, &s), Err(Error::Identifiability(_))));
    }

    #[test]
    fn profile_csv_has_header_and_rows() {
        let map = InfluenceMap::new(&ParametricModel::cauchy(0.0), &GaussianKernel::default(), &j1(), WeightingScheme::Identity, &QuadratureSpec::default()).unwrap();
        let prof = InfluenceProfile::compute(&map, &InfluenceProfile::symmetric_grid(3.0, 4.0, 9)).unwrap();
        let mut buf = Vec::new();
        prof.write_csv(&["mu"], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,if_mu\n"));
        assert_eq!(text.lines().count(), 10);
    }
}
