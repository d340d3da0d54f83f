//! Weak-moment, GMM and weak-CF estimators plus the classical benchmarks.

mod benchmarks;
mod optim;
mod weak;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::GaussianKernel;
use crate::models::Family;
use crate::quadrature::QuadratureSpec;
use crate::weak::MomentSet;
use serde::Serialize;

pub use benchmarks::{benchmark_estimate, mad, median};
pub use weak::{estimate_gmm_two_step, estimate_weak_cf, estimate_weak_moment, solve_weak_cf, solve_weak_moments};

pub(crate) use optim::fd_jacobian;

pub const DEFAULT_RIDGE: f64 = 0.10;
pub const HUBER_K: f64 = 1.345;
pub const TUKEY_C: f64 = 4.685;
/// Consistency factor turning the raw MAD into a Gaussian SD estimate.
pub const MAD_CONSISTENCY: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightingScheme {
    Identity,
    /// Two-step GMM with `W = (S_hat + ridge * I)^{-1}`.
    TwoStepOptimal { ridge: f64 },
}

impl WeightingScheme {
    pub fn two_step() -> Self {
        WeightingScheme::TwoStepOptimal { ridge: DEFAULT_RIDGE }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightingScheme::TwoStepOptimal { ridge } if !(*ridge >= 0.0 && ridge.is_finite()) => {
                Err(Error::InvalidInput(format!("ridge must be finite and nonnegative, got {ridge}")))
            }
            _ => Ok(()),
        }
    }
}

/// Frequency grid and weights for the weak-CF estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct CfGrid {
    pub t: Vec<f64>,
    /// `w(t_k) * dt` for each grid point.
    pub weights: Vec<f64>,
}

impl CfGrid {
    /// `n` equispaced points on `[-12/sigma, 12/sigma]` weighted by `exp(-t^2/2) dt`.
    pub fn gaussian(sigma: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("the CF grid needs at least two points".into()));
        }
        let half = 12.0 / sigma;
        let dt = 2.0 * half / (n - 1) as f64;
        let t: Vec<f64> = (0..n).map(|k| -half + k as f64 * dt).collect();
        let weights = t.iter().map(|t| (-0.5 * t * t).exp() * dt).collect();
        Ok(Self { t, weights })
    }

    pub fn default_for(kernel: &GaussianKernel) -> Self {
        Self::gaussian(kernel.bandwidth(), 64).expect("64 points")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    WeakMoment { moments: MomentSet, weighting: WeightingScheme },
    WeakCf(CfGrid),
    Median,
    CoordMedian,
    SpatialMedian,
    Mle,
    Huber { k: f64 },
    Tukey { c: f64 },
    MeanSd,
    MedMad,
}

impl Method {
    pub fn is_benchmark(&self) -> bool {
        !matches!(self, Method::WeakMoment { .. } | Method::WeakCf(_))
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Method::WeakMoment { moments, weighting } => {
                let idx: Vec<String> = moments.indices().iter().map(|i| i.to_string()).collect();
                match weighting {
                    WeightingScheme::Identity if moments.len() == 1 => format!("WM[{}]", idx.join(",")),
                    WeightingScheme::Identity => format!("GMM-I[{}]", idx.join(",")),
                    WeightingScheme::TwoStepOptimal { .. } => format!("GMM-2S[{}]", idx.join(",")),
                }
            }
            Method::WeakCf(_) => "WeakCF".into(),
            Method::Median => "Median".into(),
            Method::CoordMedian => "CoordMedian".into(),
            Method::SpatialMedian => "SpatialMedian".into(),
            Method::Mle => "MLE".into(),
            Method::Huber { .. } => "Huber".into(),
            Method::Tukey { .. } => "Tukey".into(),
            Method::MeanSd => "Mean/SD".into(),
            Method::MedMad => "Med/MAD".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    FromMedian,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub method: Method,
    pub family: Family,
    pub kernel: GaussianKernel,
    pub start: Start,
    pub max_iter: usize,
    pub tol: f64,
    pub quadrature: QuadratureSpec,
    /// Half-width of the trust box around the start, in kernel bandwidths.
    pub trust_bandwidths: f64,
    /// Attach the plug-in sandwich covariance to weak-method results.
    pub covariance: bool,
}

impl EstimatorConfig {
    pub fn new(family: Family, method: Method) -> Self {
        let kernel = GaussianKernel::new(crate::kernel::DEFAULT_BANDWIDTH, family.dimension())
            .expect("default bandwidth is valid");
        Self {
            method,
            family,
            kernel,
            start: Start::FromMedian,
            max_iter: 200,
            tol: 1e-9,
            quadrature: QuadratureSpec::default(),
            trust_bandwidths: 4.0,
            covariance: false,
        }
    }

    pub fn weak_moment(family: Family, moments: MomentSet, weighting: WeightingScheme) -> Self {
        Self::new(family, Method::WeakMoment { moments, weighting })
    }

    pub fn with_kernel(mut self, kernel: GaussianKernel) -> Self {
        if let Method::WeakCf(_) = self.method {
            self.method = Method::WeakCf(CfGrid::default_for(&kernel));
        }
        self.kernel = kernel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        if !(self.trust_bandwidths > 0.0) {
            return Err(Error::InvalidInput("trust region must be positive".into()));
        }
        self.quadrature.validate()?;
        match &self.method {
            Method::Huber { k } if !(*k > 0.0) => Err(Error::InvalidInput(format!("Huber k must be positive, got {k}"))),
            Method::Tukey { c } if !(*c > 0.0) => Err(Error::InvalidInput(format!("Tukey c must be positive, got {c}"))),
            Method::WeakMoment { moments, weighting } => {
                weighting.validate()?;
                moments.check_dimension(self.family.dimension())?;
                if moments.len() < self.family.n_params() {
                    return Err(Error::Identifiability(format!(
                        "{} moments cannot identify {} parameters",
                        moments.len(),
                        self.family.n_params()
                    )));
                }
                Ok(())
            }
            Method::WeakCf(grid) => {
                if self.family.dimension() != 1 {
                    return Err(Error::InvalidInput("the weak-CF estimator is univariate only".into()));
                }
                if grid.t.len() != grid.weights.len() || grid.t.is_empty() {
                    return Err(Error::InvalidInput("CF grid and weights must be nonempty and equal length".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub theta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub asymptotic_cov: Option<Vec<Vec<f64>>>,
    pub start_used: Vec<f64>,
}

/// Dispatch on the configured method.
pub fn estimate(data: &Dataset, config: &EstimatorConfig) -> Result<EstimateResult> {
    match &config.method {
        Method::WeakMoment { weighting: WeightingScheme::TwoStepOptimal { .. }, .. } => {
            estimate_gmm_two_step(data, config)
        }
        Method::WeakMoment { .. } => estimate_weak_moment(data, config),
        Method::WeakCf(_) => estimate_weak_cf(data, config),
        _ => benchmark_estimate(data, config),
    }
}

pub(crate) fn check_data(data: &Dataset, family: Family) -> Result<()> {
    if data.dim() != family.dimension() {
        return Err(Error::DimensionMismatch { expected: family.dimension(), got: data.dim() });
    }
    if data.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least two observations, got {}", data.len())));
    }
    if data.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("data contain non-finite values".into()));
    }
    Ok(())
}

/// Coordinatewise median, with a MAD-based scale when the family has one.
pub(crate) fn median_start(data: &Dataset, family: Family) -> Result<Vec<f64>> {
    let mut theta: Vec<f64> = (0..data.dim()).map(|k| median(&data.column(k))).collect();
    if family.scale_index().is_some() {
        theta.push(pooled_mad_scale(data, &theta)?);
    }
    Ok(theta)
}

pub(crate) fn pooled_mad_scale(data: &Dataset, centre: &[f64]) -> Result<f64> {
    let d = data.dim();
    let s = (0..d).map(|k| MAD_CONSISTENCY * mad(&data.column(k), centre[k])).sum::<f64>() / d as f64;
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::Numerical("median absolute deviation is zero".into()))
    }
}

pub(crate) fn resolve_start(data: &Dataset, config: &EstimatorConfig) -> Result<Vec<f64>> {
    match &config.start {
        Start::FromMedian => median_start(data, config.family),
        Start::Explicit(theta) => {
            crate::models::ParametricModel::new(config.family, theta.clone())?;
            Ok(theta.clone())
        }
    }
}

/// Rows of a matrix as nested vectors.
pub fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
