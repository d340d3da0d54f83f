//! Tikhonov inversion of the multiplication operator `f -> phi f` on a
//! uniform grid, and the source-condition rate experiment.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{GaussianKernel, Kernel};
use crate::quadrature::QuadratureSpec;
use std::io::{Read, Write};
use std::path::Path;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Real function tabulated on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if grid.len() < 2 {
            return Err(Error::InvalidInput("a grid function needs at least two points".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grid must be strictly increasing".into()));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid function contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    /// Uniform grid of `n` points on `[a, b]`.
    pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        let h = (b - a) / (n - 1) as f64;
        (0..n).map(|k| a + k as f64 * h).collect()
    }

    /// `[-R sigma, R sigma]` with the default truncation radius and 4096 points.
    pub fn default_grid(kernel: &GaussianKernel) -> Vec<f64> {
        let half = QuadratureSpec::default().truncation_radius * kernel.bandwidth();
        Self::uniform_grid(-half, half, DEFAULT_GRID_POINTS)
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Vec<f64>, f: F) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("grid functions live on different grids".into()));
        }
        Ok(())
    }

    /// Trapezoidal `integral of f h`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(trapezoid(&self.grid, &prod))
    }

    /// Trapezoidal L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        trapezoid(&self.grid, &sq).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn add_scaled(&self, other: &Self, c: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// Pointwise map of the values.
    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let values = self.grid.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// Restriction to the grid points inside `[a, b]`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let (grid, values): (Vec<f64>, Vec<f64>) =
            self.grid.iter().zip(&self.values).filter(|(x, _)| **x >= a && **x <= b).map(|(x, v)| (*x, *v)).unzip();
        Self::new(grid, values)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "value"]).map_err(|e| Error::Io(e.to_string()))?;
        for (x, v) in self.grid.iter().zip(&self.values) {
            w.write_record([format!("{x:e}"), format!("{v:e}")]).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two columns `x,value`; a non-numeric first row is taken as a header.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
        let (mut grid, mut values) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            if rec.len() != 2 {
                return Err(Error::Parse { line: i + 1, message: format!("expected 2 columns, found {}", rec.len()) });
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(v)) => {
                    grid.push(x);
                    values.push(v);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parse { line: i + 1, message: format!("non-numeric row {:?}", rec.iter().collect::<Vec<_>>()) }),
            }
        }
        Self::new(grid, values)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

fn check_univariate(kernel: &GaussianKernel) -> Result<()> {
    if kernel.dimension() != 1 {
        return Err(Error::InvalidInput("reconstruction is univariate".into()));
    }
    Ok(())
}

/// `g = phi f` pointwise.
pub fn forward_multiply(f: &GridFunction, kernel: &GaussianKernel) -> Result<GridFunction> {
    check_univariate(kernel)?;
    Ok(f.map(|x, v| kernel.at(x) * v))
}

/// The filter `phi / (phi^2 + lambda)`.
pub fn tikhonov_filter(phi: f64, lambda: f64) -> f64 {
    phi / (phi * phi + lambda)
}

/// `R_lambda g = phi g / (phi^2 + lambda)`, the minimiser of
/// `|phi h - g|^2 + lambda |h|^2`.
pub fn tikhonov_invert(g: &GridFunction, kernel: &GaussianKernel, lambda: f64) -> Result<GridFunction> {
    check_univariate(kernel)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    Ok(g.map(|x, v| tikhonov_filter(kernel.at(x), lambda) * v))
}

/// `|phi h - g|^2 + lambda |h|^2` in the trapezoidal norm.
pub fn tikhonov_objective(h: &GridFunction, g: &GridFunction, kernel: &GaussianKernel, lambda: f64) -> Result<f64> {
    let r = forward_multiply(h, kernel)?.sub(g)?;
    Ok(r.l2_norm().powi(2) + lambda * h.l2_norm().powi(2))
}

/// Smoothed empirical `g_hat(x) = n^{-1} sum_i phi(X_i) K_b(x - X_i)` with
/// a Gaussian bump of width `bump`.
pub fn empirical_g(data: &Dataset, kernel: &GaussianKernel, grid: Vec<f64>, bump: f64) -> Result<GridFunction> {
    check_univariate(kernel)?;
    if data.dim() != 1 || data.is_empty() {
        return Err(Error::InvalidInput("empirical reconstruction needs nonempty univariate data".into()));
    }
    if !(bump > 0.0) {
        return Err(Error::InvalidInput(format!("bump width must be positive, got {bump}")));
    }
    let norm = 1.0 / (bump * (2.0 * std::f64::consts::PI).sqrt() * data.len() as f64);
    let weights: Vec<(f64, f64)> = data.as_slice().iter().map(|&x| (x, kernel.at(x))).collect();
    GridFunction::from_fn(grid, |t| {
        norm * weights.iter().map(|(x, w)| w * (-0.5 * ((t - x) / bump).powi(2)).exp()).sum::<f64>()
    })
}

#[derive(Debug, Clone)]
pub struct RateExperiment {
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log lambda`.
    pub slope: f64,
}

/// Reconstruct `f = phi^nu h` from `g = phi f` over a grid of lambdas and
/// regress the log L2 error on log lambda.
pub fn rate_experiment(kernel: &GaussianKernel, nu: f64, lambdas: &[f64], h: &GridFunction) -> Result<RateExperiment> {
    check_univariate(kernel)?;
    if !(nu > 0.0 && nu < 2.0) {
        return Err(Error::InvalidInput(format!("nu must lie in (0, 2), got {nu}")));
    }
    if lambdas.len() < 3 {
        return Err(Error::InvalidInput("the rate regression needs at least three lambdas".into()));
    }
    let (lo, hi) = lambdas.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
    if !(lo > 0.0) || hi / lo < 1e3 * (1.0 - 1e-12) {
        return Err(Error::InvalidInput("lambdas must be positive and span at least three decades".into()));
    }
    let f = h.map(|x, v| kernel.at(x).powf(nu) * v);
    let g = forward_multiply(&f, kernel)?;
    let mut errors = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        errors.push(tikhonov_invert(&g, kernel, l)?.sub(&f)?.l2_norm());
    }
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Numerical("reconstruction error vanished; slope undefined".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(RateExperiment { lambdas: lambdas.to_vec(), errors, slope: sxy / sxx })
}

/// `n` log-spaced values from `10^a` to `10^b`.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect()
}
