//! Command-line front end. The `weakmom` binary forwards to [`run`].

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimators::{estimate, CfGrid, EstimateResult, EstimatorConfig, Method, Start, WeightingScheme, DEFAULT_RIDGE, HUBER_K, TUKEY_C};
use crate::kernel::GaussianKernel;
use crate::models::{Family, ParametricModel};
use crate::reconstruction::{empirical_g, forward_multiply, tikhonov_invert, GridFunction};
use crate::robustness::{
    median_asymptotic_variance, median_gross_error_sensitivity, sandwich_pieces, InfluenceMap, InfluenceProfile, GES_RESOLUTION,
};
use crate::simharness::{builtin_scenario, builtin_scenario_files, parse_family, run_scenario, ReportFormat, ScenarioFile, SCHEMA_VERSION};
use crate::weak::{MomentSet, TestPolynomial};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "weakmom", version, about = "Kernel-weighted moment inference for heavy-tailed models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to a data file.
    Estimate(EstimateArgs),
    /// Influence function, gross error sensitivity and sandwich variance at a model.
    Diagnose(DiagnoseArgs),
    /// Tikhonov reconstruction of f from g = phi f.
    Reconstruct(ReconstructArgs),
    /// Run a Monte Carlo scenario (built-in name or TOML file).
    Simulate(SimulateArgs),
    /// List the built-in scenarios, or print one as TOML.
    Scenarios(ScenariosArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// cauchy, t, bivariate-cauchy or bivariate-t3
    #[arg(long, default_value = "cauchy")]
    pub family: String,
    /// Degrees of freedom for the univariate t family.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Kernel bandwidth.
    #[arg(long, default_value_t = crate::kernel::DEFAULT_BANDWIDTH)]
    pub sigma: f64,
    /// Moment set, e.g. `1`, `1,2` or `(1,0);(0,1);radial2`.
    #[arg(long = "j", visible_alias = "moments")]
    pub moments: Option<String>,
    /// identity or twostep
    #[arg(long, default_value = "identity")]
    pub weighting: String,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    pub ridge: f64,
}

impl ModelArgs {
    fn family(&self) -> Result<Family> {
        parse_family(&self.family, self.nu)
    }

    fn kernel(&self, family: Family) -> Result<GaussianKernel> {
        GaussianKernel::new(self.sigma, family.dimension())
    }

    fn moment_set(&self, family: Family) -> Result<MomentSet> {
        match &self.moments {
            Some(s) => MomentSet::parse_list(s),
            None if family.n_params() == 1 => MomentSet::powers(&[1]),
            None => match family {
                Family::StudentTLocationScale { .. } => MomentSet::powers(&[1, 2]),
                Family::BivariateT3LocationScale => MomentSet::parse_list("(1,0);(0,1);radial2"),
                _ => Ok(MomentSet::first_moments(family.dimension())),
            },
        }
    }

    fn weighting(&self) -> Result<WeightingScheme> {
        let w = match self.weighting.to_ascii_lowercase().as_str() {
            "identity" | "i" => WeightingScheme::Identity,
            "twostep" | "two-step" | "2s" | "optimal" => WeightingScheme::TwoStepOptimal { ridge: self.ridge },
            other => return Err(Error::InvalidInput(format!("--weighting: expected identity or twostep, got `{other}`"))),
        };
        w.validate()?;
        Ok(w)
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidInput(format!("--theta: not a number `{t}`"))))
        .collect()
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Data file: one observation per row, comma or whitespace separated.
    pub data: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// wm, gmm-i, gmm-2s, cf, median, coord-median, spatial-median, mle,
    /// huber, tukey, mean-sd, med-mad
    #[arg(long, default_value = "wm")]
    pub method: String,
    /// Explicit starting value (comma separated); the median start otherwise.
    #[arg(long)]
    pub theta: Option<String>,
    /// Huber tuning constant.
    #[arg(long, default_value_t = HUBER_K)]
    pub k: f64,
    /// Tukey tuning constant.
    #[arg(long, default_value_t = TUKEY_C)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// text or json
    #[arg(long, default_value = "text")]
    pub format: String,
    /// Also write the JSON result here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Model parameter (comma separated).
    #[arg(long, default_value = "0")]
    pub theta: String,
    /// `wm` for the weak-moment estimator or `median` for the sample median.
    #[arg(long, default_value = "wm")]
    pub method: String,
    /// Number of rows in the influence-profile CSV.
    #[arg(long, default_value_t = 401)]
    pub grid: usize,
    /// Half-width of the profile grid, in kernel bandwidths.
    #[arg(long, default_value_t = 8.0)]
    pub extent: f64,
    /// Influence profile CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Input g as a two-column CSV (x, value).
    #[arg(long, conflicts_with_all = ["data", "synthetic"])]
    pub input: Option<PathBuf>,
    /// Raw univariate data; g is estimated by a smoothed kernel-weighted histogram.
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Built-in test density: `normal` or `cauchy`.
    #[arg(long)]
    pub synthetic: Option<String>,
    #[arg(long, default_value_t = crate::kernel::DEFAULT_BANDWIDTH)]
    pub sigma: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Width of the smoothing bump for `--data`, in kernel bandwidths.
    #[arg(long, default_value_t = 0.05)]
    pub bump: f64,
    #[arg(long, default_value_t = crate::reconstruction::DEFAULT_GRID_POINTS)]
    pub points: usize,
    /// Reconstruction CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in scenario name or path to a TOML scenario file.
    pub scenario: String,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the sample sizes (comma separated).
    #[arg(long)]
    pub sizes: Option<String>,
    /// csv, markdown or json
    #[arg(long, default_value = "csv")]
    pub format: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenariosArgs {
    /// Print this scenario as a TOML file.
    #[arg(long)]
    pub show: Option<String>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CommandError {
    pub code: i32,
    pub message: String,
}

impl CommandError {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_USAGE, message: e.to_string() }
    }

    fn input(e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_INPUT, message: e.to_string() }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse { .. } => EXIT_INPUT,
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
            Error::Convergence { .. } | Error::Numerical(_) | Error::Identifiability(_) | Error::Domain(_) => EXIT_NONCONVERGENCE,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, CommandError>;

/// Parse `args` (including the program name), run the command and return
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(&a, out),
        Command::Diagnose(a) => cmd_diagnose(&a, out),
        Command::Reconstruct(a) => cmd_reconstruct(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Scenarios(a) => cmd_scenarios(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn io(e: std::io::Error) -> CommandError {
    CommandError::input(e)
}

fn build_method(a: &EstimateArgs, family: Family, kernel: &GaussianKernel) -> Result<Method> {
    let m = &a.model;
    Ok(match a.method.to_ascii_lowercase().as_str() {
        "wm" => Method::WeakMoment { moments: m.moment_set(family)?, weighting: m.weighting()? },
        "gmm-i" => Method::WeakMoment { moments: m.moment_set(family)?, weighting: WeightingScheme::Identity },
        "gmm-2s" => Method::WeakMoment { moments: m.moment_set(family)?, weighting: WeightingScheme::TwoStepOptimal { ridge: m.ridge } },
        "cf" => Method::WeakCf(CfGrid::default_for(kernel)),
        "median" => Method::Median,
        "coord-median" => Method::CoordMedian,
        "spatial-median" => Method::SpatialMedian,
        "mle" => Method::Mle,
        "huber" => Method::Huber { k: a.k },
        "tukey" => Method::Tukey { c: a.c },
        "mean-sd" => Method::MeanSd,
        "med-mad" => Method::MedMad,
        other => return Err(Error::InvalidInput(format!("--method: unknown method `{other}`"))),
    })
}

pub fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write) -> CmdResult {
    let family = a.model.family()?;
    let kernel = a.model.kernel(family)?;
    let method = build_method(a, family, &kernel)?;
    let json_out = match a.format.as_str() {
        "text" => false,
        "json" => true,
        other => return Err(CommandError::usage(format!("--format: expected text or json, got `{other}`"))),
    };
    let data = Dataset::read(&a.data).map_err(|e| CommandError::input(e))?;
    let mut cfg = EstimatorConfig::new(family, method).with_kernel(kernel);
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.covariance = !cfg.method.is_benchmark();
    if let Some(t) = &a.theta {
        cfg.start = Start::Explicit(parse_vector(t)?);
    }
    let res = estimate(&data, &cfg)?;
    let n = data.len() as f64;
    let se: Option<Vec<f64>> = res.asymptotic_cov.as_ref().map(|v| (0..v.len()).map(|i| (v[i][i] / n).sqrt()).collect());
    let doc = estimate_json(&res, family, &cfg, data.len(), se.as_deref());
    if json_out {
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialisable")).map_err(io)?;
    } else {
        writeln!(out, "method     {}", cfg.method.label()).map_err(io)?;
        writeln!(out, "n          {}", data.len()).map_err(io)?;
        for (k, name) in family.param_names().iter().enumerate() {
            match &se {
                Some(se) => writeln!(out, "{name:<10} {}  (se {:.4})", res.theta[k], se[k]),
                None => writeln!(out, "{name:<10} {}", res.theta[k]),
            }
            .map_err(io)?;
        }
        writeln!(out, "converged  {}", res.converged).map_err(io)?;
        writeln!(out, "iterations {}", res.iterations).map_err(io)?;
        writeln!(out, "objective  {:e}", res.objective).map_err(io)?;
    }
    if let Some(path) = &a.out {
        std::fs::write(path, serde_json::to_string_pretty(&doc).expect("serialisable") + "\n").map_err(io)?;
    }
    Ok(if res.converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

fn estimate_json(res: &EstimateResult, family: Family, cfg: &EstimatorConfig, n: usize, se: Option<&[f64]>) -> serde_json::Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "method": cfg.method.label(),
        "family": crate::simharness::family_name(family),
        "parameters": family.param_names(),
        "sigma": cfg.kernel.bandwidth(),
        "n": n,
        "result": res,
        "standard_errors": se,
    })
}

pub fn cmd_diagnose(a: &DiagnoseArgs, out: &mut dyn Write) -> CmdResult {
    let family = a.model.family()?;
    let model = ParametricModel::new(family, parse_vector(&a.theta)?)?;
    let kernel = a.model.kernel(family)?;
    if a.grid < 2 {
        return Err(CommandError::usage("--grid must be at least 2"));
    }
    if !(a.extent > 0.0) {
        return Err(CommandError::usage("--extent must be positive"));
    }
    match a.method.as_str() {
        "median" => {
            let ges = median_gross_error_sensitivity(&model)?;
            let var = median_asymptotic_variance(&model)?;
            writeln!(out, "median GES {ges:.6}").map_err(io)?;
            writeln!(out, "median V   {var:.6}").map_err(io)?;
            if let Some(path) = &a.out {
                let f0 = model.density(model.location())?;
                let mu = model.location()[0];
                let grid = InfluenceProfile::symmetric_grid(kernel.bandwidth(), a.extent, a.grid);
                let values: Vec<f64> = grid.iter().map(|x| (x - mu).signum() / (2.0 * f0)).collect();
                let prof = InfluenceProfile { grid: grid.clone(), if_values: vec![values], ges };
                prof.save_csv(&["mu"], path)?;
            }
            return Ok(EXIT_OK);
        }
        "wm" => {}
        other => return Err(CommandError::usage(format!("--method: expected wm or median, got `{other}`"))),
    }
    let set = a.model.moment_set(family)?;
    let weighting = a.model.weighting()?;
    let spec = Default::default();
    let pieces = sandwich_pieces(&model, &kernel, &set, weighting, &spec)?;
    let map = InfluenceMap::new(&model, &kernel, &set, weighting, &spec)?;
    let polys: Vec<TestPolynomial> = set.indices().iter().map(|i| i.polynomial(family.dimension())).collect();
    let m = crate::weak::theoretical_weak_expectations(&model, &kernel, &polys, &spec)?;
    let ges = map.gross_error_sensitivity(GES_RESOLUTION);
    for (idx, v) in set.indices().iter().zip(&m) {
        writeln!(out, "m[{idx}]  {v:.10}").map_err(io)?;
    }
    writeln!(out, "dm/dtheta  {:?}", crate::estimators::matrix_rows(&pieces.g)).map_err(io)?;
    writeln!(out, "S          {:?}", crate::estimators::matrix_rows(&pieces.s)).map_err(io)?;
    writeln!(out, "V          {:?}", crate::estimators::matrix_rows(&pieces.v)).map_err(io)?;
    writeln!(out, "GES        {ges:.6}").map_err(io)?;
    writeln!(out, "plateau    {:?}", map.plateau()).map_err(io)?;
    if family.dimension() == 1 {
        let mv = median_asymptotic_variance(&model.with_theta(vec![model.location()[0], model.scale()][..family.n_params()].to_vec())?)?;
        writeln!(out, "median V   {mv:.6}").map_err(io)?;
        writeln!(out, "efficiency {:.4}  (median V / V)", mv / pieces.v[(0, 0)]).map_err(io)?;
    }
    if let Some(path) = &a.out {
        if family.dimension() != 1 {
            return Err(CommandError::usage("influence profiles are written for univariate families only"));
        }
        let grid = InfluenceProfile::symmetric_grid(kernel.bandwidth(), a.extent, a.grid);
        InfluenceProfile::compute(&map, &grid)?.save_csv(family.param_names(), path)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_reconstruct(a: &ReconstructArgs, out: &mut dyn Write) -> CmdResult {
    if !(a.lambda > 0.0) {
        return Err(CommandError::usage(format!("--lambda must be positive, got {}", a.lambda)));
    }
    if a.points < 2 {
        return Err(CommandError::usage("--points must be at least 2"));
    }
    let kernel = GaussianKernel::univariate(a.sigma)?;
    let half = crate::quadrature::QuadratureSpec::default().truncation_radius * a.sigma;
    let grid = GridFunction::uniform_grid(-half, half, a.points);
    let (g, truth) = match (&a.input, &a.data, &a.synthetic) {
        (Some(path), _, _) => (GridFunction::load_csv(path).map_err(CommandError::input)?, None),
        (None, Some(path), _) => {
            let data = Dataset::read(path).map_err(CommandError::input)?;
            (empirical_g(&data, &kernel, grid, a.bump * a.sigma)?, None)
        }
        (None, None, Some(name)) => {
            let f = match name.as_str() {
                "normal" => GridFunction::from_fn(grid, |x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())?,
                "cauchy" => GridFunction::from_fn(grid, |x| 1.0 / (std::f64::consts::PI * (1.0 + x * x)))?,
                other => return Err(CommandError::usage(format!("--synthetic: expected normal or cauchy, got `{other}`"))),
            };
            (forward_multiply(&f, &kernel)?, Some(f))
        }
        _ => return Err(CommandError::usage("one of --input, --data or --synthetic is required")),
    };
    let h = tikhonov_invert(&g, &kernel, a.lambda)?;
    let residual = forward_multiply(&h, &kernel)?.sub(&g)?.l2_norm();
    writeln!(out, "lambda     {:e}", a.lambda).map_err(io)?;
    writeln!(out, "residual   {residual:e}  (|phi h - g|)").map_err(io)?;
    writeln!(out, "norm       {:e}  (|h|)", h.l2_norm()).map_err(io)?;
    if let Some(f) = truth {
        writeln!(out, "error      {:e}  (|h - f|)", h.sub(&f)?.l2_norm()).map_err(io)?;
    }
    if let Some(path) = &a.out {
        h.save_csv(path)?;
    }
    Ok(EXIT_OK)
}

fn resolve_scenario(name: &str) -> Result<crate::simharness::Scenario> {
    if let Some(s) = builtin_scenario(name) {
        return Ok(s);
    }
    let path = std::path::Path::new(name);
    if !path.exists() {
        return Err(Error::Io(format!("`{name}` is neither a built-in scenario nor a readable file")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ScenarioFile::parse(&text)?.build()
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let format: ReportFormat = a.format.parse()?;
    let mut scenario = resolve_scenario(&a.scenario).map_err(|e| match e {
        Error::Io(_) => CommandError::input(e),
        other => CommandError::usage(other),
    })?;
    if let Some(r) = a.reps {
        scenario = scenario.with_replications(r);
    }
    if let Some(s) = a.seed {
        scenario = scenario.with_seed(s);
    }
    if let Some(sizes) = &a.sizes {
        let sizes = sizes
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| CommandError::usage(format!("--sizes: bad size `{t}`"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        scenario = scenario.with_sample_sizes(sizes);
    }
    let start = Instant::now();
    let report = run_scenario(&scenario)?;
    let text = report.render(format)?;
    let summary = format!(
        "{}: {} replications, {} failed fits, {:.1}s",
        scenario.name,
        scenario.replications,
        report.total_failures(),
        start.elapsed().as_secs_f64()
    );
    match &a.out {
        Some(path) => {
            std::fs::write(path, text).map_err(io)?;
            writeln!(out, "{summary}").map_err(io)?;
        }
        None => {
            write!(out, "{text}").map_err(io)?;
            writeln!(err, "{summary}").map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_scenarios(a: &ScenariosArgs, out: &mut dyn Write) -> CmdResult {
    let files = builtin_scenario_files();
    match &a.show {
        Some(name) => {
            let f = files.iter().find(|f| &f.name == name).ok_or_else(|| CommandError::usage(format!("no built-in scenario `{name}`")))?;
            write!(out, "{}", f.to_toml()?).map_err(io)?;
        }
        None => {
            for f in &files {
                writeln!(out, "{:<8} {}", f.name, f.description).map_err(io)?;
            }
        }
    }
    Ok(EXIT_OK)
}
