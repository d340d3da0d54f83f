//! Human-readable scenario files and the built-in study designs.

use super::{NamedEstimator, Scenario, Setting};
use crate::error::{Error, Result};
use crate::estimators::{CfGrid, EstimatorConfig, Method, WeightingScheme, DEFAULT_RIDGE, HUBER_K, TUKEY_C};
use crate::kernel::GaussianKernel;
use crate::models::{ContaminatedModel, DataModel, Family, ParametricModel};
use crate::weak::{MomentIndex, MomentSet};
use serde::{Deserialize, Serialize};

/// Default number of Monte Carlo replications.
pub const DEFAULT_REPLICATIONS: usize = 2000;
const DEFAULT_SEED: u64 = 20_240_601;

/// Parse a family name: `cauchy`, `t` (with `nu`), `bivariate-cauchy`, `bivariate-t3`.
pub fn parse_family(name: &str, nu: Option<f64>) -> Result<Family> {
    match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "cauchy" => Ok(Family::CauchyLocation),
        "t" | "student-t" => Ok(Family::StudentTLocationScale { nu: nu.unwrap_or(3.0) }),
        "t3" => Ok(Family::StudentTLocationScale { nu: 3.0 }),
        "bivariate-cauchy" | "cauchy2" => Ok(Family::BivariateCauchyLocation),
        "bivariate-t3" | "t3-2" => Ok(Family::BivariateT3LocationScale),
        other => Err(Error::InvalidInput(format!(
            "unknown family `{other}` (expected cauchy, t, bivariate-cauchy or bivariate-t3)"
        ))),
    }
}

pub fn family_name(family: Family) -> &'static str {
    match family {
        Family::CauchyLocation => "cauchy",
        Family::StudentTLocationScale { .. } => "t",
        Family::BivariateCauchyLocation => "bivariate-cauchy",
        Family::BivariateT3LocationScale => "bivariate-t3",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub label: String,
    /// Contamination fraction; absent or zero means the clean model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Parameter of the contaminating law (same family).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contaminant: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub label: String,
    /// wm, gmm-i, gmm-2s, cf, median, coord-median, spatial-median, mle,
    /// huber, tukey, mean-sd, med-mad
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl EstimatorSpec {
    fn simple(label: &str, method: &str) -> Self {
        Self { label: label.into(), method: method.into(), moments: None, ridge: None, k: None, c: None }
    }

    fn weak(label: &str, method: &str, moments: &[&str]) -> Self {
        let mut s = Self::simple(label, method);
        s.moments = Some(moments.iter().map(|m| m.to_string()).collect());
        if method == "gmm-2s" {
            s.ridge = Some(DEFAULT_RIDGE);
        }
        s
    }

    pub fn build(&self, family: Family, kernel: GaussianKernel) -> Result<EstimatorConfig> {
        let moments = || -> Result<MomentSet> {
            match &self.moments {
                Some(list) => MomentSet::new(
                    list.iter().map(|s| s.parse::<MomentIndex>()).collect::<Result<Vec<_>>>()?,
                ),
                None => Ok(MomentSet::first_moments(family.dimension())),
            }
        };
        let method = match self.method.to_ascii_lowercase().as_str() {
            "wm" | "gmm-i" => Method::WeakMoment { moments: moments()?, weighting: WeightingScheme::Identity },
            "gmm-2s" => Method::WeakMoment {
                moments: moments()?,
                weighting: WeightingScheme::TwoStepOptimal { ridge: self.ridge.unwrap_or(DEFAULT_RIDGE) },
            },
            "cf" => Method::WeakCf(CfGrid::default_for(&kernel)),
            "median" => Method::Median,
            "coord-median" => Method::CoordMedian,
            "spatial-median" => Method::SpatialMedian,
            "mle" => Method::Mle,
            "huber" => Method::Huber { k: self.k.unwrap_or(HUBER_K) },
            "tukey" => Method::Tukey { c: self.c.unwrap_or(TUKEY_C) },
            "mean-sd" => Method::MeanSd,
            "med-mad" => Method::MedMad,
            other => {
                return Err(Error::InvalidInput(format!("estimators.method: unknown method `{other}` (estimator `{}`)", self.label)))
            }
        };
        let cfg = EstimatorConfig::new(family, method).with_kernel(kernel);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// On-disk scenario description (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub theta: Vec<f64>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub settings: Vec<SettingSpec>,
    pub estimators: Vec<EstimatorSpec>,
}

fn default_sigma() -> f64 {
    crate::kernel::DEFAULT_BANDWIDTH
}

fn default_reps() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario file: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn build(&self) -> Result<Scenario> {
        let family = parse_family(&self.family, self.nu)?;
        let truth = ParametricModel::new(family, self.theta.clone())
            .map_err(|e| Error::InvalidInput(format!("theta: {e}")))?;
        let kernel = GaussianKernel::new(self.sigma, family.dimension()).map_err(|e| Error::InvalidInput(format!("sigma: {e}")))?;
        let mut settings = Vec::with_capacity(self.settings.len());
        for s in &self.settings {
            let model = match (s.epsilon, &s.contaminant) {
                (None, None) | (Some(_), None) if s.epsilon.unwrap_or(0.0) == 0.0 => DataModel::Pure(truth.clone()),
                (Some(eps), Some(c)) => {
                    let contaminant = ParametricModel::new(family, c.clone())
                        .map_err(|e| Error::InvalidInput(format!("settings.contaminant ({}): {e}", s.label)))?;
                    DataModel::Contaminated(
                        ContaminatedModel::new(truth.clone(), contaminant, eps)
                            .map_err(|e| Error::InvalidInput(format!("settings.epsilon ({}): {e}", s.label)))?,
                    )
                }
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "settings ({}): epsilon and contaminant must be given together",
                        s.label
                    )))
                }
            };
            settings.push(Setting { label: s.label.clone(), model });
        }
        let estimators = self
            .estimators
            .iter()
            .map(|e| Ok(NamedEstimator { label: e.label.clone(), config: e.build(family, kernel)? }))
            .collect::<Result<Vec<_>>>()?;
        let scenario = Scenario {
            name: self.name.clone(),
            description: self.description.clone(),
            truth,
            settings,
            estimators,
            sample_sizes: self.sample_sizes.clone(),
            replications: self.replications,
            master_seed: self.seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn clean() -> SettingSpec {
    SettingSpec { label: "clean".into(), epsilon: None, contaminant: None }
}

fn contaminated(theta: Vec<f64>) -> SettingSpec {
    SettingSpec { label: "contaminated".into(), epsilon: Some(0.10), contaminant: Some(theta) }
}

fn cauchy_estimators() -> Vec<EstimatorSpec> {
    vec![
        EstimatorSpec::weak("WM", "wm", &["1"]),
        EstimatorSpec::weak("GMM-I", "gmm-i", &["1", "2"]),
        EstimatorSpec::weak("GMM-2S", "gmm-2s", &["1", "2"]),
        EstimatorSpec::simple("Median", "median"),
        EstimatorSpec::simple("MLE", "mle"),
        EstimatorSpec { k: Some(HUBER_K), ..EstimatorSpec::simple("Huber", "huber") },
        EstimatorSpec { c: Some(TUKEY_C), ..EstimatorSpec::simple("Tukey", "tukey") },
    ]
}

/// The five study designs: clean and contaminated Cauchy location,
/// univariate t3 location-scale, bivariate Cauchy location and bivariate
/// t3 location-scale.
pub fn builtin_scenario_files() -> Vec<ScenarioFile> {
    let base = |name: &str, description: &str, family: &str, theta: Vec<f64>, sizes: Vec<usize>| ScenarioFile {
        name: name.into(),
        description: description.into(),
        family: family.into(),
        nu: None,
        theta,
        sigma: 3.0,
        sample_sizes: sizes,
        replications: DEFAULT_REPLICATIONS,
        seed: DEFAULT_SEED,
        settings: Vec::new(),
        estimators: Vec::new(),
    };
    let mut t1 = base("table1", "Cauchy(2, 1), clean", "cauchy", vec![2.0], vec![50, 100, 500, 1000, 5000]);
    t1.settings = vec![clean()];
    t1.estimators = cauchy_estimators();

    let mut t2 = base(
        "table2",
        "Cauchy(2, 1) with 10% Cauchy(7, 1) contamination",
        "cauchy",
        vec![2.0],
        vec![50, 100, 500, 1000, 5000],
    );
    t2.settings = vec![contaminated(vec![7.0])];
    t2.estimators = cauchy_estimators();

    let mut t3 = base("t3", "t3(0, 1), clean and with 10% t3(0, 5) scale contamination", "t", vec![0.0, 1.0], vec![100, 500, 1000]);
    t3.nu = Some(3.0);
    t3.settings = vec![clean(), contaminated(vec![0.0, 5.0])];
    t3.estimators = vec![
        EstimatorSpec::weak("WM-GMM-2S", "gmm-2s", &["1", "2"]),
        EstimatorSpec::simple("MLE", "mle"),
        EstimatorSpec::simple("Mean/SD", "mean-sd"),
        EstimatorSpec::simple("Median/MAD", "med-mad"),
        EstimatorSpec { c: Some(TUKEY_C), ..EstimatorSpec::simple("Tukey", "tukey") },
    ];

    let mut t4 = base(
        "table3",
        "bivariate Cauchy location mu = (1, 1), clean and with 10% shift contamination by (5, 5)",
        "bivariate-cauchy",
        vec![1.0, 1.0],
        vec![50, 100, 500, 1000],
    );
    t4.settings = vec![clean(), contaminated(vec![6.0, 6.0])];
    t4.estimators = vec![
        EstimatorSpec::weak("WM", "wm", &["(1,0)", "(0,1)"]),
        EstimatorSpec::simple("Spatial Med.", "spatial-median"),
        EstimatorSpec::simple("Coord. Med.", "coord-median"),
        EstimatorSpec::simple("MLE", "mle"),
    ];

    let mut t5 = base(
        "table4",
        "bivariate t3 location-scale (0, 0, 1), clean and with 10% scale-5 contamination",
        "bivariate-t3",
        vec![0.0, 0.0, 1.0],
        vec![100, 500, 1000],
    );
    t5.settings = vec![clean(), contaminated(vec![0.0, 0.0, 5.0])];
    t5.estimators = vec![
        EstimatorSpec::weak("WM-GMM-2S", "gmm-2s", &["(1,0)", "(0,1)", "radial2"]),
        EstimatorSpec::simple("MLE", "mle"),
        EstimatorSpec::simple("Mean/SD", "mean-sd"),
        EstimatorSpec::simple("Med/MAD", "med-mad"),
    ];
    vec![t1, t2, t3, t4, t5]
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    builtin_scenario_files().iter().map(|f| f.build().expect("built-in scenarios are valid")).collect()
}

pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    builtin_scenario_files().into_iter().find(|f| f.name == name).map(|f| f.build().expect("built-in scenarios are valid"))
}
