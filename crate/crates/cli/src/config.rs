//! Experiment configuration. Densities are given in clusters/km², distances
//! in meters and the SIR threshold in dB; they are converted on the way in.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use d2d_coverage::geometry::{db_to_linear, per_km2_to_per_m2, ContentStrategy};
use d2d_coverage::metrics::CoverageMethod;
use d2d_coverage::montecarlo::{SamplingMode, SimulationConfig};
use d2d_coverage::Params;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    /// Clusters per km².
    pub lambda_c: f64,
    /// Meters.
    pub sigma: f64,
    pub devices_per_cluster: usize,
    pub max_transmitters: usize,
    pub m_bar: f64,
    pub alpha: f64,
    pub beta_db: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            lambda_c: 150.0,
            sigma: 10.0,
            devices_per_cluster: 80,
            max_transmitters: 40,
            m_bar: 5.0,
            alpha: 4.0,
            beta_db: 0.0,
        }
    }
}

impl ParamsConfig {
    pub fn to_params(&self) -> Params {
        Params {
            lambda_c: per_km2_to_per_m2(self.lambda_c),
            sigma: self.sigma,
            devices_per_cluster: self.devices_per_cluster,
            max_transmitters: self.max_transmitters,
            m_bar: self.m_bar,
            alpha: self.alpha,
            beta: db_to_linear(self.beta_db),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MBar,
    Beta,
    K,
    Sigma,
    LambdaC,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::MBar,
        SweepAxis::Beta,
        SweepAxis::K,
        SweepAxis::Sigma,
        SweepAxis::LambdaC,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::MBar => "m_bar",
            SweepAxis::Beta => "beta",
            SweepAxis::K => "k",
            SweepAxis::Sigma => "sigma",
            SweepAxis::LambdaC => "lambda_c",
        }
    }

    /// Axis label with the unit used in files.
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::MBar => "mean active transmitters per cluster",
            SweepAxis::Beta => "SIR threshold (dB)",
            SweepAxis::K => "content rank k",
            SweepAxis::Sigma => "scattering std σ (m)",
            SweepAxis::LambdaC => "cluster density (clusters/km²)",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "unknown sweep axis '{s}' (expected m_bar, beta, k, sigma or lambda_c)"
                ))
            })
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Method names accepted in configs and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    /// The i.i.d. approximation for uniform content, the first k-closest
    /// approximation otherwise.
    Approx,
    /// The second k-closest approximation.
    Approx2,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Exact,
        Method::Approx,
        Method::Approx2,
        Method::ClosedForm,
        Method::MonteCarlo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approx => "approx",
            Method::Approx2 => "approx-2",
            Method::ClosedForm => "closed-form",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    /// The analytical routine this method names for `strategy`, or `None`
    /// for Monte Carlo.
    pub fn resolve(&self, strategy: ContentStrategy) -> Option<CoverageMethod> {
        let uniform = strategy == ContentStrategy::Uniform;
        Some(match self {
            Method::Exact => CoverageMethod::exact_for(strategy),
            Method::Approx if uniform => CoverageMethod::IidApprox,
            Method::Approx => CoverageMethod::KClosestApprox1,
            Method::Approx2 => CoverageMethod::KClosestApprox2,
            Method::ClosedForm => CoverageMethod::ClosedForm,
            Method::MonteCarlo => return None,
        })
    }

    /// Name written to the CSV `method` column.
    pub fn column_name(&self, strategy: ContentStrategy) -> &'static str {
        self.resolve(strategy).map_or("monte-carlo", |m| m.as_str())
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "unknown method '{s}' (expected exact, approx, approx-2, closed-form or monte-carlo)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::MBar,
            values: (1..=10).map(f64::from).collect(),
        }
    }
}

/// Simulation settings. A missing window size means "the larger of 1 km
/// and the edge-effect guard" at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_half_side: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub confidence_level: f64,
    pub sampling: SamplingMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        let d = SimulationConfig::default();
        Self {
            region_half_side: None,
            trials: d.trials,
            seed: d.seed,
            confidence_level: d.confidence_level,
            sampling: d.sampling,
        }
    }
}

impl SimConfig {
    pub fn to_simulation(&self, params: &Params, strategy: ContentStrategy) -> SimulationConfig {
        let default_half_side = SimulationConfig::default()
            .region_half_side
            .max(SimulationConfig::min_half_side(params).ceil());
        SimulationConfig {
            region_half_side: self.region_half_side.unwrap_or(default_half_side),
            trials: self.trials,
            seed: self.seed,
            strategy,
            confidence_level: self.confidence_level,
            sampling: self.sampling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default = "uniform")]
    pub strategy: ContentStrategy,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn uniform() -> ContentStrategy {
    ContentStrategy::Uniform
}

fn default_methods() -> Vec<Method> {
    vec![Method::Exact]
}

fn default_output() -> PathBuf {
    PathBuf::from("sweep.csv")
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            strategy: ContentStrategy::Uniform,
            sweep: SweepConfig::default(),
            methods: default_methods(),
            sim: None,
            output: default_output(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment spec serializes")
    }

    /// Parameters and strategy at one sweep value.
    pub fn point(&self, value: f64) -> Result<(Params, ContentStrategy)> {
        let mut cfg = self.params;
        let mut strategy = self.strategy;
        match self.sweep.axis {
            SweepAxis::MBar => cfg.m_bar = value,
            SweepAxis::Beta => cfg.beta_db = value,
            SweepAxis::Sigma => cfg.sigma = value,
            SweepAxis::LambdaC => cfg.lambda_c = value,
            SweepAxis::K => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(CliError::usage(format!(
                        "k must be a positive integer, got {value}"
                    )));
                }
                strategy = ContentStrategy::KClosest { k: value as usize };
            }
        }
        Ok((cfg.to_params(), strategy))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(CliError::usage("methods list is empty"));
        }
        let values = &self.sweep.values;
        if values.is_empty() {
            return Err(CliError::usage("sweep values are empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::usage("sweep values must be finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::usage("sweep values must be strictly increasing"));
        }
        if self.methods.contains(&Method::MonteCarlo) && self.sim.is_none() {
            return Err(CliError::usage(
                "monte-carlo needs a [sim] section, --trials or --seed",
            ));
        }
        if self.sweep.axis == SweepAxis::K && self.strategy == ContentStrategy::Uniform {
            return Err(CliError::usage("a k sweep needs a k-closest strategy"));
        }
        for &v in values {
            let (params, strategy) = self.point(v)?;
            params
                .validate()
                .and_then(|_| strategy.validate(params.max_transmitters))
                .map_err(|e| CliError::usage(format!("sweep value {v}: {e}")))?;
            if let Some(sim) = &self.sim {
                sim.to_simulation(&params, strategy)
                    .validate(&params)
                    .map_err(|e| CliError::usage(format!("sweep value {v}: {e}")))?;
            }
        }
        Ok(())
    }
}
