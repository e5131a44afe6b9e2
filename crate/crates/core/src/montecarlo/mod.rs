//! Brute-force simulator of the clustered network, independent of the
//! analytical modules. It shares only the parameter types.
//!
//! Cluster centers are a Poisson point process on a square window centered
//! on the typical device. The typical device's own cluster center is a
//! Gaussian offset from the origin. Cluster membership is decided by the
//! center; members that fall outside the window are kept.

mod coverage;
mod distances;
mod network;
mod rng;
mod sampler;
mod suite;

pub use coverage::{simulate_coverage, trial_outcome, CoverageEstimate, TrialOutcome};
pub use distances::{
    ks_against, simulate_distance_distribution, ConditioningBin, DistanceKind, DistanceSample,
    DistanceSamples, EmpiricalCdf,
};
pub use network::{sample_network, NetworkRealization};
pub use rng::TrialRng;
pub use sampler::{ClusterDraw, Point, Representative, TruncatedPoisson};
pub use suite::{distance_suite, KsReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ContentStrategy, NetworkParams};

/// Which members of each cluster are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// All `N` members of every cluster, split into transmitters and
    /// receivers.
    Full,
    /// Only the devices that can affect the SIR: the `M` transmitters of the
    /// typical device's cluster and the active transmitters of every other
    /// cluster. Members are i.i.d., so the SIR has the same law as under
    /// [`SamplingMode::Full`].
    #[default]
    ActiveOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Half-width of the square window, in meters.
    pub region_half_side: f64,
    pub trials: u64,
    pub seed: u64,
    pub strategy: ContentStrategy,
    pub confidence_level: f64,
    pub sampling: SamplingMode,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            region_half_side: 1000.0,
            trials: 100_000,
            seed: 0,
            strategy: ContentStrategy::Uniform,
            confidence_level: 0.95,
            sampling: SamplingMode::ActiveOnly,
        }
    }
}

impl SimulationConfig {
    /// Smallest window half-width that keeps edge effects negligible:
    /// `20σ + 3/√λ_c`.
    pub fn min_half_side(params: &NetworkParams<f64>) -> f64 {
        let spacing = if params.lambda_c > 0.0 {
            3.0 / params.lambda_c.sqrt()
        } else {
            0.0
        };
        20.0 * params.sigma + spacing
    }

    pub fn validate(&self, params: &NetworkParams<f64>) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::domain(format!(
                "confidence level must lie in (0, 1), got {}",
                self.confidence_level
            )));
        }
        let min = Self::min_half_side(params);
        if !(self.region_half_side >= min) || !self.region_half_side.is_finite() {
            return Err(Error::domain(format!(
                "window half-side {} m is below the edge-effect guard {min:.1} m",
                self.region_half_side
            )));
        }
        self.strategy.validate(params.max_transmitters)?;
        if self.sampling == SamplingMode::Full
            && params.max_transmitters >= params.devices_per_cluster
        {
            return Err(Error::domain(
                "full sampling needs M < N so the typical device can be a receiver",
            ));
        }
        Ok(())
    }

    pub fn with_strategy(mut self, strategy: ContentStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_half_side(mut self, half_side: f64) -> Self {
        self.region_half_side = half_side;
        self
    }

    pub fn with_sampling(mut self, sampling: SamplingMode) -> Self {
        self.sampling = sampling;
        self
    }
}

/// `|p|^{−α}` for a point relative to the origin.
#[inline]
pub(crate) fn path_gain(p: Point, alpha: f64) -> f64 {
    let d2 = p[0] * p[0] + p[1] * p[1];
    let e = -0.5 * alpha;
    if e.fract() == 0.0 && e >= -64.0 {
        d2.powi(e as i32)
    } else {
        d2.powf(e)
    }
}
