use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical and system parameters of the clustered network.
///
/// Lengths are in meters and `lambda_c` is in clusters per m². Transmit
/// power does not appear: without noise it cancels from the SIR, so it is
/// normalized to one everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams<T> {
    /// Density of cluster centers (per m²).
    pub lambda_c: T,
    /// Standard deviation of the Gaussian scattering around a center (m).
    pub sigma: T,
    /// Devices per cluster, `N`.
    pub devices_per_cluster: usize,
    /// Possible transmitters per cluster, `M` (`N/2` unless stated).
    pub max_transmitters: usize,
    /// Mean number of simultaneously active transmitters per cluster.
    pub m_bar: T,
    /// Path-loss exponent.
    pub alpha: T,
    /// SIR threshold (linear).
    pub beta: T,
}

/// Clusters per km² to clusters per m².
pub fn per_km2_to_per_m2<T: Real>(density: T) -> T {
    density * T::lit(1e-6)
}

pub fn per_m2_to_per_km2<T: Real>(density: T) -> T {
    density * T::lit(1e6)
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

impl<T: Real> NetworkParams<T> {
    /// Default experimental configuration: σ = 10 m, λ_c = 150 clusters/km²,
    /// β = 0 dB, α = 4, N = 80, M = 40, m̄ = 5.
    pub fn preset() -> Self {
        Self {
            lambda_c: per_km2_to_per_m2(T::lit(150.0)),
            sigma: T::lit(10.0),
            devices_per_cluster: 80,
            max_transmitters: 40,
            m_bar: T::lit(5.0),
            alpha: T::lit(4.0),
            beta: T::one(),
        }
    }

    pub fn sigma_sq(&self) -> T {
        self.sigma * self.sigma
    }

    pub fn with_m_bar(mut self, m_bar: T) -> Self {
        self.m_bar = m_bar;
        self
    }

    pub fn with_sigma(mut self, sigma: T) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_lambda_c(mut self, lambda_c: T) -> Self {
        self.lambda_c = lambda_c;
        self
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    /// Sets `M` and `N = 2M`.
    pub fn with_transmitters(mut self, m: usize) -> Self {
        self.max_transmitters = m;
        self.devices_per_cluster = 2 * m;
        self
    }

    /// `lambda_c = 0` is accepted and means no interfering clusters.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: T| v.is_finite();
        if !(self.lambda_c >= T::zero()) || !finite(self.lambda_c) {
            return Err(Error::domain("lambda_c must be finite and nonnegative"));
        }
        if !(self.sigma > T::zero()) || !finite(self.sigma) {
            return Err(Error::domain("sigma must be positive"));
        }
        let n = self.devices_per_cluster;
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "N = {n} must be even and at least 2"
            )));
        }
        let m = self.max_transmitters;
        if m < 1 || m > n {
            return Err(Error::domain(format!("M = {m} must lie in [1, N = {n}]")));
        }
        if !(self.m_bar > T::zero()) || !finite(self.m_bar) {
            return Err(Error::domain("m_bar must be positive"));
        }
        if !(self.alpha > T::lit(2.0)) || !finite(self.alpha) {
            return Err(Error::domain("alpha must exceed 2"));
        }
        if !(self.beta > T::zero()) || !finite(self.beta) {
            return Err(Error::domain("beta must be positive"));
        }
        Ok(())
    }

    /// Converts every field to another scalar type.
    pub fn cast<U: Real>(&self) -> NetworkParams<U> {
        NetworkParams {
            lambda_c: U::lit(self.lambda_c.as_f64()),
            sigma: U::lit(self.sigma.as_f64()),
            devices_per_cluster: self.devices_per_cluster,
            max_transmitters: self.max_transmitters,
            m_bar: U::lit(self.m_bar.as_f64()),
            alpha: U::lit(self.alpha.as_f64()),
            beta: U::lit(self.beta.as_f64()),
        }
    }
}

/// How the typical device's serving transmitter is chosen within its cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContentStrategy {
    /// Uniformly at random among the cluster's `M` possible transmitters.
    Uniform,
    /// The `k`-th closest of the `M` possible transmitters.
    KClosest { k: usize },
}

impl ContentStrategy {
    pub fn validate(&self, max_transmitters: usize) -> Result<()> {
        match *self {
            ContentStrategy::Uniform => Ok(()),
            ContentStrategy::KClosest { k } if k >= 1 && k <= max_transmitters => Ok(()),
            ContentStrategy::KClosest { k } => Err(Error::domain(format!(
                "k = {k} outside [1, M = {max_transmitters}]"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ContentStrategy::Uniform => "uniform".to_string(),
            ContentStrategy::KClosest { k } => format!("k-closest(k={k})"),
        }
    }
}
