//! Coverage probability and area spectral efficiency of clustered
//! device-to-device networks.
//!
//! Devices form a Thomas-type cluster process: cluster centers are a
//! Poisson point process and each cluster holds `N` Gaussian-scattered
//! devices, `M` of which may transmit. The typical device receives from a
//! member of its own cluster chosen uniformly at random or as the `k`-th
//! closest, and is interfered with by the other active transmitters of its
//! cluster and of every other cluster.
//!
//! The analytical side ([`geometry`], [`interference`], [`metrics`]) is
//! generic over [`Real`]; [`montecarlo`] is an independent simulator of the
//! same model used to validate it.

// Negated comparisons are how NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod interference;
pub mod mathkernel;
pub mod metrics;
pub mod montecarlo;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases.
pub type Params = geometry::NetworkParams<f64>;
pub type Coverage = metrics::CoverageResult<f64>;
pub type Ase = metrics::AseResult<f64>;
pub type Options = metrics::CoverageOptions<f64>;
pub type Optimum = metrics::MbarOptimum<f64>;
