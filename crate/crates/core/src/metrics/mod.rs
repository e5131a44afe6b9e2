//! Coverage probability, area spectral efficiency (ASE) and the ASE-optimal
//! number of simultaneously active transmitters.

mod ase;
mod coverage;

pub use ase::{ase, ase_closed_form, ase_from_coverage, optimize_mbar, MbarOptimum};
pub use coverage::{
    coverage, coverage_closed_form, coverage_kclosest_approx, coverage_kclosest_approx_with,
    coverage_kclosest_exact, coverage_kclosest_exact_with, coverage_uniform_approx,
    coverage_uniform_approx_with, coverage_uniform_exact, coverage_uniform_exact_with,
};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{ContentStrategy, NetworkParams};
use crate::interference::{inner_spec, TransformForm};
use crate::mathkernel::QuadratureSpec;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageMethod {
    /// Uniform content, double integral over `r` and `ν0`.
    Exact,
    /// Uniform content, i.i.d. Rayleigh(2σ²) distances.
    IidApprox,
    ClosedForm,
    KClosestExact,
    #[serde(rename = "kclosest-approx-1")]
    KClosestApprox1,
    #[serde(rename = "kclosest-approx-2")]
    KClosestApprox2,
}

impl CoverageMethod {
    pub const ALL: [CoverageMethod; 6] = [
        CoverageMethod::Exact,
        CoverageMethod::IidApprox,
        CoverageMethod::ClosedForm,
        CoverageMethod::KClosestExact,
        CoverageMethod::KClosestApprox1,
        CoverageMethod::KClosestApprox2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CoverageMethod::Exact => "exact",
            CoverageMethod::IidApprox => "iid-approx",
            CoverageMethod::ClosedForm => "closed-form",
            CoverageMethod::KClosestExact => "kclosest-exact",
            CoverageMethod::KClosestApprox1 => "kclosest-approx-1",
            CoverageMethod::KClosestApprox2 => "kclosest-approx-2",
        }
    }

    /// The exact method for a strategy.
    pub fn exact_for(strategy: ContentStrategy) -> Self {
        match strategy {
            ContentStrategy::Uniform => CoverageMethod::Exact,
            ContentStrategy::KClosest { .. } => CoverageMethod::KClosestExact,
        }
    }

    pub fn applies_to(&self, strategy: ContentStrategy) -> bool {
        use CoverageMethod::*;
        matches!(
            (strategy, self),
            (ContentStrategy::Uniform, Exact | IidApprox | ClosedForm)
                | (
                    ContentStrategy::KClosest { .. },
                    KClosestExact | KClosestApprox1 | KClosestApprox2
                )
        )
    }
}

impl std::fmt::Display for CoverageMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CoverageMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown coverage method '{s}'")))
    }
}

/// A coverage probability with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult<T> {
    pub value: T,
    pub method: CoverageMethod,
    pub params: NetworkParams<T>,
    pub strategy: ContentStrategy,
}

/// Transform forms and tolerances for the coverage integrals.
///
/// `outer` governs the serving-distance integral, `inner` the
/// cluster-center integral, and `kernel` the one-dimensional distance
/// averages inside each Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageOptions<T> {
    pub intra_form: TransformForm,
    pub inter_form: TransformForm,
    pub outer: QuadratureSpec<T>,
    pub inner: QuadratureSpec<T>,
    pub kernel: QuadratureSpec<T>,
}

impl<T: Real> Default for CoverageOptions<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(1024.0);
        Self {
            intra_form: TransformForm::Limit,
            inter_form: TransformForm::Limit,
            outer: QuadratureSpec::with_tolerances(T::lit(1e-7).max(floor), T::lit(1e-12)),
            inner: QuadratureSpec::with_tolerances(T::lit(1e-8).max(floor), T::lit(1e-14)),
            kernel: inner_spec(),
        }
    }
}

impl<T: Real> CoverageOptions<T> {
    /// Exact truncated-count sums for both transforms.
    pub fn exact_sums() -> Self {
        Self {
            intra_form: TransformForm::Exact,
            inter_form: TransformForm::Exact,
            ..Self::default()
        }
    }

    /// Looser tolerances for sweeps where `1e-5` accuracy suffices.
    pub fn fast() -> Self {
        let floor = T::epsilon() * T::lit(1024.0);
        Self {
            outer: QuadratureSpec::with_tolerances(T::lit(1e-5).max(floor), T::lit(1e-9)),
            inner: QuadratureSpec::with_tolerances(T::lit(1e-6).max(floor), T::lit(1e-11)),
            kernel: QuadratureSpec::with_tolerances(
                T::lit(1e-8).max(floor),
                T::min_positive_value(),
            ),
            ..Self::default()
        }
    }
}

/// Area spectral efficiency with the coverage it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AseResult<T> {
    /// bits/s/Hz/m².
    pub value: T,
    pub m_bar_used: T,
    pub coverage: CoverageResult<T>,
}
