//! Laplace transforms of intra- and inter-cluster interference under
//! Rayleigh fading.
//!
//! With unit-mean exponential fading, an interferer at distance `w`
//! contributes the factor `1/(1 + s·w^{−α})` to `E[exp(−sI)]`. Most
//! transforms below are built from the averaged complement of that factor,
//!
//! ```text
//! J(s) = ∫ s/(s + w^α) · f(w) dw,
//! ```
//!
//! for the relevant distance density `f`.

mod counts;
mod evaluator;
mod inter;
mod kclosest;
mod uniform;

pub use counts::{truncated_binomial_pmf, truncated_poisson_pmf};
pub use evaluator::{evaluate_on_grid, LaplaceEvaluator, LaplaceMethod};
pub use inter::{InterCluster, InterLowerBound};
pub use kclosest::{IntraKClosest, KClosestWeights};
pub use uniform::{IntraIidApprox, IntraLowerBound, IntraUniform};

use crate::error::{Error, Result};
use crate::geometry::{ContentStrategy, NetworkParams};
use crate::mathkernel::{integrate_finite, QuadratureSpec};
use crate::scalar::Real;

/// Exact truncated-count sum or its `M ≫ m̄` exponential limit. Callers pick
/// one explicitly; nothing switches between them automatically.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum TransformForm {
    Exact,
    #[default]
    Limit,
}

/// `s/(s + w^α)`, i.e. `1 − 1/(1 + s·w^{−α})`.
#[inline]
pub(crate) fn kernel<T: Real>(s: T, w: T, alpha: T) -> T {
    if w <= T::zero() {
        return T::one();
    }
    s / (s + w.powf(alpha))
}

/// Tolerances for the one-dimensional distance integrals inside a
/// transform: tight relative accuracy, no absolute floor, so tiny
/// interference masses keep their digits.
pub fn inner_spec<T: Real>() -> QuadratureSpec<T> {
    let rel = T::lit(1e-10).max(T::epsilon() * T::lit(64.0));
    QuadratureSpec::with_tolerances(rel, T::min_positive_value())
}

/// `∫_lo^hi kernel(s, w)·f(w) dw`, split at the kernel's knee `w = s^{1/α}`.
pub(crate) fn kernel_integral<T, F>(
    f: F,
    s: T,
    alpha: T,
    lo: T,
    hi: T,
    spec: &QuadratureSpec<T>,
) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if s == T::zero() || !(hi > lo) {
        return Ok(T::zero());
    }
    let knee = s.powf(alpha.recip());
    let g = |w: T| kernel(s, w, alpha) * f(w);
    if knee > lo && knee < hi {
        Ok(integrate_finite(g, lo, knee, spec)? + integrate_finite(g, knee, hi, spec)?)
    } else {
        integrate_finite(g, lo, hi, spec)
    }
}

pub(crate) fn check_s<T: Real>(s: T) -> Result<()> {
    if s >= T::zero() && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Laplace argument must be finite and nonnegative, got {s}"
        )))
    }
}

pub(crate) fn require<T: Real>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| {
        Error::domain(format!(
            "this transform is conditioned on {name}, which was not supplied"
        ))
    })
}

/// Mean number of intra-cluster interferers, `m̄ − 1`.
pub(crate) fn intra_mean<T: Real>(params: &NetworkParams<T>) -> Result<T> {
    let mean = params.m_bar - T::one();
    if !(mean >= T::zero()) {
        return Err(Error::domain(format!(
            "m_bar = {} < 1 gives a negative intra-cluster interferer mean",
            params.m_bar
        )));
    }
    Ok(mean)
}

pub fn intra_uniform_exact<T: Real>(params: &NetworkParams<T>, s: T, nu0: T) -> Result<T> {
    IntraUniform::new(params, TransformForm::Exact)?.at(s, nu0)
}

pub fn intra_uniform_limit<T: Real>(params: &NetworkParams<T>, s: T, nu0: T) -> Result<T> {
    IntraUniform::new(params, TransformForm::Limit)?.at(s, nu0)
}

pub fn intra_iid_approx<T: Real>(params: &NetworkParams<T>, s: T) -> Result<T> {
    IntraIidApprox::new(params)?.at(s)
}

pub fn intra_lower_bound<T: Real>(params: &NetworkParams<T>, s: T) -> Result<T> {
    IntraLowerBound::new(params)?.at(s)
}

pub fn inter_exact<T: Real>(params: &NetworkParams<T>, s: T) -> Result<T> {
    InterCluster::new(params, TransformForm::Exact)?.at(s)
}

pub fn inter_limit<T: Real>(params: &NetworkParams<T>, s: T) -> Result<T> {
    InterCluster::new(params, TransformForm::Limit)?.at(s)
}

pub fn inter_lower_bound<T: Real>(params: &NetworkParams<T>, s: T) -> Result<T> {
    InterLowerBound::new(params)?.at(s)
}

pub fn intra_kclosest_exact<T: Real>(
    params: &NetworkParams<T>,
    k: usize,
    s: T,
    r: T,
    nu0: T,
) -> Result<T> {
    IntraKClosest::new(params, k, TransformForm::Exact)?.at(s, r, nu0)
}

/// Only `k = 1` and `k = M` have a limit form.
pub fn intra_kclosest_limit<T: Real>(
    params: &NetworkParams<T>,
    k: usize,
    s: T,
    r: T,
    nu0: T,
) -> Result<T> {
    IntraKClosest::new(params, k, TransformForm::Limit)?.at(s, r, nu0)
}

/// Intra-cluster evaluator for a content strategy. Uniform content uses the
/// `ν0`-conditioned transform; k-closest content additionally conditions on
/// the serving distance.
pub fn intra_evaluator<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
    form: TransformForm,
) -> Result<Box<dyn LaplaceEvaluator<T>>> {
    Ok(match strategy {
        ContentStrategy::Uniform => Box::new(IntraUniform::new(params, form)?),
        ContentStrategy::KClosest { k } => Box::new(IntraKClosest::new(params, k, form)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limits() {
        assert_eq!(kernel(2.0_f64, 0.0, 4.0), 1.0);
        assert_eq!(kernel(0.0_f64, 3.0, 4.0), 0.0);
        assert!((kernel(16.0_f64, 2.0, 4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kernel_integral_matches_unsplit() {
        let f = |w: f64| crate::geometry::rayleigh_density(w, 200.0);
        let spec = inner_spec();
        let split = kernel_integral(f, 1e4, 4.0, 0.0, 150.0, &spec).unwrap();
        let whole = integrate_finite(|w| kernel(1e4, w, 4.0) * f(w), 0.0, 150.0, &spec).unwrap();
        assert!((split - whole).abs() < 1e-12);
    }
}
