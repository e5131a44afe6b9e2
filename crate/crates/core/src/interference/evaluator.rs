use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::Conditioning;
use crate::scalar::Real;

/// Which formula an evaluator implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplaceMethod {
    /// Sum over the truncated-Poisson count of active interferers.
    ExactSum,
    /// Exponential form valid when `M ≫ m̄`.
    PoissonLimit,
    /// Intra-cluster distances treated as i.i.d. Rayleigh(2σ²).
    IidApprox,
    /// Closed-form lower bound.
    LowerBound,
    KClosestExact,
    KClosestLimit,
}

impl LaplaceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            LaplaceMethod::ExactSum => "exact-sum",
            LaplaceMethod::PoissonLimit => "poisson-limit",
            LaplaceMethod::IidApprox => "iid-approx",
            LaplaceMethod::LowerBound => "lower-bound",
            LaplaceMethod::KClosestExact => "kclosest-exact",
            LaplaceMethod::KClosestLimit => "kclosest-limit",
        }
    }
}

impl std::fmt::Display for LaplaceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Laplace transform `E[exp(−sI)]` of one interference component,
/// possibly conditioned on `ν0` and/or the serving distance `r`.
///
/// Every implementation satisfies `evaluate(0, ·) = 1` and is nonincreasing
/// in `s`.
pub trait LaplaceEvaluator<T: Real>: Send + Sync {
    fn evaluate(&self, s: T, conditioning: &Conditioning<T>) -> Result<T>;

    fn method(&self) -> LaplaceMethod;
}

/// Evaluates `evaluator` at every point of `grid` in parallel. The output
/// does not depend on the number of worker threads.
pub fn evaluate_on_grid<T, E>(
    evaluator: &E,
    grid: &[T],
    conditioning: &Conditioning<T>,
) -> Result<Vec<T>>
where
    T: Real,
    E: LaplaceEvaluator<T> + ?Sized,
{
    grid.par_iter()
        .map(|&s| evaluator.evaluate(s, conditioning))
        .collect()
}
