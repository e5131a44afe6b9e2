use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::coverage::{coverage, coverage_closed_form};
use super::{AseResult, CoverageMethod, CoverageOptions, CoverageResult};
use crate::error::{Error, Result};
use crate::geometry::{ContentStrategy, NetworkParams};
use crate::scalar::Real;

/// `m̄·λ_c·log2(1+β)·P_c`.
pub fn ase_from_coverage<T: Real>(coverage: CoverageResult<T>) -> AseResult<T> {
    let p = &coverage.params;
    AseResult {
        value: p.m_bar * p.lambda_c * (T::one() + p.beta).log2() * coverage.value,
        m_bar_used: p.m_bar,
        coverage,
    }
}

pub fn ase<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
    method: CoverageMethod,
    options: &CoverageOptions<T>,
) -> Result<AseResult<T>> {
    coverage(params, strategy, method, options).map(ase_from_coverage)
}

/// ASE from the closed-form coverage. Includes the `log2(1+β)` factor.
pub fn ase_closed_form<T: Real>(params: &NetworkParams<T>) -> Result<AseResult<T>> {
    coverage_closed_form(params).map(ase_from_coverage)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MbarOptimum<T> {
    pub m_bar: usize,
    pub best: AseResult<T>,
    /// ASE at every evaluated `m̄`, in increasing order.
    pub curve: Vec<AseResult<T>>,
}

/// Exhaustive search for the integer `m̄` in `range` that maximizes ASE.
/// Ties go to the smaller `m̄`. Points are evaluated in parallel; the result
/// does not depend on evaluation order.
pub fn optimize_mbar<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
    method: CoverageMethod,
    options: &CoverageOptions<T>,
    range: RangeInclusive<usize>,
) -> Result<MbarOptimum<T>> {
    if range.is_empty() || *range.start() == 0 {
        return Err(Error::domain(format!(
            "m_bar range {}..={} must be nonempty and start at 1 or above",
            range.start(),
            range.end()
        )));
    }
    let values: Vec<usize> = range.collect();
    let curve = values
        .par_iter()
        .map(|&m| {
            ase(
                &params.with_m_bar(T::from_usize_lossy(m)),
                strategy,
                method,
                options,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, point) in curve.iter().enumerate() {
        if point.value > curve[best].value {
            best = i;
        }
    }
    Ok(MbarOptimum {
        m_bar: values[best],
        best: curve[best],
        curve,
    })
}
