//! Count distributions for active transmitters.

use crate::error::{Error, Result};
use crate::mathkernel::{ln_binomial, ln_gamma, regularized_incomplete_beta};
use crate::scalar::Real;

/// Masses of a Poisson(`mean`) count conditioned on `n ≤ cap`, for
/// `n = 0..=cap`. The normalizer is the Poisson CDF at `cap`.
pub fn truncated_poisson_pmf<T: Real>(mean: T, cap: usize) -> Result<Vec<T>> {
    if !(mean >= T::zero()) || !mean.is_finite() {
        return Err(Error::domain(format!(
            "Poisson mean must be nonnegative, got {mean} (m_bar < 1 leaves no serving link)"
        )));
    }
    if mean == T::zero() {
        let mut masses = vec![T::zero(); cap + 1];
        masses[0] = T::one();
        return Ok(masses);
    }
    let ln_mean = mean.ln();
    let logs: Vec<T> = (0..=cap)
        .map(|n| {
            let n_t = T::from_usize_lossy(n);
            n_t * ln_mean - mean - ln_gamma(n_t + T::one())
        })
        .collect();
    let peak = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let raw: Vec<T> = logs.iter().map(|&l| (l - peak).exp()).collect();
    let total: T = raw.iter().copied().sum();
    Ok(raw.into_iter().map(|v| v / total).collect())
}

/// Masses of a Binomial(`n`, `p`) count conditioned on `l ≤ cap`, for
/// `l = 0..=cap`, normalized by `I_{1−p}(n − cap, cap + 1)`. Uses `0⁰ = 1`.
pub fn truncated_binomial_pmf<T: Real>(n: usize, p: T, cap: usize) -> Result<Vec<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::domain(format!(
            "binomial probability {p} outside [0, 1]"
        )));
    }
    let cap = cap.min(n);
    let q = T::one() - p;
    let masses: Vec<T> = (0..=cap)
        .map(|l| {
            let coef = ln_binomial::<T>(n, l).exp();
            coef * int_pow(p, l) * int_pow(q, n - l)
        })
        .collect();
    let norm = regularized_incomplete_beta(
        q,
        T::from_usize_lossy(n - cap),
        T::from_usize_lossy(cap + 1),
    )?;
    if !(norm > T::zero()) {
        return Err(Error::domain(format!(
            "truncated binomial has no mass (n = {n}, p = {p}, cap = {cap})"
        )));
    }
    Ok(masses.into_iter().map(|m| m / norm).collect())
}

/// `x^e` with `0⁰ = 1`.
pub(crate) fn int_pow<T: Real>(x: T, e: usize) -> T {
    if e == 0 {
        T::one()
    } else {
        x.powi(e as i32)
    }
}
