//! First-order Marcum Q-function.
//!
//! With `J ~ Poisson(a²/2)` and `Y ~ Poisson(b²/2)` independent,
//! `Q1(a, b) = P(Y ≤ J)`. Both `Q1` and `1 − Q1` are sums of nonnegative
//! terms in this form, so whichever side is smaller is summed directly and
//! keeps full relative accuracy in the tails. Very large arguments fall back
//! to quadrature of the defining integral.

use super::bessel::bessel_i0_scaled;
use super::quadrature::{integrate_finite, QuadratureSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

// Beyond this many expected series terms, integrate instead.
const SERIES_TERM_LIMIT: f64 = 20_000.0;

/// `Σ_{j≥shift} pmf_outer(j) · cdf_inner(j − shift)`.
///
/// `shift = 0` gives `P(inner ≤ outer) = Q1`; with the roles of the two
/// Poisson means swapped and `shift = 1` it gives `P(inner < outer) = 1 − Q1`.
fn poisson_mixture<T: Real>(outer_mean: T, inner_mean: T, shift: usize) -> T {
    let ln_outer = outer_mean.ln();
    let ln_inner = inner_mean.ln();
    let peak = outer_mean.max((outer_mean * inner_mean).sqrt());
    let cap = peak + T::lit(60.0) * (peak + T::one()).sqrt() + T::lit(200.0);
    let cap = cap.to_usize().unwrap_or(usize::MAX);

    // log pmf at index 0; zero means are handled by `0·ln 0 = 0` conventions.
    let mut lp_outer = -outer_mean;
    let mut lp_inner = -inner_mean;
    let mut cdf_inner = T::zero();
    let mut sum = T::zero();
    let mut j = 0usize;
    loop {
        if j >= shift {
            let idx = j - shift;
            if idx > 0 {
                lp_inner = if inner_mean > T::zero() {
                    lp_inner + ln_inner - T::from_usize_lossy(idx).ln()
                } else {
                    T::neg_infinity()
                };
            }
            cdf_inner = (cdf_inner + lp_inner.exp()).min(T::one());
        }
        if j > 0 {
            lp_outer = if outer_mean > T::zero() {
                lp_outer + ln_outer - T::from_usize_lossy(j).ln()
            } else {
                T::neg_infinity()
            };
        }
        let term = lp_outer.exp() * cdf_inner;
        sum = sum + term;
        let past_peak = T::from_usize_lossy(j) > peak + T::one();
        if past_peak && term <= sum * T::epsilon() * T::lit(1e-3) {
            break;
        }
        if past_peak && sum == T::zero() && lp_outer < T::lit(-800.0) {
            break;
        }
        if j >= cap {
            break;
        }
        j += 1;
    }
    sum
}

fn rician_kernel<T: Real>(a: T, t: T) -> T {
    // t·exp(−(t²+a²)/2)·I0(at) written in scaled form.
    let d = t - a;
    t * (-(d * d) * T::lit(0.5)).exp() * bessel_i0_scaled(a * t)
}

fn by_quadrature<T: Real>(a: T, b: T) -> Result<(T, T)> {
    let spec =
        QuadratureSpec::with_tolerances(T::lit(1e-12), T::lit(1e-300).max(T::min_positive_value()));
    let width = T::lit(40.0);
    let lo = (a - width).max(T::zero());
    let hi = a.max(b) + width;
    if b > a {
        let q = if b >= hi {
            T::zero()
        } else {
            integrate_finite(|t| rician_kernel(a, t), b, hi, &spec)?
        };
        Ok((q, T::one() - q))
    } else {
        let p = if b <= lo {
            T::zero()
        } else {
            integrate_finite(|t| rician_kernel(a, t), lo, b, &spec)?
        };
        Ok((T::one() - p, p))
    }
}

fn check_args<T: Real>(a: T, b: T) -> Result<()> {
    if !(a >= T::zero()) || !a.is_finite() || !(b >= T::zero()) || !b.is_finite() {
        return Err(Error::domain(format!(
            "Marcum Q1 requires finite nonnegative arguments, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// Returns `(Q1(a, b), 1 − Q1(a, b))`, each accurate relative to itself.
pub fn marcum_q1_pair<T: Real>(a: T, b: T) -> Result<(T, T)> {
    check_args(a, b)?;
    if b == T::zero() {
        return Ok((T::one(), T::zero()));
    }
    let half = T::lit(0.5);
    let la = a * a * half;
    let lb = b * b * half;
    if la.max(lb).max(a * b * half) > T::lit(SERIES_TERM_LIMIT) {
        return by_quadrature(a, b);
    }
    if b > a {
        let q = poisson_mixture(la, lb, 0).min(T::one());
        Ok((q, T::one() - q))
    } else {
        let p = poisson_mixture(lb, la, 1).min(T::one());
        Ok((T::one() - p, p))
    }
}

/// `Q1(a, b) = ∫_b^∞ t·exp(−(t²+a²)/2)·I0(at) dt`.
pub fn marcum_q1<T: Real>(a: T, b: T) -> Result<T> {
    marcum_q1_pair(a, b).map(|(q, _)| q)
}

/// `1 − Q1(a, b)`, accurate when it is tiny.
pub fn marcum_q1_complement<T: Real>(a: T, b: T) -> Result<T> {
    marcum_q1_pair(a, b).map(|(_, p)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkernel::quadrature::{integrate, Upper};

    fn oracle(a: f64, b: f64) -> f64 {
        let spec = QuadratureSpec::with_tolerances(1e-10, 1e-15).with_tail_scale(1.0 + a);
        integrate(
            |t: f64| {
                // Plain I0 overflows far in the tail, where the integrand is zero anyway.
                let i0 = crate::mathkernel::bessel_i0(a * t);
                if i0.is_finite() {
                    t * (-(t * t + a * a) / 2.0).exp() * i0
                } else {
                    0.0
                }
            },
            b,
            Upper::Infinity,
            &spec,
        )
        .unwrap()
    }

    #[test]
    fn zero_threshold_is_one() {
        for a in [0.0, 0.5, 3.0, 40.0, 500.0] {
            assert_eq!(marcum_q1(a, 0.0_f64).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_offset_is_rayleigh_tail() {
        let v = marcum_q1(0.0, 2.0_f64).unwrap();
        assert!((v - (-2.0_f64).exp()).abs() < 1e-14, "{v}");
        let v = marcum_q1(0.0, 0.3_f64).unwrap();
        assert!((v - (-0.045_f64).exp()).abs() < 1e-14, "{v}");
    }

    #[test]
    fn matches_defining_integral() {
        let expected = oracle(1.0, 2.0);
        let got = marcum_q1(1.0, 2.0_f64).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }

    #[test]
    fn complement_is_accurate_in_lower_tail() {
        // F = 1 − Q1 for b ≪ a is tiny; compare against direct quadrature of [0, b].
        let (a, b) = (6.0_f64, 0.5_f64);
        let spec = QuadratureSpec::with_tolerances(1e-12, 1e-300);
        let expected = integrate_finite(|t| rician_kernel(a, t), 0.0, b, &spec).unwrap();
        let got = marcum_q1_complement(a, b).unwrap();
        assert!(expected < 1e-6);
        assert!(
            (got - expected).abs() / expected < 1e-9,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn quadrature_fallback_agrees_with_series_near_switch() {
        let (a, b) = (150.0_f64, 151.0_f64);
        let (q_series, _) = {
            let la = a * a / 2.0;
            let lb = b * b / 2.0;
            let q = poisson_mixture(la, lb, 0);
            (q, 1.0 - q)
        };
        let (q_quad, _) = by_quadrature(a, b).unwrap();
        assert!((q_series - q_quad).abs() < 1e-9, "{q_series} vs {q_quad}");
    }

    #[test]
    fn rejects_negative_arguments() {
        assert!(marcum_q1(-1.0, 1.0_f64).is_err());
        assert!(marcum_q1(1.0, f64::NAN).is_err());
    }

    #[test]
    fn monotone_in_each_argument() {
        let mut prev = 1.0;
        for i in 0..60 {
            let v = marcum_q1(2.0, i as f64 * 0.1).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        let mut prev = 0.0;
        for i in 0..60 {
            let v = marcum_q1(i as f64 * 0.1, 2.0).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}
