//! Special functions and adaptive integration shared by every analytical
//! formula. All routines are pure and thread-safe.

// Tabulated nodes and coefficients keep their published digits.
#![allow(clippy::excessive_precision)]

mod bessel;
mod beta;
mod marcum;
pub mod quadrature;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use beta::{ln_binomial, ln_gamma, regularized_incomplete_beta};
pub use marcum::{marcum_q1, marcum_q1_complement, marcum_q1_pair};
pub use quadrature::{integrate, integrate_finite, try_integrate, QuadratureSpec, TailRule, Upper};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(2π/α) / sin(2π/α)`, the constant that appears whenever
/// `∫ t/(1+t^α) dt` is evaluated in closed form.
pub fn sinc_factor<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > T::lit(2.0)) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "path-loss exponent must exceed 2, got {alpha}"
        )));
    }
    let x = T::lit(2.0) * T::PI() / alpha;
    Ok(x / x.sin())
}
