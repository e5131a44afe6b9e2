use crate::error::Result;
use crate::mathkernel::{
    bessel_i0_scaled, integrate_finite, ln_binomial, marcum_q1_pair, regularized_incomplete_beta,
    QuadratureSpec,
};
use crate::scalar::Real;

/// Rayleigh density `(a/v)·exp(−a²/2v)` with variance parameter `v`.
/// Zero for `a ≤ 0`.
#[inline]
pub fn rayleigh_density<T: Real>(a: T, variance: T) -> T {
    if a <= T::zero() {
        return T::zero();
    }
    a / variance * (-(a * a) / (T::lit(2.0) * variance)).exp()
}

/// Rician density `(a/v)·exp(−(a²+b²)/2v)·I0(ab/v)`, evaluated through the
/// scaled Bessel function so that large `ab/v` never overflows.
#[inline]
pub fn rician_density<T: Real>(a: T, offset: T, variance: T) -> T {
    if a <= T::zero() {
        return T::zero();
    }
    let d = a - offset;
    a / variance
        * (-(d * d) / (T::lit(2.0) * variance)).exp()
        * bessel_i0_scaled(a * offset / variance)
}

/// Closed-form shape of a distance density.
#[derive(Debug, Clone, PartialEq)]
pub enum Density<T> {
    Rayleigh {
        variance: T,
    },
    Rician {
        offset: T,
        variance: T,
    },
    /// `k`-th smallest of `count` i.i.d. draws from `parent`.
    OrderStatistic {
        rank: usize,
        count: usize,
        parent: Box<Density<T>>,
    },
    /// `parent` restricted to `(lower, upper)` and renormalized by `mass`.
    Truncated {
        parent: Box<Density<T>>,
        lower: T,
        upper: T,
        mass: T,
    },
}

impl<T: Real> Density<T> {
    pub fn pdf(&self, x: T) -> T {
        match self {
            Density::Rayleigh { variance } => rayleigh_density(x, *variance),
            Density::Rician { offset, variance } => rician_density(x, *offset, *variance),
            Density::OrderStatistic {
                rank,
                count,
                parent,
            } => {
                let f = parent.pdf(x);
                if f == T::zero() {
                    return T::zero();
                }
                let (cdf, sf) = parent.cdf_sf(x);
                let below = *rank - 1;
                let above = *count - *rank;
                let ln_coef =
                    T::from_usize_lossy(*count).ln() + ln_binomial::<T>(*count - 1, below);
                let ln_below = if below == 0 {
                    T::zero()
                } else {
                    T::from_usize_lossy(below) * cdf.ln()
                };
                let ln_above = if above == 0 {
                    T::zero()
                } else {
                    T::from_usize_lossy(above) * sf.ln()
                };
                (ln_coef + ln_below + ln_above).exp() * f
            }
            Density::Truncated {
                parent,
                lower,
                upper,
                mass,
            } => {
                if x <= *lower || x >= *upper {
                    T::zero()
                } else {
                    parent.pdf(x) / *mass
                }
            }
        }
    }

    /// `(F(x), 1 − F(x))`, each computed without cancellation where possible.
    pub fn cdf_sf(&self, x: T) -> (T, T) {
        match self {
            Density::Rayleigh { variance } => {
                if x <= T::zero() {
                    return (T::zero(), T::one());
                }
                let e = -(x * x) / (T::lit(2.0) * *variance);
                (-e.exp_m1(), e.exp())
            }
            Density::Rician { offset, variance } => {
                if x <= T::zero() {
                    return (T::zero(), T::one());
                }
                let sd = variance.sqrt();
                // Arguments are finite and nonnegative here.
                let (q, p) = marcum_q1_pair(*offset / sd, x / sd).unwrap_or((T::nan(), T::nan()));
                (p, q)
            }
            Density::OrderStatistic {
                rank,
                count,
                parent,
            } => {
                let (cdf, sf) = parent.cdf_sf(x);
                let a = T::from_usize_lossy(*rank);
                let b = T::from_usize_lossy(*count - *rank + 1);
                // I_F(k, M−k+1), and its complement through the symmetry I_{1−F}(b, a).
                let lower = regularized_incomplete_beta(cdf, a, b).unwrap_or(T::nan());
                let upper = regularized_incomplete_beta(sf, b, a).unwrap_or(T::nan());
                (lower, upper)
            }
            Density::Truncated {
                parent,
                lower,
                upper,
                mass,
            } => {
                if x <= *lower {
                    return (T::zero(), T::one());
                }
                if x >= *upper {
                    return (T::one(), T::zero());
                }
                let (f_lo, _) = parent.cdf_sf(*lower);
                let (f_x, sf_x) = parent.cdf_sf(x);
                let below = if *lower <= T::zero() { f_x } else { f_x - f_lo };
                let above = if upper.is_infinite() {
                    sf_x
                } else {
                    let (_, sf_hi) = parent.cdf_sf(*upper);
                    sf_x - sf_hi
                };
                let c = (below / *mass).max(T::zero()).min(T::one());
                let s = (above / *mass).max(T::zero()).min(T::one());
                (c, s)
            }
        }
    }

    pub fn cdf(&self, x: T) -> T {
        self.cdf_sf(x).0
    }

    pub fn sf(&self, x: T) -> T {
        self.cdf_sf(x).1
    }

    /// Finite interval outside of which the density carries negligible
    /// (≲ e⁻⁴⁵) mass.
    pub fn effective_support(&self) -> (T, T) {
        let width = T::lit(9.5);
        match self {
            Density::Rayleigh { variance } => (T::zero(), width * variance.sqrt()),
            Density::Rician { offset, variance } => {
                let sd = variance.sqrt();
                ((*offset - width * sd).max(T::zero()), *offset + width * sd)
            }
            Density::OrderStatistic { count, parent, .. } => {
                let (lo, hi) = parent.effective_support();
                // Extra room for the maximum of `count` draws.
                let extra = T::from_usize_lossy(*count).ln().sqrt() * T::lit(2.0);
                let scale = match parent.as_ref() {
                    Density::Rayleigh { variance } | Density::Rician { variance, .. } => {
                        variance.sqrt()
                    }
                    _ => T::zero(),
                };
                (lo, hi + extra * scale)
            }
            Density::Truncated {
                parent,
                lower,
                upper,
                ..
            } => {
                let (lo, hi) = parent.effective_support();
                (lo.max(*lower), hi.min(*upper).max(lo.max(*lower)))
            }
        }
    }
}

/// Variables a distance density is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conditioning<T> {
    /// Distance from the typical device to its own cluster center.
    pub nu0: Option<T>,
    /// Distance from the typical device to an interfering cluster center.
    pub nu: Option<T>,
    /// Serving distance.
    pub r: Option<T>,
}

/// Immutable, evaluable distance distribution (pdf/cdf pair) together with
/// the variables it was conditioned on.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPdf<T> {
    density: Density<T>,
    conditioning: Conditioning<T>,
}

impl<T: Real> ConditionalPdf<T> {
    pub fn new(density: Density<T>, conditioning: Conditioning<T>) -> Self {
        Self {
            density,
            conditioning,
        }
    }

    pub fn pdf(&self, x: T) -> T {
        self.density.pdf(x)
    }

    pub fn cdf(&self, x: T) -> T {
        self.density.cdf(x)
    }

    pub fn sf(&self, x: T) -> T {
        self.density.sf(x)
    }

    /// Nominal support `(lower, upper)`; `upper` may be `+∞`.
    pub fn support(&self) -> (T, T) {
        match &self.density {
            Density::Truncated { lower, upper, .. } => (*lower, *upper),
            _ => (T::zero(), T::infinity()),
        }
    }

    pub fn effective_support(&self) -> (T, T) {
        self.density.effective_support()
    }

    pub fn density(&self) -> &Density<T> {
        &self.density
    }

    pub fn conditioning(&self) -> Conditioning<T> {
        self.conditioning
    }

    /// `∫ g(x)·pdf(x) dx` over the effective support.
    pub fn expectation<F: Fn(T) -> T>(&self, g: F, spec: &QuadratureSpec<T>) -> Result<T> {
        let (lo, hi) = self.effective_support();
        integrate_finite(|x| g(x) * self.pdf(x), lo, hi, spec)
    }
}
