//! Adaptive Gauss–Kronrod (10/21 point) integration on finite and
//! semi-infinite ranges.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// How a semi-infinite range `[lower, ∞)` is handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule<T> {
    /// Substitute `x = lower + scale·t/(1−t)` and integrate over `t ∈ [0, 1)`.
    /// `scale` should be of the order of the integrand's decay length.
    Substitution { scale: T },
    /// Integrate `[lower, at]` only; the remainder is assumed negligible.
    Truncate { at: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    pub tail: TailRule<T>,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-8),
            abs_tol: T::lit(1e-12),
            max_subdivisions: 2000,
            tail: TailRule::Substitution { scale: T::one() },
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_tail(mut self, tail: TailRule<T>) -> Self {
        self.tail = tail;
        self
    }

    /// Shorthand for a substitution tail with the given length scale.
    pub fn with_tail_scale(self, scale: T) -> Self {
        self.with_tail(TailRule::Substitution { scale })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        match self.tail {
            TailRule::Substitution { scale } if !(scale > T::zero()) => {
                Err(Error::domain("substitution scale must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Upper limit of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper<T> {
    Finite(T),
    Infinity,
}

// Kronrod abscissae (positive half, descending) and weights of the 21-point
// rule; every odd-indexed abscissa is a node of the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_797_982_050,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    result: T,
    error: T,
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if scale < T::one() {
            res_asc * scale
        } else {
            res_asc
        };
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        let min_err = fifty_eps * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gauss_kronrod_21<T, F>(f: &F, a: T, b: T) -> Result<Segment<T>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let half_abs = half.abs();

    let f_center = checked(f(center)?, center)?;
    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();

    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        let x1 = center - dx;
        let x2 = center + dx;
        let f1 = checked(f(x1)?, x1)?;
        let f2 = checked(f(x2)?, x2)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_k = res_k + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * T::lit(0.5);
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = res_k * half;
    let res_abs = res_abs * half_abs;
    let res_asc = res_asc * half_abs;
    let error = rescale_error((res_k - res_g) * half, res_abs, res_asc);
    Ok(Segment {
        a,
        b,
        result,
        error,
    })
}

fn checked<T: Real>(v: T, x: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("integrand is not finite at x = {x}")))
    }
}

fn adaptive<T, F>(f: &F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    if a == b {
        return Ok(T::zero());
    }
    let first = gauss_kronrod_21(f, a, b)?;
    let mut segments = vec![first];
    let mut total = first.result;
    let mut total_err = first.error;

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(non_convergence(total, total_err, segments.len()));
        }

        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| {
                x.1.error
                    .partial_cmp(&y.1.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, s)| (i, *s))
            .expect("at least one segment");

        let mid = (worst.a + worst.b) * T::lit(0.5);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval can no longer be split in this precision.
            return Err(non_convergence(total, total_err, segments.len()));
        }
        let left = gauss_kronrod_21(f, worst.a, mid)?;
        let right = gauss_kronrod_21(f, mid, worst.b)?;

        total = total - worst.result + left.result + right.result;
        total_err = total_err - worst.error + left.error + right.error;
        segments[idx] = left;
        segments.push(right);

        // Running sums drift; resum occasionally.
        if segments.len() % 64 == 0 {
            total = segments.iter().map(|s| s.result).sum();
            total_err = segments.iter().map(|s| s.error).sum();
        }
    }
}

fn non_convergence<T: Real>(estimate: T, error: T, subdivisions: usize) -> Error {
    Error::NonConvergence {
        estimate: estimate.as_f64(),
        error: error.as_f64(),
        subdivisions,
    }
}

/// Integrates a fallible integrand. Errors raised by `f` abort the
/// integration and are returned unchanged.
pub fn try_integrate<T, F>(f: F, lower: T, upper: Upper<T>, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    spec.validate()?;
    if !lower.is_finite() {
        return Err(Error::domain("lower limit must be finite"));
    }
    match upper {
        Upper::Finite(b) => {
            if !b.is_finite() {
                return Err(Error::domain("finite upper limit must be finite"));
            }
            adaptive(&f, lower, b, spec)
        }
        Upper::Infinity => match spec.tail {
            TailRule::Truncate { at } => {
                if at <= lower {
                    Ok(T::zero())
                } else {
                    adaptive(&f, lower, at, spec)
                }
            }
            TailRule::Substitution { scale } => {
                let mapped = |t: T| -> Result<T> {
                    let one_minus = T::one() - t;
                    if one_minus <= T::zero() {
                        return Ok(T::zero());
                    }
                    let x = lower + scale * t / one_minus;
                    let jac = scale / (one_minus * one_minus);
                    if !x.is_finite() || !jac.is_finite() {
                        return Ok(T::zero());
                    }
                    let v = f(x)?;
                    if v == T::zero() {
                        Ok(T::zero())
                    } else {
                        Ok(v * jac)
                    }
                };
                adaptive(&mapped, T::zero(), T::one(), spec)
            }
        },
    }
}

/// Integrates `f` over `[lower, upper]` (or `[lower, ∞)`).
///
/// The estimate satisfies `|error| ≤ max(abs_tol, rel_tol·|result|)` for
/// smooth integrands; otherwise [`Error::NonConvergence`] carries the
/// partial estimate.
pub fn integrate<T, F>(f: F, lower: T, upper: Upper<T>, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    try_integrate(|x| Ok(f(x)), lower, upper, spec)
}

/// Convenience wrapper for a finite interval.
pub fn integrate_finite<T, F>(f: F, lower: T, upper: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    integrate(f, lower, Upper::Finite(upper), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn rayleigh_density_normalizes() {
        let s2 = 2.0 * 4.0_f64;
        let f = |a: f64| a / s2 * (-a * a / (2.0 * s2)).exp();
        let v = integrate(f, 0.0, Upper::Infinity, &spec().with_tail_scale(2.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn gaussian_tail_closed_form() {
        let f = |t: f64| t * (-t * t / 2.0).exp();
        let v = integrate(f, 2.0, Upper::Infinity, &spec()).unwrap();
        assert!((v - (-2.0_f64).exp()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn truncation_rule_stops_at_cutoff() {
        let spec = spec().with_tail(TailRule::Truncate { at: 1.0 });
        let v = integrate(|x: f64| x, 0.0, Upper::Infinity, &spec).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_finite(|x: f64| 3.0 * x * x - x + 2.0, -1.0, 2.0, &spec()).unwrap();
        assert!((v - (8.0 + 1.0 - 1.5 + 6.0)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate_finite(|x: f64| x.cos(), 1.0, 0.0, &spec()).unwrap();
        assert!((v + 1.0_f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_carries_partial_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            ..spec()
        };
        let err = integrate_finite(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &spec).unwrap_err();
        match err {
            Error::NonConvergence {
                estimate,
                subdivisions,
                ..
            } => {
                assert!(estimate.is_finite());
                assert!(subdivisions >= 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn integrand_errors_propagate() {
        let err = try_integrate(
            |_x: f64| Err(Error::domain("boom")),
            0.0,
            Upper::Finite(1.0),
            &spec(),
        )
        .unwrap_err();
        assert_eq!(err, Error::domain("boom"));
    }

    #[test]
    fn invalid_spec_rejected() {
        let bad = QuadratureSpec {
            rel_tol: 0.0,
            ..spec()
        };
        assert!(integrate_finite(|x: f64| x, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let spec = QuadratureSpec::<f32>::with_tolerances(1e-5, 1e-7);
        let v = integrate_finite(|x: f32| x.exp(), 0.0, 1.0, &spec).unwrap();
        assert!((v - (1.0_f32.exp() - 1.0)).abs() < 1e-5);
    }
}
