use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // Reflection keeps the approximation in its accurate half-plane.
        let pi = T::PI();
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(*c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (x + T::lit(0.5)) * t.ln() - t + acc.ln()
}

/// `ln C(n, k)`; `-∞` when `k > n`.
pub fn ln_binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::neg_infinity();
    }
    if k == 0 || k == n {
        return T::zero();
    }
    let n_t = T::from_usize_lossy(n);
    let k_t = T::from_usize_lossy(k);
    ln_gamma(n_t + T::one()) - ln_gamma(k_t + T::one()) - ln_gamma(n_t - k_t + T::one())
}

fn continued_fraction<T: Real>(x: T, a: T, b: T) -> Result<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=10_000usize {
        let m_t = T::from_usize_lossy(m);
        let m2 = two * m_t;
        let aa = m_t * (b - m_t) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m_t) * (qab + m_t) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= eps {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        estimate: h.as_f64(),
        error: f64::NAN,
        subdivisions: 10_000,
    })
}

/// Regularized incomplete beta function `I_x(a, b)`, the CDF of
/// `Beta(a, b)` at `x`.
///
/// `a = 0` returns 1: this is the value the truncated-binomial normalizer
/// needs when every count up to `n` is retained.
pub fn regularized_incomplete_beta<T: Real>(x: T, a: T, b: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::domain(format!(
            "incomplete beta: x = {x} outside [0, 1]"
        )));
    }
    if !(a >= T::zero()) || !a.is_finite() {
        return Err(Error::domain(format!(
            "incomplete beta: a = {a} must be nonnegative"
        )));
    }
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::domain(format!(
            "incomplete beta: b = {b} must be positive"
        )));
    }
    if a == T::zero() {
        return Ok(T::one());
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    let front = ln_front.exp();
    let value = if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        front * continued_fraction(x, a, b)? / a
    } else {
        T::one() - front * continued_fraction(T::one() - x, b, a)? / b
    };
    Ok(value.max(T::zero()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_tail_oracle(x: f64, a: u32, b: u32) -> f64 {
        // I_x(a, b) = P(Bin(a+b−1, x) ≥ a) for integer a, b.
        let n = a + b - 1;
        let mut total = 0.0;
        for j in a..=n {
            let mut c = 1.0_f64;
            for i in 0..j {
                c = c * f64::from(n - i) / f64::from(i + 1);
            }
            total += c * x.powi(j as i32) * (1.0 - x).powi((n - j) as i32);
        }
        total
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..25 {
            fact *= n as f64;
            let got = ln_gamma((n + 1) as f64);
            assert!(
                (got - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0),
                "n={n}"
            );
        }
        assert!((ln_gamma(0.5_f64) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn ln_binomial_small_values() {
        assert!((ln_binomial::<f64>(10, 3).exp() - 120.0).abs() < 1e-9);
        assert_eq!(ln_binomial::<f64>(7, 0), 0.0);
        assert_eq!(ln_binomial::<f64>(3, 5), f64::NEG_INFINITY);
        // No overflow at large n.
        assert!(ln_binomial::<f64>(1000, 500).is_finite());
    }

    #[test]
    fn uniform_beta_is_identity() {
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let v = regularized_incomplete_beta(x, 1.0, 1.0).unwrap();
            assert!((v - x).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_beta_at_half() {
        let v = regularized_incomplete_beta(0.5_f64, 2.0, 2.0).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn matches_binomial_identity() {
        let expected = binomial_tail_oracle(0.3, 3, 5);
        let got = regularized_incomplete_beta(0.3, 3.0, 5.0).unwrap();
        assert!((got - expected).abs() < 1e-13, "{got} vs {expected}");
        for a in 1..8 {
            for b in 1..8 {
                for xi in 1..10 {
                    let x = xi as f64 / 10.0;
                    let e = binomial_tail_oracle(x, a, b);
                    let g = regularized_incomplete_beta(x, a as f64, b as f64).unwrap();
                    assert!((g - e).abs() < 1e-12, "x={x} a={a} b={b}: {g} vs {e}");
                }
            }
        }
    }

    #[test]
    fn degenerate_first_shape_is_one() {
        assert_eq!(regularized_incomplete_beta(0.4, 0.0, 3.0).unwrap(), 1.0);
        assert_eq!(regularized_incomplete_beta(0.0, 0.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(regularized_incomplete_beta(1.5, 1.0, 1.0).is_err());
        assert!(regularized_incomplete_beta(0.5, -1.0, 1.0).is_err());
        assert!(regularized_incomplete_beta(0.5, 1.0, 0.0).is_err());
    }
}
