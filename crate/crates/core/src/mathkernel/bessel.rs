use crate::scalar::Real;

// Power series below this argument, asymptotic expansion above.
const SERIES_LIMIT: f64 = 20.0;

fn i0_series<T: Real>(x: T) -> T {
    let q = x * x * T::lit(0.25);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::one();
    loop {
        term = term * q / (k * k);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            return sum;
        }
        k = k + T::one();
    }
}

/// `e^{-x} I0(x)` via the large-argument expansion; only valid for `x ≥ 20`.
fn i0e_asymptotic<T: Real>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::one();
    let eight_x = T::lit(8.0) * x;
    loop {
        let two_k_minus_one = T::lit(2.0) * k - T::one();
        let next = term * two_k_minus_one * two_k_minus_one / (k * eight_x);
        if next >= term {
            break;
        }
        term = next;
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
        k = k + T::one();
    }
    sum / (T::lit(2.0) * T::PI() * x).sqrt()
}

/// Modified Bessel function of the first kind, order zero.
///
/// `I0` is even, so negative arguments are folded onto `|x|`. Overflows to
/// `+∞` for `x ≳ 713` in `f64`; use [`bessel_i0_scaled`] there.
pub fn bessel_i0<T: Real>(x: T) -> T {
    let x = x.abs();
    if x <= T::lit(SERIES_LIMIT) {
        i0_series(x)
    } else {
        i0e_asymptotic(x) * x.exp()
    }
}

/// Exponentially scaled `e^{-|x|}·I0(x)`; finite for every finite `x`.
pub fn bessel_i0_scaled<T: Real>(x: T) -> T {
    let x = x.abs();
    if x <= T::lit(SERIES_LIMIT) {
        i0_series(x) * (-x).exp()
    } else {
        i0e_asymptotic(x)
    }
}
