use super::counts::truncated_poisson_pmf;
use super::evaluator::{LaplaceEvaluator, LaplaceMethod};
use super::{check_s, inner_spec, kernel_integral, TransformForm};
use crate::error::Result;
use crate::geometry::{rician_density, Conditioning, Density, NetworkParams};
use crate::mathkernel::{sinc_factor, try_integrate, QuadratureSpec, Upper};
use crate::scalar::Real;

/// Inter-cluster transform, `exp(−2πλ_c ∫ Φ(ν)·ν dν)`, where `Φ(ν)` is the
/// probability-weighted interference penalty of one cluster whose center
/// lies `ν` away. Valid for both content strategies.
#[derive(Debug, Clone)]
pub struct InterCluster<T> {
    lambda_c: T,
    sigma: T,
    sigma_sq: T,
    alpha: T,
    m_bar: T,
    form: TransformForm,
    /// Truncated-Poisson masses of the active count (exact form only).
    masses: Vec<T>,
    inner: QuadratureSpec<T>,
    outer: QuadratureSpec<T>,
}

impl<T: Real> InterCluster<T> {
    pub fn new(params: &NetworkParams<T>, form: TransformForm) -> Result<Self> {
        let masses = match form {
            TransformForm::Exact => truncated_poisson_pmf(params.m_bar, params.max_transmitters)?,
            TransformForm::Limit => Vec::new(),
        };
        let outer_rel = T::lit(1e-8).max(T::epsilon() * T::lit(256.0));
        Ok(Self {
            lambda_c: params.lambda_c,
            sigma: params.sigma,
            sigma_sq: params.sigma_sq(),
            alpha: params.alpha,
            m_bar: params.m_bar,
            form,
            masses,
            inner: inner_spec(),
            outer: QuadratureSpec::with_tolerances(outer_rel, T::min_positive_value()),
        })
    }

    /// Overrides the tolerances of the per-cluster (`inner`) and
    /// cluster-center (`outer`) integrals.
    pub fn with_specs(mut self, inner: QuadratureSpec<T>, outer: QuadratureSpec<T>) -> Self {
        self.inner = inner;
        self.outer = outer;
        self
    }

    /// `1 − E[Π 1/(1 + s·u^{−α})]` over the active members of one cluster
    /// centered `nu` away.
    pub fn penalty(&self, s: T, nu: T) -> Result<T> {
        let (lo, hi) = Density::Rician {
            offset: nu,
            variance: self.sigma_sq,
        }
        .effective_support();
        let j = kernel_integral(
            |u| rician_density(u, nu, self.sigma_sq),
            s,
            self.alpha,
            lo,
            hi,
            &self.inner,
        )?;
        Ok(match self.form {
            TransformForm::Limit => -(-self.m_bar * j).exp_m1(),
            TransformForm::Exact => {
                // Σ q_k·(1 − (1−J)^k), each term without cancellation.
                let ln_keep = (-j).ln_1p();
                self.masses
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &q)| q * -(T::from_usize_lossy(k) * ln_keep).exp_m1())
                    .sum()
            }
        })
    }

    pub fn at(&self, s: T) -> Result<T> {
        check_s(s)?;
        if s == T::zero() || self.lambda_c == T::zero() {
            return Ok(T::one());
        }
        // Penalties are near one inside the knee and decay like ν^{−α} past it.
        let split = s.powf(self.alpha.recip()) + T::lit(10.0) * self.sigma;
        let integrand = |nu: T| self.penalty(s, nu).map(|p| p * nu);
        let body = try_integrate(integrand, T::zero(), Upper::Finite(split), &self.outer)?;
        let tail = try_integrate(
            integrand,
            split,
            Upper::Infinity,
            &self.outer.with_tail_scale(split),
        )?;
        Ok((-T::lit(2.0) * T::PI() * self.lambda_c * (body + tail)).exp())
    }
}

impl<T: Real> LaplaceEvaluator<T> for InterCluster<T> {
    fn evaluate(&self, s: T, _: &Conditioning<T>) -> Result<T> {
        self.at(s)
    }

    fn method(&self) -> LaplaceMethod {
        match self.form {
            TransformForm::Exact => LaplaceMethod::ExactSum,
            TransformForm::Limit => LaplaceMethod::PoissonLimit,
        }
    }
}

/// `exp(−πλ_c·m̄·s^{2/α}·sinc_factor(α))`.
#[derive(Debug, Clone, Copy)]
pub struct InterLowerBound<T> {
    coefficient: T,
    exponent: T,
}

impl<T: Real> InterLowerBound<T> {
    pub fn new(params: &NetworkParams<T>) -> Result<Self> {
        let sinc = sinc_factor(params.alpha)?;
        Ok(Self {
            coefficient: T::PI() * params.lambda_c * params.m_bar * sinc,
            exponent: T::lit(2.0) / params.alpha,
        })
    }

    pub fn at(&self, s: T) -> Result<T> {
        check_s(s)?;
        if s == T::zero() {
            return Ok(T::one());
        }
        Ok((-self.coefficient * s.powf(self.exponent)).exp())
    }
}

impl<T: Real> LaplaceEvaluator<T> for InterLowerBound<T> {
    fn evaluate(&self, s: T, _: &Conditioning<T>) -> Result<T> {
        self.at(s)
    }

    fn method(&self) -> LaplaceMethod {
        LaplaceMethod::LowerBound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NetworkParams<f64> {
        NetworkParams::preset()
    }

    #[test]
    fn no_clusters_no_interference() {
        let p = params().with_lambda_c(0.0);
        assert_eq!(
            InterCluster::new(&p, TransformForm::Limit)
                .unwrap()
                .at(1e6)
                .unwrap(),
            1.0
        );
        assert_eq!(InterLowerBound::new(&p).unwrap().at(1e6).unwrap(), 1.0);
    }

    #[test]
    fn exact_and_limit_penalties_agree_for_small_mass() {
        // For J → 0 both penalties reduce to E[count]·J.
        let p = params();
        let exact = InterCluster::new(&p, TransformForm::Exact).unwrap();
        let limit = InterCluster::new(&p, TransformForm::Limit).unwrap();
        let (a, b) = (
            exact.penalty(1.0, 500.0).unwrap(),
            limit.penalty(1.0, 500.0).unwrap(),
        );
        assert!(a > 0.0 && ((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn matches_trapezoid_oracle() {
        // Brute-force trapezoid over a long finite range, with the ν^{−α+1}
        // tail beyond it added in closed form.
        let p = params();
        let e = InterCluster::new(&p, TransformForm::Limit).unwrap();
        let s = 1e4_f64;
        let top = 4000.0;
        let n = 200_000;
        let h = top / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let nu = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * e.penalty(s, nu).unwrap() * nu;
        }
        acc *= h;
        acc += p.m_bar * s * top.powf(2.0 - p.alpha) / (p.alpha - 2.0);
        let expected = (-2.0 * std::f64::consts::PI * p.lambda_c * acc).exp();
        let got = e.at(s).unwrap();
        assert!(
            ((got - expected) / expected).abs() < 1e-6,
            "{got} vs {expected}"
        );
    }
}
