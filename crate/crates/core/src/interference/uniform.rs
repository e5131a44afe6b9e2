use super::counts::truncated_poisson_pmf;
use super::evaluator::{LaplaceEvaluator, LaplaceMethod};
use super::{check_s, inner_spec, intra_mean, kernel_integral, require, TransformForm};
use crate::error::{Error, Result};
use crate::geometry::{rayleigh_density, rician_density, Conditioning, Density, NetworkParams};
use crate::mathkernel::{sinc_factor, QuadratureSpec};
use crate::scalar::Real;

/// `Σ_j masses[j]·x^j` by Horner's rule.
pub(crate) fn power_series<T: Real>(masses: &[T], x: T) -> T {
    masses.iter().rev().fold(T::zero(), |acc, &m| acc * x + m)
}

/// Intra-cluster transform for uniform content, conditioned on `ν0`.
#[derive(Debug, Clone)]
pub struct IntraUniform<T> {
    sigma_sq: T,
    alpha: T,
    mean: T,
    form: TransformForm,
    /// Truncated-Poisson masses of the interferer count (exact form only).
    masses: Vec<T>,
    spec: QuadratureSpec<T>,
}

impl<T: Real> IntraUniform<T> {
    pub fn new(params: &NetworkParams<T>, form: TransformForm) -> Result<Self> {
        let mean = intra_mean(params)?;
        let masses = match form {
            TransformForm::Exact => truncated_poisson_pmf(mean, params.max_transmitters - 1)?,
            TransformForm::Limit => Vec::new(),
        };
        Ok(Self {
            sigma_sq: params.sigma_sq(),
            alpha: params.alpha,
            mean,
            form,
            masses,
            spec: inner_spec(),
        })
    }

    pub fn with_spec(mut self, spec: QuadratureSpec<T>) -> Self {
        self.spec = spec;
        self
    }

    /// `J(s|ν0)`: the kernel averaged over the distance to one interferer.
    pub fn mass(&self, s: T, nu0: T) -> Result<T> {
        check_s(s)?;
        if !(nu0 >= T::zero()) || !nu0.is_finite() {
            return Err(Error::domain(format!(
                "nu0 must be finite and nonnegative, got {nu0}"
            )));
        }
        let (lo, hi) = Density::Rician {
            offset: nu0,
            variance: self.sigma_sq,
        }
        .effective_support();
        kernel_integral(
            |w| rician_density(w, nu0, self.sigma_sq),
            s,
            self.alpha,
            lo,
            hi,
            &self.spec,
        )
    }

    pub fn at(&self, s: T, nu0: T) -> Result<T> {
        let j = self.mass(s, nu0)?;
        Ok(match self.form {
            TransformForm::Exact => power_series(&self.masses, T::one() - j),
            TransformForm::Limit => (-self.mean * j).exp(),
        })
    }
}

impl<T: Real> LaplaceEvaluator<T> for IntraUniform<T> {
    fn evaluate(&self, s: T, conditioning: &Conditioning<T>) -> Result<T> {
        self.at(s, require(conditioning.nu0, "nu0")?)
    }

    fn method(&self) -> LaplaceMethod {
        match self.form {
            TransformForm::Exact => LaplaceMethod::ExactSum,
            TransformForm::Limit => LaplaceMethod::PoissonLimit,
        }
    }
}

/// Intra-cluster transform with every interferer distance drawn i.i.d.
/// from Rayleigh(2σ²), ignoring the shared cluster center.
#[derive(Debug, Clone)]
pub struct IntraIidApprox<T> {
    variance: T,
    alpha: T,
    mean: T,
    spec: QuadratureSpec<T>,
}

impl<T: Real> IntraIidApprox<T> {
    pub fn new(params: &NetworkParams<T>) -> Result<Self> {
        Ok(Self {
            variance: T::lit(2.0) * params.sigma_sq(),
            alpha: params.alpha,
            mean: intra_mean(params)?,
            spec: inner_spec(),
        })
    }

    pub fn with_spec(mut self, spec: QuadratureSpec<T>) -> Self {
        self.spec = spec;
        self
    }

    pub fn at(&self, s: T) -> Result<T> {
        check_s(s)?;
        let (lo, hi) = Density::Rayleigh {
            variance: self.variance,
        }
        .effective_support();
        let j = kernel_integral(
            |w| rayleigh_density(w, self.variance),
            s,
            self.alpha,
            lo,
            hi,
            &self.spec,
        )?;
        Ok((-self.mean * j).exp())
    }
}

impl<T: Real> LaplaceEvaluator<T> for IntraIidApprox<T> {
    fn evaluate(&self, s: T, _: &Conditioning<T>) -> Result<T> {
        self.at(s)
    }

    fn method(&self) -> LaplaceMethod {
        LaplaceMethod::IidApprox
    }
}

/// `exp(−((m̄−1)/4σ²)·s^{2/α}·sinc_factor(α))`.
#[derive(Debug, Clone, Copy)]
pub struct IntraLowerBound<T> {
    coefficient: T,
    exponent: T,
}

impl<T: Real> IntraLowerBound<T> {
    pub fn new(params: &NetworkParams<T>) -> Result<Self> {
        let sinc = sinc_factor(params.alpha)?;
        Ok(Self {
            coefficient: intra_mean(params)? / (T::lit(4.0) * params.sigma_sq()) * sinc,
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

impl<T: Real> LaplaceEvaluator<T> for IntraLowerBound<T> {
    fn evaluate(&self, s: T, _: &Conditioning<T>) -> Result<T> {
        self.at(s)
    }

    fn method(&self) -> LaplaceMethod {
        LaplaceMethod::LowerBound
    }
}
