use super::counts::{int_pow, truncated_binomial_pmf, truncated_poisson_pmf};
use super::evaluator::{LaplaceEvaluator, LaplaceMethod};
use super::{check_s, inner_spec, intra_mean, kernel_integral, require, TransformForm};
use crate::error::{Error, Result};
use crate::geometry::{
    truncated_interferer_pdfs, ConditionalPdf, Conditioning, ContentStrategy, NetworkParams,
};
use crate::mathkernel::QuadratureSpec;
use crate::scalar::Real;

/// Coefficients `c[l][m]` of the k-closest intra-cluster transform viewed as
/// a polynomial `Σ c[l][m]·K_in^l·K_out^m` in the two truncated kernels.
///
/// `n ~ Poisson(m̄−1)` truncated to `n ≤ M−1` interferers are active; of
/// those, `l ~ Binomial(n, p)` truncated to `l ≤ min(n, k−1)` lie closer than
/// the serving device, with `p = (k−1)/(M−1)` (`p = 0` when `M = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct KClosestWeights<T> {
    rank: usize,
    count: usize,
    coeffs: Vec<Vec<T>>,
}

impl<T: Real> KClosestWeights<T> {
    pub fn new(rank: usize, count: usize, m_bar: T) -> Result<Self> {
        ContentStrategy::KClosest { k: rank }.validate(count)?;
        let mean = m_bar - T::one();
        let p_n = truncated_poisson_pmf(mean, count - 1)?;
        let p = if count == 1 {
            T::zero()
        } else {
            T::from_usize_lossy(rank - 1) / T::from_usize_lossy(count - 1)
        };
        let mut coeffs = vec![vec![T::zero(); count]; rank];
        for (n, &w_n) in p_n.iter().enumerate() {
            let cap = n.min(rank - 1);
            let split = truncated_binomial_pmf(n, p, cap)?;
            for (l, &w_l) in split.iter().enumerate() {
                coeffs[l][n - l] = coeffs[l][n - l] + w_n * w_l;
            }
        }
        Ok(Self {
            rank,
            count,
            coeffs,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Total weight, one up to rounding.
    pub fn total(&self) -> T {
        self.coeffs.iter().flatten().copied().sum()
    }

    pub fn evaluate(&self, k_in: T, k_out: T) -> T {
        let mut total = T::zero();
        for (l, row) in self.coeffs.iter().enumerate() {
            let inner = super::uniform::power_series(row, k_out);
            total = total + int_pow(k_in, l) * inner;
        }
        total
    }
}

/// Intra-cluster transform for k-closest content, conditioned on `ν0` and
/// the serving distance `r`.
#[derive(Debug, Clone)]
pub struct IntraKClosest<T> {
    params: NetworkParams<T>,
    rank: usize,
    form: TransformForm,
    weights: Option<KClosestWeights<T>>,
    spec: QuadratureSpec<T>,
}

impl<T: Real> IntraKClosest<T> {
    /// The limit form exists only for `k = 1` and `k = M`, and assumes
    /// `m̄ ≪ M`; a warning is logged when `m̄ > M/4`.
    pub fn new(params: &NetworkParams<T>, rank: usize, form: TransformForm) -> Result<Self> {
        let m = params.max_transmitters;
        ContentStrategy::KClosest { k: rank }.validate(m)?;
        intra_mean(params)?;
        let weights = match form {
            TransformForm::Exact => Some(KClosestWeights::new(rank, m, params.m_bar)?),
            TransformForm::Limit => {
                if rank != 1 && rank != m {
                    return Err(Error::Unsupported(format!(
                        "k-closest limit form exists only for k = 1 or k = M = {m}, got k = {rank}"
                    )));
                }
                if params.m_bar > T::from_usize_lossy(m) / T::lit(4.0) {
                    log::warn!(
                        "k-closest limit form assumes m_bar << M; m_bar = {}, M = {m}",
                        params.m_bar
                    );
                }
                None
            }
        };
        Ok(Self {
            params: *params,
            rank,
            form,
            weights,
            spec: inner_spec(),
        })
    }

    pub fn with_spec(mut self, spec: QuadratureSpec<T>) -> Self {
        self.spec = spec;
        self
    }

    /// `(J_in, J_out)`: the kernel averaged over an interferer closer than,
    /// resp. farther than, the serving device.
    pub fn masses(&self, s: T, r: T, nu0: T) -> Result<(T, T)> {
        check_s(s)?;
        let (inner, outer) = truncated_interferer_pdfs(&self.params, nu0, r)?;
        let alpha = self.params.alpha;
        let avg = |pdf: &ConditionalPdf<T>| -> Result<T> {
            let (lo, hi) = pdf.effective_support();
            let j = kernel_integral(|w| pdf.pdf(w), s, alpha, lo, hi, &self.spec)?;
            Ok(j.max(T::zero()).min(T::one()))
        };
        Ok((avg(&inner)?, avg(&outer)?))
    }

    pub fn at(&self, s: T, r: T, nu0: T) -> Result<T> {
        check_s(s)?;
        if s == T::zero() {
            return Ok(T::one());
        }
        let (j_in, j_out) = self.masses(s, r, nu0)?;
        let mean = self.params.m_bar - T::one();
        Ok(match &self.weights {
            Some(w) => w.evaluate(T::one() - j_in, T::one() - j_out),
            None if self.rank == 1 => (-mean * j_out).exp(),
            None => (-mean * j_in).exp(),
        })
    }
}

impl<T: Real> LaplaceEvaluator<T> for IntraKClosest<T> {
    fn evaluate(&self, s: T, conditioning: &Conditioning<T>) -> Result<T> {
        self.at(
            s,
            require(conditioning.r, "r")?,
            require(conditioning.nu0, "nu0")?,
        )
    }

    fn method(&self) -> LaplaceMethod {
        match self.form {
            TransformForm::Exact => LaplaceMethod::KClosestExact,
            TransformForm::Limit => LaplaceMethod::KClosestLimit,
        }
    }
}
