use super::{CoverageMethod, CoverageOptions, CoverageResult};
use crate::error::{Error, Result};
use crate::geometry::{
    marginal_serving_pdf, rayleigh_density, rician_density, serving_pdf, ContentStrategy,
    NetworkParams,
};
use crate::interference::{
    InterCluster, IntraIidApprox, IntraKClosest, IntraUniform, TransformForm,
};
use crate::mathkernel::{sinc_factor, try_integrate, Upper};
use crate::scalar::Real;

/// Upper end of the serving-distance integral: beyond it the `k`-th order
/// statistic of `M` Rayleigh(2σ²) distances carries less than `1e-14`.
fn serving_cutoff<T: Real>(params: &NetworkParams<T>) -> T {
    let m = T::from_usize_lossy(params.max_transmitters);
    T::lit(2.0) * params.sigma * (m.ln() + T::lit(1e14).ln()).sqrt()
}

/// The ν0 integral stops at `8σ`, where the Rayleigh(σ²) tail is about `1e-14`.
fn center_cutoff<T: Real>(params: &NetworkParams<T>) -> T {
    T::lit(8.0) * params.sigma
}

fn result<T: Real>(
    value: T,
    method: CoverageMethod,
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
) -> CoverageResult<T> {
    CoverageResult {
        value: value.max(T::zero()).min(T::one()),
        method,
        params: *params,
        strategy,
    }
}

/// `∫ dr L_inter(s(r)) ∫ dν0 L_intra(s(r)|r, ν0)·f_R(r|ν0)·f_V0(ν0)` with
/// `s(r) = β·r^α`. The r integral is outermost so the inter-cluster
/// transform, which does not depend on ν0, is evaluated once per node.
fn conditioned_double_integral<T, W, L>(
    params: &NetworkParams<T>,
    options: &CoverageOptions<T>,
    serving_weight: W,
    intra: L,
) -> Result<T>
where
    T: Real,
    W: Fn(T, T) -> Result<T>,
    L: Fn(T, T, T) -> Result<T>,
{
    let inter =
        InterCluster::new(params, options.inter_form)?.with_specs(options.kernel, options.outer);
    let sigma_sq = params.sigma_sq();
    let outer = |r: T| -> Result<T> {
        if r <= T::zero() {
            return Ok(T::zero());
        }
        let s = params.beta * r.powf(params.alpha);
        let l_inter = inter.at(s)?;
        if l_inter == T::zero() {
            return Ok(T::zero());
        }
        let inner = |nu0: T| -> Result<T> {
            let w = serving_weight(r, nu0)? * rayleigh_density(nu0, sigma_sq);
            if w == T::zero() {
                return Ok(T::zero());
            }
            Ok(w * intra(s, r, nu0)?)
        };
        let inner = try_integrate(
            inner,
            T::zero(),
            Upper::Finite(center_cutoff(params)),
            &options.inner,
        )?;
        Ok(l_inter * inner)
    };
    try_integrate(
        outer,
        T::zero(),
        Upper::Finite(serving_cutoff(params)),
        &options.outer,
    )
}

/// `∫ L_inter(s(r))·L_iid(s(r))·f(r) dr` for an unconditioned serving pdf.
fn unconditioned_integral<T, F>(
    params: &NetworkParams<T>,
    options: &CoverageOptions<T>,
    serving: F,
) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let inter =
        InterCluster::new(params, options.inter_form)?.with_specs(options.kernel, options.outer);
    let intra = IntraIidApprox::new(params)?.with_spec(options.kernel);
    let integrand = |r: T| -> Result<T> {
        let f = serving(r);
        if f == T::zero() {
            return Ok(T::zero());
        }
        let s = params.beta * r.powf(params.alpha);
        Ok(f * inter.at(s)? * intra.at(s)?)
    };
    try_integrate(
        integrand,
        T::zero(),
        Upper::Finite(serving_cutoff(params)),
        &options.outer,
    )
}

/// Uniform content, exact double integral over the serving distance and
/// the cluster-center distance.
pub fn coverage_uniform_exact<T: Real>(params: &NetworkParams<T>) -> Result<CoverageResult<T>> {
    coverage_uniform_exact_with(params, &CoverageOptions::default())
}

pub fn coverage_uniform_exact_with<T: Real>(
    params: &NetworkParams<T>,
    options: &CoverageOptions<T>,
) -> Result<CoverageResult<T>> {
    params.validate()?;
    let intra = IntraUniform::new(params, options.intra_form)?.with_spec(options.kernel);
    let sigma_sq = params.sigma_sq();
    let value = conditioned_double_integral(
        params,
        options,
        |r, nu0| Ok(rician_density(r, nu0, sigma_sq)),
        |s, _, nu0| intra.at(s, nu0),
    )?;
    Ok(result(
        value,
        CoverageMethod::Exact,
        params,
        ContentStrategy::Uniform,
    ))
}

/// Uniform content with i.i.d. Rayleigh(2σ²) intra-cluster distances: a
/// single integral over the serving distance.
pub fn coverage_uniform_approx<T: Real>(params: &NetworkParams<T>) -> Result<CoverageResult<T>> {
    coverage_uniform_approx_with(params, &CoverageOptions::default())
}

pub fn coverage_uniform_approx_with<T: Real>(
    params: &NetworkParams<T>,
    options: &CoverageOptions<T>,
) -> Result<CoverageResult<T>> {
    params.validate()?;
    let variance = T::lit(2.0) * params.sigma_sq();
    let value = unconditioned_integral(params, options, |r| rayleigh_density(r, variance))?;
    Ok(result(
        value,
        CoverageMethod::IidApprox,
        params,
        ContentStrategy::Uniform,
    ))
}

/// `1 / ((4πλ_cσ²m̄ + m̄ − 1)·β^{2/α}·sinc_factor(α) + 1)`.
pub fn coverage_closed_form<T: Real>(params: &NetworkParams<T>) -> Result<CoverageResult<T>> {
    params.validate()?;
    let sinc = sinc_factor(params.alpha)?;
    let load = T::lit(4.0) * T::PI() * params.lambda_c * params.sigma_sq() * params.m_bar
        + params.m_bar
        - T::one();
    let value = T::one() / (load * params.beta.powf(T::lit(2.0) / params.alpha) * sinc + T::one());
    Ok(result(
        value,
        CoverageMethod::ClosedForm,
        params,
        ContentStrategy::Uniform,
    ))
}

fn kclosest_strategy<T: Real>(params: &NetworkParams<T>, k: usize) -> Result<ContentStrategy> {
    params.validate()?;
    let strategy = ContentStrategy::KClosest { k };
    strategy.validate(params.max_transmitters)?;
    Ok(strategy)
}

/// Ordered serving pdf `f_R(r|ν0)` for the `k`-th closest transmitter.
fn ordered_weight<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
) -> impl Fn(T, T) -> Result<T> + '_ {
    move |r, nu0| Ok(serving_pdf(params, strategy, nu0)?.pdf(r))
}

/// k-closest content, exact double integral.
pub fn coverage_kclosest_exact<T: Real>(
    params: &NetworkParams<T>,
    k: usize,
) -> Result<CoverageResult<T>> {
    coverage_kclosest_exact_with(params, k, &CoverageOptions::default())
}

/// The intra-cluster transform is always the exact double sum here; the
/// options select only the inter-cluster form and the tolerances.
pub fn coverage_kclosest_exact_with<T: Real>(
    params: &NetworkParams<T>,
    k: usize,
    options: &CoverageOptions<T>,
) -> Result<CoverageResult<T>> {
    let strategy = kclosest_strategy(params, k)?;
    let intra = IntraKClosest::new(params, k, TransformForm::Exact)?.with_spec(options.kernel);
    let value = conditioned_double_integral(
        params,
        options,
        ordered_weight(params, strategy),
        |s, r, nu0| {
            match intra.at(s, r, nu0) {
                // The truncation is degenerate only where the serving distance
                // sits in a tail of mass below M·1e-12; that sliver is dropped.
                Err(Error::DegenerateTruncation { .. }) => Ok(T::zero()),
                other => other,
            }
        },
    )?;
    Ok(result(
        value,
        CoverageMethod::KClosestExact,
        params,
        strategy,
    ))
}

/// k-closest content approximations.
///
/// Variant 1 keeps the ordered, ν0-conditioned serving pdf but uses the
/// uniform-content intra transform (limit form). Variant 2 additionally
/// drops the ν0 conditioning: the serving pdf is the `k`-th order statistic
/// of `M` Rayleigh(2σ²) draws and the intra transform is the i.i.d. one.
pub fn coverage_kclosest_approx<T: Real>(
    params: &NetworkParams<T>,
    k: usize,
    variant: u8,
) -> Result<CoverageResult<T>> {
    coverage_kclosest_approx_with(params, k, variant, &CoverageOptions::default())
}

pub fn coverage_kclosest_approx_with<T: Real>(
    params: &NetworkParams<T>,
    k: usize,
    variant: u8,
    options: &CoverageOptions<T>,
) -> Result<CoverageResult<T>> {
    let strategy = kclosest_strategy(params, k)?;
    match variant {
        1 => {
            let intra = IntraUniform::new(params, TransformForm::Limit)?.with_spec(options.kernel);
            let value = conditioned_double_integral(
                params,
                options,
                ordered_weight(params, strategy),
                |s, _, nu0| intra.at(s, nu0),
            )?;
            Ok(result(
                value,
                CoverageMethod::KClosestApprox1,
                params,
                strategy,
            ))
        }
        2 => {
            let serving = marginal_serving_pdf(params, strategy)?;
            let value = unconditioned_integral(params, options, |r| serving.pdf(r))?;
            Ok(result(
                value,
                CoverageMethod::KClosestApprox2,
                params,
                strategy,
            ))
        }
        other => Err(Error::domain(format!(
            "k-closest approximation variant must be 1 or 2, got {other}"
        ))),
    }
}

/// Dispatches to the coverage routine named by `method`.
pub fn coverage<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
    method: CoverageMethod,
    options: &CoverageOptions<T>,
) -> Result<CoverageResult<T>> {
    use CoverageMethod::*;
    match (strategy, method) {
        (ContentStrategy::Uniform, Exact) => coverage_uniform_exact_with(params, options),
        (ContentStrategy::Uniform, IidApprox) => coverage_uniform_approx_with(params, options),
        (ContentStrategy::Uniform, ClosedForm) => coverage_closed_form(params),
        (ContentStrategy::KClosest { k }, KClosestExact) => {
            coverage_kclosest_exact_with(params, k, options)
        }
        (ContentStrategy::KClosest { k }, KClosestApprox1) => {
            coverage_kclosest_approx_with(params, k, 1, options)
        }
        (ContentStrategy::KClosest { k }, KClosestApprox2) => {
            coverage_kclosest_approx_with(params, k, 2, options)
        }
        (strategy, method) => Err(Error::Unsupported(format!(
            "coverage method {method} does not apply to {} content",
            strategy.label()
        ))),
    }
}
