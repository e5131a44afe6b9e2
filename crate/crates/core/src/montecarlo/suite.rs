//! KS comparison of every analytical distance distribution against the
//! simulator.

use serde::Serialize;

use super::distances::{ks_against, simulate_distance_distribution, DistanceKind, DistanceSample};
use super::SimulationConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    cluster_center_distance_pdf, inter_member_pdf, marginal_serving_pdf, serving_pdf,
    truncated_interferer_pdfs, ContentStrategy, NetworkParams,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub distribution: String,
    /// Conditioning bin `[lo, hi)`, or `None` when not conditioned.
    pub bin: Option<(f64, f64)>,
    pub samples: usize,
    /// `None` when the bin could not be filled and was skipped.
    pub ks: Option<f64>,
}

/// Rank used for the k-closest entries of the suite.
const SUITE_RANK: usize = 5;

fn nu0_tertiles(sigma: f64) -> Vec<(f64, f64)> {
    // Rayleigh(σ²) quantiles at 1/3 and 2/3.
    let q = |p: f64| sigma * (-2.0 * (1.0 - p).ln()).sqrt();
    vec![
        (0.0, q(1.0 / 3.0)),
        (q(1.0 / 3.0), q(2.0 / 3.0)),
        (q(2.0 / 3.0), f64::INFINITY),
    ]
}

fn nu_bins(sigma: f64) -> Vec<(f64, f64)> {
    vec![
        (sigma, 4.0 * sigma),
        (6.0 * sigma, 10.0 * sigma),
        (15.0 * sigma, 20.0 * sigma),
    ]
}

/// Runs every distance distribution with `per_bin` samples in each bin.
/// Conditioned distributions use three bins. The k-closest entries use rank
/// 5, or `M` when `M < 5`.
pub fn distance_suite(
    params: &NetworkParams<f64>,
    cfg: &SimulationConfig,
    per_bin: usize,
) -> Result<Vec<KsReport>> {
    let sigma = params.sigma;
    let kclosest = ContentStrategy::KClosest {
        k: SUITE_RANK.min(params.max_transmitters),
    };
    // Every bin lies within 20σ, so the smallest admissible window suffices.
    let budget = cfg
        .with_trials(cfg.trials.max(200 * per_bin as u64))
        .with_half_side(SimulationConfig::min_half_side(params));
    let unbounded = [(0.0, f64::INFINITY)];
    let mut reports = Vec::new();

    let mut run = |name: &str,
                   strategy: ContentStrategy,
                   kind: DistanceKind,
                   bins: &[(f64, f64)],
                   cdf: &dyn Fn(&DistanceSample) -> Result<f64>|
     -> Result<()> {
        let drawn = simulate_distance_distribution(params, strategy, kind, &budget, bins, per_bin)?;
        for bin in drawn.bins {
            let ks = if bin.sufficient {
                Some(ks_against(&bin.samples, cdf)?)
            } else {
                log::warn!(
                    "{name}: bin [{}, {}) has only {} samples, skipped",
                    bin.lo,
                    bin.hi,
                    bin.samples.len()
                );
                None
            };
            reports.push(KsReport {
                distribution: name.to_string(),
                bin: (bins.len() > 1 || bin.hi.is_finite() || bin.lo > 0.0)
                    .then_some((bin.lo, bin.hi)),
                samples: bin.samples.len(),
                ks,
            });
        }
        Ok(())
    };

    let nu0 = |s: &DistanceSample| {
        s.conditioning
            .nu0
            .ok_or_else(|| Error::domain("sample lacks nu0"))
    };
    let r = |s: &DistanceSample| {
        s.conditioning
            .r
            .ok_or_else(|| Error::domain("sample lacks r"))
    };

    let center = cluster_center_distance_pdf(params);
    run(
        "cluster-center",
        ContentStrategy::Uniform,
        DistanceKind::ClusterCenter,
        &unbounded,
        &|s| Ok(center.cdf(s.value)),
    )?;

    let marginal = marginal_serving_pdf(params, ContentStrategy::Uniform)?;
    run(
        "serving-uniform-marginal",
        ContentStrategy::Uniform,
        DistanceKind::Serving,
        &unbounded,
        &|s| Ok(marginal.cdf(s.value)),
    )?;

    let tertiles = nu0_tertiles(sigma);
    run(
        "serving-uniform|nu0",
        ContentStrategy::Uniform,
        DistanceKind::Serving,
        &tertiles,
        &|s| Ok(serving_pdf(params, ContentStrategy::Uniform, nu0(s)?)?.cdf(s.value)),
    )?;
    run(
        "serving-kclosest|nu0",
        kclosest,
        DistanceKind::Serving,
        &tertiles,
        &|s| Ok(serving_pdf(params, kclosest, nu0(s)?)?.cdf(s.value)),
    )?;
    run(
        "intra-in|nu0,r",
        kclosest,
        DistanceKind::IntraIn,
        &tertiles,
        &|s| {
            Ok(truncated_interferer_pdfs(params, nu0(s)?, r(s)?)?
                .0
                .cdf(s.value))
        },
    )?;
    run(
        "intra-out|nu0,r",
        kclosest,
        DistanceKind::IntraOut,
        &tertiles,
        &|s| {
            Ok(truncated_interferer_pdfs(params, nu0(s)?, r(s)?)?
                .1
                .cdf(s.value))
        },
    )?;

    if params.lambda_c > 0.0 {
        let nu = |s: &DistanceSample| {
            s.conditioning
                .nu
                .ok_or_else(|| Error::domain("sample lacks nu"))
        };
        run(
            "inter|nu",
            ContentStrategy::Uniform,
            DistanceKind::Inter,
            &nu_bins(sigma),
            &|s| Ok(inter_member_pdf(params, nu(s)?)?.cdf(s.value)),
        )?;
    }
    Ok(reports)
}
