use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::sampler::{norm, Sampler};
use super::{path_gain, SimulationConfig};
use crate::error::Result;
use crate::geometry::NetworkParams;

/// What one trial contributes, without the realization itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub serving_distance: f64,
    pub nu0: f64,
    pub signal: f64,
    pub intra: f64,
    pub inter: f64,
}

impl TrialOutcome {
    pub fn interference(&self) -> f64 {
        self.intra + self.inter
    }

    /// `SIR > β`. With no interference the SIR is infinite.
    pub fn covered(&self, beta: f64) -> bool {
        self.signal > beta * self.interference()
    }
}

/// Monte Carlo coverage estimate with a Wald interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub p_hat: f64,
    pub ci_half_width: f64,
    pub std_error: f64,
    pub successes: u64,
    pub trials: u64,
}

/// Evaluates trial `trial_index`. Sums run in the same order as the
/// accessors of [`super::NetworkRealization`], so both agree bit for bit.
pub fn trial_outcome(
    params: &NetworkParams<f64>,
    cfg: &SimulationConfig,
    trial_index: u64,
) -> Result<TrialOutcome> {
    let sampler = Sampler::new(params, cfg)?;
    Ok(outcome(&sampler, params.alpha, trial_index))
}

fn outcome(sampler: &Sampler<'_>, alpha: f64, trial: u64) -> TrialOutcome {
    let rep = sampler.representative(trial);
    let serving = rep.members[rep.serving];
    let intra = rep
        .interferers
        .iter()
        .zip(&rep.interferer_fading)
        .fold(0.0, |acc, (&i, &h)| {
            acc + h * path_gain(rep.members[i], alpha)
        });
    let mut inter = 0.0;
    sampler.for_each_cluster(trial, |c| {
        inter += c.active.iter().zip(c.fading).fold(0.0, |acc, (&i, &h)| {
            acc + h * path_gain(c.members[i], alpha)
        });
    });
    TrialOutcome {
        serving_distance: norm(serving),
        nu0: norm(rep.center),
        signal: rep.serving_fading * path_gain(serving, alpha),
        intra,
        inter,
    }
}

/// Fraction of `cfg.trials` trials with `SIR > β`. Trials run in parallel;
/// the success count is an integer sum, so the estimate does not depend on
/// the thread count.
pub fn simulate_coverage(
    params: &NetworkParams<f64>,
    cfg: &SimulationConfig,
) -> Result<CoverageEstimate> {
    let sampler = Sampler::new(params, cfg)?;
    let successes: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|t| outcome(&sampler, params.alpha, t).covered(params.beta) as u64)
        .sum();
    let n = cfg.trials as f64;
    let p_hat = successes as f64 / n;
    let std_error = (p_hat * (1.0 - p_hat) / n).sqrt();
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + 0.5 * cfg.confidence_level);
    Ok(CoverageEstimate {
        p_hat,
        ci_half_width: z * std_error,
        std_error,
        successes,
        trials: cfg.trials,
    })
}
