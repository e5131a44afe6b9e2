use rayon::prelude::*;

use super::sampler::{norm, Sampler};
use super::SimulationConfig;
use crate::error::{Error, Result};
use crate::geometry::{Conditioning, ContentStrategy, NetworkParams};

/// Which distance to collect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// Typical device to its own cluster center. Not conditioned.
    ClusterCenter,
    /// Serving distance, binned on `ν0`.
    Serving,
    /// Possible transmitters of the own cluster closer than the serving
    /// device, binned on `ν0`; samples carry `ν0` and `r`.
    IntraIn,
    /// As [`DistanceKind::IntraIn`] for transmitters farther than the
    /// serving device.
    IntraOut,
    /// Members of interfering clusters, binned on the center distance `ν`.
    Inter,
}

impl DistanceKind {
    fn needs_clusters(&self) -> bool {
        matches!(self, DistanceKind::Inter)
    }

    fn binned_on(&self, c: &Conditioning<f64>) -> f64 {
        match self {
            DistanceKind::ClusterCenter => 0.0,
            DistanceKind::Inter => c.nu.unwrap_or(0.0),
            _ => c.nu0.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSample {
    pub value: f64,
    pub conditioning: Conditioning<f64>,
}

/// Samples whose conditioning variable falls in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningBin {
    pub lo: f64,
    pub hi: f64,
    pub samples: Vec<DistanceSample>,
    /// False when the trial budget ran out before the bin was filled. Such
    /// bins should be skipped.
    pub sufficient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSamples {
    pub kind: DistanceKind,
    pub strategy: ContentStrategy,
    pub bins: Vec<ConditioningBin>,
    pub trials_used: u64,
}

/// Sorted sample with its step cdf.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { sorted: values }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Kolmogorov–Smirnov distance to a continuous cdf.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
            let f = cdf(x);
            d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
    }
}

/// KS distance between conditioned samples and a conditional cdf.
///
/// Each sample is mapped through the cdf at its own conditioning values. If
/// the cdf is right the images are Uniform(0, 1), so the statistic is the KS
/// distance of the images to the uniform cdf. This is exact for any bin
/// width.
pub fn ks_against<F>(samples: &[DistanceSample], cdf: F) -> Result<f64>
where
    F: Fn(&DistanceSample) -> Result<f64>,
{
    let images = samples.iter().map(cdf).collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalCdf::new(images).ks_distance(|u| u.clamp(0.0, 1.0)))
}

const CHUNK: u64 = 8192;

/// Collects up to `per_bin` samples of `which` in each conditioning bin,
/// running at most `cfg.trials` trials. Samples are taken in trial order,
/// so the result does not depend on the thread count.
pub fn simulate_distance_distribution(
    params: &NetworkParams<f64>,
    strategy: ContentStrategy,
    which: DistanceKind,
    cfg: &SimulationConfig,
    bins: &[(f64, f64)],
    per_bin: usize,
) -> Result<DistanceSamples> {
    if bins.is_empty() || per_bin == 0 {
        return Err(Error::domain(
            "need at least one bin and a positive per-bin count",
        ));
    }
    if bins.iter().any(|&(lo, hi)| !(lo < hi)) {
        return Err(Error::domain("every bin needs lo < hi"));
    }
    let cfg = cfg.with_strategy(strategy);
    let sampler = Sampler::new(params, &cfg)?;
    let mut out: Vec<ConditioningBin> = bins
        .iter()
        .map(|&(lo, hi)| ConditioningBin {
            lo,
            hi,
            samples: Vec::new(),
            sufficient: false,
        })
        .collect();
    let mut next = 0u64;
    while next < cfg.trials && out.iter().any(|b| b.samples.len() < per_bin) {
        let end = (next + CHUNK).min(cfg.trials);
        let draws: Vec<Vec<DistanceSample>> = (next..end)
            .into_par_iter()
            .map(|t| trial_samples(&sampler, which, t))
            .collect();
        for s in draws.into_iter().flatten() {
            let key = which.binned_on(&s.conditioning);
            if let Some(bin) = out.iter_mut().find(|b| key >= b.lo && key < b.hi) {
                if bin.samples.len() < per_bin {
                    bin.samples.push(s);
                }
            }
        }
        next = end;
    }
    for bin in &mut out {
        bin.sufficient = bin.samples.len() >= per_bin;
    }
    Ok(DistanceSamples {
        kind: which,
        strategy,
        bins: out,
        trials_used: next,
    })
}

fn trial_samples(sampler: &Sampler<'_>, which: DistanceKind, trial: u64) -> Vec<DistanceSample> {
    let mut out = Vec::new();
    if which.needs_clusters() {
        sampler.for_each_cluster(trial, |c| {
            let conditioning = Conditioning {
                nu: Some(norm(c.center)),
                ..Conditioning::default()
            };
            out.extend(c.members.iter().map(|&p| DistanceSample {
                value: norm(p),
                conditioning,
            }));
        });
        return out;
    }
    let rep = sampler.representative(trial);
    let nu0 = norm(rep.center);
    let r = norm(rep.members[rep.serving]);
    match which {
        DistanceKind::ClusterCenter => out.push(DistanceSample {
            value: nu0,
            conditioning: Conditioning::default(),
        }),
        DistanceKind::Serving => out.push(DistanceSample {
            value: r,
            conditioning: Conditioning {
                nu0: Some(nu0),
                ..Conditioning::default()
            },
        }),
        DistanceKind::IntraIn | DistanceKind::IntraOut => {
            let conditioning = Conditioning {
                nu0: Some(nu0),
                r: Some(r),
                ..Conditioning::default()
            };
            let inner = which == DistanceKind::IntraIn;
            out.extend(
                rep.transmitters
                    .iter()
                    .filter(|&&i| i != rep.serving)
                    .map(|&i| norm(rep.members[i]))
                    .filter(|&d| if inner { d < r } else { d > r })
                    .map(|value| DistanceSample {
                        value,
                        conditioning,
                    }),
            );
        }
        DistanceKind::Inter => unreachable!(),
    }
    out
}
