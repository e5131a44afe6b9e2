use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use super::rng::{stream, tile_key, Domain, TrialRng};
use super::{SamplingMode, SimulationConfig};
use crate::error::{Error, Result};
use crate::geometry::{ContentStrategy, NetworkParams};

pub type Point = [f64; 2];

/// Side of the square tiles on which cluster centers are generated.
pub(crate) const TILE: f64 = 250.0;

/// Poisson(`mean`) conditioned on `≤ cap`, drawn by rejection.
#[derive(Debug, Clone)]
pub struct TruncatedPoisson {
    inner: Option<Poisson<f64>>,
    cap: usize,
}

impl TruncatedPoisson {
    pub fn new(mean: f64, cap: usize) -> Result<Self> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::domain(format!(
                "Poisson mean must be nonnegative, got {mean}"
            )));
        }
        // Rejection needs a reasonable acceptance rate.
        if mean > 0.0 && mean > cap as f64 + 8.0 * (cap as f64 + 1.0).sqrt() + 20.0 {
            return Err(Error::domain(format!(
                "Poisson mean {mean} is too far above the cap {cap} for rejection sampling"
            )));
        }
        let inner = if mean > 0.0 {
            Some(Poisson::new(mean).map_err(|e| Error::domain(e.to_string()))?)
        } else {
            None
        };
        Ok(Self { inner, cap })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let Some(d) = &self.inner else { return 0 };
        loop {
            let n = d.sample(rng) as usize;
            if n <= self.cap {
                return n;
            }
        }
    }
}

fn gaussian_around<R: Rng + ?Sized>(rng: &mut R, center: Point, sigma: f64) -> Point {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    [center[0] + sigma * x, center[1] + sigma * y]
}

pub(crate) fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

/// The typical device's own cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Representative {
    pub center: Point,
    /// Member positions other than the typical device. In
    /// [`SamplingMode::ActiveOnly`] only the `M` transmitters are drawn.
    pub members: Vec<Point>,
    /// Indices into `members` of the `M` possible transmitters.
    pub transmitters: Vec<usize>,
    /// Index into `members` of the serving transmitter.
    pub serving: usize,
    /// Indices into `members` of the active intra-cluster interferers.
    pub interferers: Vec<usize>,
    pub serving_fading: f64,
    pub interferer_fading: Vec<f64>,
}

/// One interfering cluster, borrowed from the sampler's buffers.
#[derive(Debug)]
pub struct ClusterDraw<'a> {
    pub center: Point,
    pub members: &'a [Point],
    /// Indices into `members` of the cluster's possible transmitters.
    pub transmitters: &'a [usize],
    /// Indices into `members` of the active transmitters.
    pub active: &'a [usize],
    pub fading: &'a [f64],
}

pub(crate) struct Sampler<'a> {
    params: &'a NetworkParams<f64>,
    cfg: &'a SimulationConfig,
    intra_count: TruncatedPoisson,
    inter_count: TruncatedPoisson,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(params: &'a NetworkParams<f64>, cfg: &'a SimulationConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate(params)?;
        if params.m_bar < 1.0 {
            return Err(Error::domain(format!(
                "m_bar = {} < 1 leaves no serving transmitter",
                params.m_bar
            )));
        }
        Ok(Self {
            params,
            cfg,
            intra_count: TruncatedPoisson::new(params.m_bar - 1.0, params.max_transmitters - 1)?,
            inter_count: TruncatedPoisson::new(params.m_bar, params.max_transmitters)?,
        })
    }

    pub(crate) fn representative(&self, trial: u64) -> Representative {
        let p = self.params;
        let m = p.max_transmitters;
        let sigma = p.sigma;
        let mut rng = stream(self.cfg.seed, trial, Domain::Representative, 0, 0);
        // The typical device sits at the origin, so its cluster center is a
        // Gaussian offset from it.
        let center = gaussian_around(&mut rng, [0.0, 0.0], sigma);
        let (members, transmitters) = match self.cfg.sampling {
            SamplingMode::ActiveOnly => {
                let members: Vec<Point> = (0..m)
                    .map(|_| gaussian_around(&mut rng, center, sigma))
                    .collect();
                (members, (0..m).collect::<Vec<_>>())
            }
            SamplingMode::Full => {
                // The other N − 1 members; M of them transmit, the rest
                // (with the typical device) receive.
                let others = p.devices_per_cluster - 1;
                let members: Vec<Point> = (0..others)
                    .map(|_| gaussian_around(&mut rng, center, sigma))
                    .collect();
                let mut tx = sample_indices(&mut rng, others, m).into_vec();
                tx.sort_unstable();
                (members, tx)
            }
        };
        let serving_slot = match self.cfg.strategy {
            ContentStrategy::Uniform => rng.random_range(0..m),
            ContentStrategy::KClosest { k } => {
                let mut order: Vec<usize> = (0..m).collect();
                // Stable sort: exact ties keep index order.
                order.sort_by(|&a, &b| {
                    norm(members[transmitters[a]]).total_cmp(&norm(members[transmitters[b]]))
                });
                order[k - 1]
            }
        };
        let n = self.intra_count.sample(&mut rng);
        let interferers: Vec<usize> = sample_indices(&mut rng, m - 1, n)
            .into_iter()
            .map(|i| transmitters[if i >= serving_slot { i + 1 } else { i }])
            .collect();
        let serving = transmitters[serving_slot];
        let serving_fading: f64 = rng.sample(Exp1);
        let interferer_fading: Vec<f64> = (0..n).map(|_| rng.sample(Exp1)).collect();
        Representative {
            center,
            members,
            transmitters,
            serving,
            interferers,
            serving_fading,
            interferer_fading,
        }
    }

    /// Calls `visit` for every interfering cluster whose center falls in the
    /// window, in a fixed tile-major order.
    pub(crate) fn for_each_cluster<F: FnMut(ClusterDraw<'_>)>(&self, trial: u64, mut visit: F) {
        let p = self.params;
        let h = self.cfg.region_half_side;
        if p.lambda_c == 0.0 {
            return;
        }
        let per_tile = Poisson::new(p.lambda_c * TILE * TILE).expect("positive tile mean");
        let lo = (-h / TILE).floor() as i64;
        let hi = (h / TILE).floor() as i64;
        let mut members: Vec<Point> = Vec::new();
        let mut transmitters: Vec<usize> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut fading: Vec<f64> = Vec::new();
        for ix in lo..=hi {
            for iy in lo..=hi {
                let tile = tile_key(ix, iy);
                let mut rng = stream(self.cfg.seed, trial, Domain::Tile, 0, tile);
                let count = per_tile.sample(&mut rng) as u64;
                for _ in 0..count {
                    let center = [
                        (ix as f64 + rng.random::<f64>()) * TILE,
                        (iy as f64 + rng.random::<f64>()) * TILE,
                    ];
                    // Clusters outside the window are still drawn so that the
                    // tile stream stays aligned across window sizes.
                    self.fill_cluster(
                        &mut rng,
                        center,
                        &mut members,
                        &mut transmitters,
                        &mut active,
                        &mut fading,
                    );
                    if center[0].abs() > h || center[1].abs() > h {
                        continue;
                    }
                    visit(ClusterDraw {
                        center,
                        members: &members,
                        transmitters: &transmitters,
                        active: &active,
                        fading: &fading,
                    });
                }
            }
        }
    }

    fn fill_cluster(
        &self,
        rng: &mut TrialRng,
        center: Point,
        members: &mut Vec<Point>,
        transmitters: &mut Vec<usize>,
        active: &mut Vec<usize>,
        fading: &mut Vec<f64>,
    ) {
        let p = self.params;
        let m = p.max_transmitters;
        members.clear();
        transmitters.clear();
        active.clear();
        fading.clear();
        let a = self.inter_count.sample(rng);
        match self.cfg.sampling {
            SamplingMode::ActiveOnly => {
                members.extend((0..a).map(|_| gaussian_around(rng, center, p.sigma)));
                transmitters.extend(0..a);
                active.extend(0..a);
            }
            SamplingMode::Full => {
                let n = p.devices_per_cluster;
                members.extend((0..n).map(|_| gaussian_around(rng, center, p.sigma)));
                transmitters.extend(sample_indices(rng, n, m));
                transmitters.sort_unstable();
                active.extend(
                    sample_indices(rng, m, a)
                        .into_iter()
                        .map(|i| transmitters[i]),
                );
            }
        }
        fading.extend((0..a).map(|_| rng.sample::<f64, _>(Exp1)));
    }
}
