use super::sampler::{Point, Sampler};
use super::{path_gain, SimulationConfig};
use crate::error::Result;
use crate::geometry::NetworkParams;

/// One complete draw of the network around the typical device.
///
/// Cluster 0 is the typical device's own cluster. Its first device is the
/// typical device itself, at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub cluster_centers: Vec<Point>,
    pub devices: Vec<Vec<Point>>,
    /// Per cluster, indices into `devices` of the possible transmitters.
    pub transmitters: Vec<Vec<usize>>,
    pub representative_center: Point,
    /// Index into `devices[0]` of the serving transmitter.
    pub serving_index: usize,
    /// Per cluster, indices into `devices` of the active interferers. The
    /// serving device is not included.
    pub active_tx: Vec<Vec<usize>>,
    /// Per cluster, fading of each link in `active_tx`, in the same order.
    pub fading: Vec<Vec<f64>>,
    pub serving_fading: f64,
}

impl NetworkRealization {
    pub fn serving_distance(&self) -> f64 {
        let p = self.devices[0][self.serving_index];
        p[0].hypot(p[1])
    }

    pub fn signal(&self, alpha: f64) -> f64 {
        self.serving_fading * path_gain(self.devices[0][self.serving_index], alpha)
    }

    fn cluster_interference(&self, c: usize, alpha: f64) -> f64 {
        self.active_tx[c]
            .iter()
            .zip(&self.fading[c])
            .fold(0.0, |acc, (&i, &h)| {
                acc + h * path_gain(self.devices[c][i], alpha)
            })
    }

    /// Interference from the typical device's own cluster.
    pub fn intra_interference(&self, alpha: f64) -> f64 {
        self.cluster_interference(0, alpha)
    }

    /// Interference from every other cluster.
    pub fn inter_interference(&self, alpha: f64) -> f64 {
        (1..self.cluster_centers.len())
            .fold(0.0, |acc, c| acc + self.cluster_interference(c, alpha))
    }

    pub fn sir(&self, alpha: f64) -> f64 {
        self.signal(alpha) / (self.intra_interference(alpha) + self.inter_interference(alpha))
    }
}

/// Draws trial `trial_index` in full. [`super::simulate_coverage`] walks the
/// same random streams without materializing the realization.
pub fn sample_network(
    params: &NetworkParams<f64>,
    cfg: &SimulationConfig,
    trial_index: u64,
) -> Result<NetworkRealization> {
    let sampler = Sampler::new(params, cfg)?;
    let rep = sampler.representative(trial_index);
    let shift = |i: usize| i + 1;
    let mut own = Vec::with_capacity(rep.members.len() + 1);
    own.push([0.0, 0.0]);
    own.extend_from_slice(&rep.members);

    let mut out = NetworkRealization {
        cluster_centers: vec![rep.center],
        devices: vec![own],
        transmitters: vec![rep.transmitters.iter().copied().map(shift).collect()],
        representative_center: rep.center,
        serving_index: shift(rep.serving),
        active_tx: vec![rep.interferers.iter().copied().map(shift).collect()],
        fading: vec![rep.interferer_fading.clone()],
        serving_fading: rep.serving_fading,
    };
    sampler.for_each_cluster(trial_index, |c| {
        out.cluster_centers.push(c.center);
        out.devices.push(c.members.to_vec());
        out.transmitters.push(c.transmitters.to_vec());
        out.active_tx.push(c.active.to_vec());
        out.fading.push(c.fading.to_vec());
    });
    Ok(out)
}
