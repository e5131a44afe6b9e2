//! Distance distributions from the typical device (at the origin) to the
//! devices of its own cluster and of interfering clusters.
//!
//! Every Rayleigh/Rician call takes the variance parameter explicitly:
//! conditional member distances use `σ²`, while the marginal distance to a
//! random member of the typical device's own cluster uses `2σ²`.

mod density;
mod params;

pub use density::{rayleigh_density, rician_density, ConditionalPdf, Conditioning, Density};
pub use params::{
    db_to_linear, per_km2_to_per_m2, per_m2_to_per_km2, ContentStrategy, NetworkParams,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Truncation masses outside `[DEGENERATE_MASS, 1 − DEGENERATE_MASS]` are
/// rejected by [`truncated_interferer_pdfs`].
pub const DEGENERATE_MASS: f64 = 1e-12;

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

fn nonnegative<T: Real>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be nonnegative, got {v}"
        )))
    }
}

pub fn rayleigh_pdf<T: Real>(a: T, sigma_sq: T) -> Result<T> {
    positive("distance", a)?;
    positive("variance", sigma_sq)?;
    Ok(rayleigh_density(a, sigma_sq))
}

pub fn rician_pdf<T: Real>(a: T, b: T, sigma_sq: T) -> Result<T> {
    positive("distance", a)?;
    nonnegative("offset", b)?;
    positive("variance", sigma_sq)?;
    Ok(rician_density(a, b, sigma_sq))
}

/// Distance to a uniformly chosen member of the typical device's own
/// cluster, given the cluster-center distance `nu0`.
pub fn intra_member_pdf<T: Real>(params: &NetworkParams<T>, nu0: T) -> Result<ConditionalPdf<T>> {
    nonnegative("nu0", nu0)?;
    Ok(ConditionalPdf::new(
        Density::Rician {
            offset: nu0,
            variance: params.sigma_sq(),
        },
        Conditioning {
            nu0: Some(nu0),
            ..Conditioning::default()
        },
    ))
}

/// Distance to a member of an interfering cluster whose center lies `nu`
/// from the typical device.
pub fn inter_member_pdf<T: Real>(params: &NetworkParams<T>, nu: T) -> Result<ConditionalPdf<T>> {
    nonnegative("nu", nu)?;
    Ok(ConditionalPdf::new(
        Density::Rician {
            offset: nu,
            variance: params.sigma_sq(),
        },
        Conditioning {
            nu: Some(nu),
            ..Conditioning::default()
        },
    ))
}

/// Serving distance given `nu0`: Rician for uniform content, the `k`-th
/// order statistic of `M` Rician draws for k-closest content.
pub fn serving_pdf<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
    nu0: T,
) -> Result<ConditionalPdf<T>> {
    strategy.validate(params.max_transmitters)?;
    let member = intra_member_pdf(params, nu0)?;
    Ok(match strategy {
        ContentStrategy::Uniform => member,
        ContentStrategy::KClosest { k } => ConditionalPdf::new(
            Density::OrderStatistic {
                rank: k,
                count: params.max_transmitters,
                parent: Box::new(member.density().clone()),
            },
            member.conditioning(),
        ),
    })
}

/// Serving distance with the cluster-center distance integrated out under
/// the uncorrelated-distance approximation: member distances are i.i.d.
/// Rayleigh(2σ²), so the k-closest case uses `F(r) = 1 − exp(−r²/4σ²)`.
pub fn marginal_serving_pdf<T: Real>(
    params: &NetworkParams<T>,
    strategy: ContentStrategy,
) -> Result<ConditionalPdf<T>> {
    strategy.validate(params.max_transmitters)?;
    let member = Density::Rayleigh {
        variance: T::lit(2.0) * params.sigma_sq(),
    };
    let density = match strategy {
        ContentStrategy::Uniform => member,
        ContentStrategy::KClosest { k } => Density::OrderStatistic {
            rank: k,
            count: params.max_transmitters,
            parent: Box::new(member),
        },
    };
    Ok(ConditionalPdf::new(density, Conditioning::default()))
}

/// Distances to intra-cluster devices closer (`in`) and farther (`out`)
/// than the serving device at distance `r`, given `nu0`.
pub fn truncated_interferer_pdfs<T: Real>(
    params: &NetworkParams<T>,
    nu0: T,
    r: T,
) -> Result<(ConditionalPdf<T>, ConditionalPdf<T>)> {
    positive("serving distance", r)?;
    let member = intra_member_pdf(params, nu0)?;
    let (f_r, sf_r) = member.density().cdf_sf(r);
    let threshold = T::lit(DEGENERATE_MASS);
    if !(f_r >= threshold && sf_r >= threshold) {
        return Err(Error::DegenerateTruncation { cdf: f_r.as_f64() });
    }
    let conditioning = Conditioning {
        nu0: Some(nu0),
        r: Some(r),
        ..Conditioning::default()
    };
    let parent = Box::new(member.density().clone());
    let inner = ConditionalPdf::new(
        Density::Truncated {
            parent: parent.clone(),
            lower: T::zero(),
            upper: r,
            mass: f_r,
        },
        conditioning,
    );
    let outer = ConditionalPdf::new(
        Density::Truncated {
            parent,
            lower: r,
            upper: T::infinity(),
            mass: sf_r,
        },
        conditioning,
    );
    Ok((inner, outer))
}

/// Distance from the typical device to its own cluster center: Rayleigh
/// with variance `σ²`.
pub fn cluster_center_distance_pdf<T: Real>(params: &NetworkParams<T>) -> ConditionalPdf<T> {
    ConditionalPdf::new(
        Density::Rayleigh {
            variance: params.sigma_sq(),
        },
        Conditioning::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkernel::{integrate, integrate_finite, QuadratureSpec, Upper};

    fn params() -> NetworkParams<f64> {
        NetworkParams::preset()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::with_tolerances(1e-10, 1e-14)
    }

    fn total_mass(pdf: &ConditionalPdf<f64>) -> f64 {
        let (lo, hi) = pdf.support();
        let (_, eff_hi) = pdf.effective_support();
        let scale = params().sigma;
        if hi.is_infinite() {
            // Body over the effective support, then the remaining tail.
            let body = integrate_finite(|x| pdf.pdf(x), lo, eff_hi, &spec()).unwrap();
            let tail = integrate(
                |x| pdf.pdf(x),
                eff_hi,
                Upper::Infinity,
                &spec().with_tail_scale(scale),
            )
            .unwrap();
            body + tail
        } else {
            integrate_finite(|x| pdf.pdf(x), lo, hi, &spec()).unwrap()
        }
    }

    #[test]
    fn rayleigh_at_mode() {
        let s = 3.0_f64;
        let v = rayleigh_pdf(s, s * s).unwrap();
        assert!((v - (-0.5_f64).exp() / s).abs() < 1e-15);
        assert!(rayleigh_pdf(0.0, 1.0).is_err());
        assert!(rayleigh_pdf(1.0, 0.0).is_err());
    }

    #[test]
    fn rician_with_zero_offset_is_rayleigh() {
        for i in 1..50 {
            let a = i as f64 * 0.7;
            let r1 = rician_pdf(a, 0.0, 100.0).unwrap();
            let r2 = rayleigh_pdf(a, 100.0).unwrap();
            assert!((r1 - r2).abs() < 1e-15 * r2.max(1e-300) + 1e-300);
        }
        assert!(rician_pdf(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn rician_far_offset_does_not_overflow() {
        let v = rician_pdf(1e5_f64, 1e5, 100.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn every_density_normalizes() {
        let p = params();
        let sigma = p.sigma;
        let mut pdfs = vec![
            cluster_center_distance_pdf(&p),
            intra_member_pdf(&p, 0.0).unwrap(),
            intra_member_pdf(&p, 3.0 * sigma).unwrap(),
            inter_member_pdf(&p, 40.0 * sigma).unwrap(),
            serving_pdf(&p, ContentStrategy::KClosest { k: 1 }, sigma).unwrap(),
            serving_pdf(&p, ContentStrategy::KClosest { k: 17 }, 2.0 * sigma).unwrap(),
            serving_pdf(&p, ContentStrategy::KClosest { k: 40 }, 0.5 * sigma).unwrap(),
            marginal_serving_pdf(&p, ContentStrategy::Uniform).unwrap(),
            marginal_serving_pdf(&p, ContentStrategy::KClosest { k: 5 }).unwrap(),
        ];
        let (inner, outer) = truncated_interferer_pdfs(&p, sigma, 1.2 * sigma).unwrap();
        pdfs.push(inner);
        pdfs.push(outer);
        for pdf in &pdfs {
            let m = total_mass(pdf);
            assert!((m - 1.0).abs() < 1e-6, "{:?}: mass {m}", pdf.density());
        }
    }

    #[test]
    fn cdf_derivative_is_pdf() {
        let p = params();
        let sigma = p.sigma;
        let (inner, outer) = truncated_interferer_pdfs(&p, 1.5 * sigma, 2.0 * sigma).unwrap();
        let pdfs = vec![
            cluster_center_distance_pdf(&p),
            intra_member_pdf(&p, 2.0 * sigma).unwrap(),
            inter_member_pdf(&p, 10.0 * sigma).unwrap(),
            serving_pdf(&p, ContentStrategy::KClosest { k: 5 }, sigma).unwrap(),
            marginal_serving_pdf(&p, ContentStrategy::KClosest { k: 3 }).unwrap(),
            inner,
            outer,
        ];
        for pdf in &pdfs {
            let (lo, hi) = pdf.effective_support();
            let mut checked = 0;
            for i in 1..=60 {
                let x = lo + (hi - lo) * (i as f64) / 61.0;
                let f = pdf.pdf(x);
                if f < 1e-6 / sigma {
                    continue;
                }
                let h = 1e-4 * sigma;
                let d = (pdf.cdf(x + h) - pdf.cdf(x - h)) / (2.0 * h);
                assert!(
                    (d - f).abs() / f < 1e-4,
                    "{:?} at {x}: {d} vs {f}",
                    pdf.density()
                );
                checked += 1;
            }
            assert!(checked >= 3);
        }
    }

    #[test]
    fn cdf_limits() {
        let p = params();
        let pdf = intra_member_pdf(&p, 15.0).unwrap();
        assert_eq!(pdf.cdf(0.0), 0.0);
        assert!((pdf.cdf(1e4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixing_over_center_distance_gives_wider_rayleigh() {
        let p = params();
        let s2 = p.sigma_sq();
        for factor in [0.5, 1.0, 2.0, 4.0] {
            let s = factor * p.sigma;
            let mixed = integrate(
                |nu0| rician_density(s, nu0, s2) * rayleigh_density(nu0, s2),
                0.0,
                Upper::Infinity,
                &spec().with_tail_scale(p.sigma),
            )
            .unwrap();
            let closed = rayleigh_density(s, 2.0 * s2);
            assert!((mixed - closed).abs() < 1e-6, "s={s}: {mixed} vs {closed}");
        }
    }

    #[test]
    fn single_transmitter_order_statistic_is_uniform_choice() {
        let p = params().with_transmitters(1);
        let a = serving_pdf(&p, ContentStrategy::KClosest { k: 1 }, 7.0).unwrap();
        let b = serving_pdf(&p, ContentStrategy::Uniform, 7.0).unwrap();
        for i in 1..40 {
            let x = i as f64;
            assert!((a.pdf(x) - b.pdf(x)).abs() < 1e-14);
            assert!((a.cdf(x) - b.cdf(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn closest_rank_dominates_farthest() {
        let p = params();
        let first = serving_pdf(&p, ContentStrategy::KClosest { k: 1 }, 10.0).unwrap();
        let last = serving_pdf(&p, ContentStrategy::KClosest { k: 40 }, 10.0).unwrap();
        for i in 0..100 {
            let r = i as f64 * 0.5;
            assert!(first.cdf(r) >= last.cdf(r));
        }
    }

    #[test]
    fn order_statistics_sum_to_parent() {
        let p = params();
        let nu0 = 12.0;
        let member = intra_member_pdf(&p, nu0).unwrap();
        for i in 1..30 {
            let r = i as f64 * 1.3;
            let total: f64 = (1..=p.max_transmitters)
                .map(|k| {
                    serving_pdf(&p, ContentStrategy::KClosest { k }, nu0)
                        .unwrap()
                        .pdf(r)
                })
                .sum();
            let expected = p.max_transmitters as f64 * member.pdf(r);
            assert!(
                (total - expected).abs() < 1e-8,
                "r={r}: {total} vs {expected}"
            );
        }
    }

    #[test]
    fn truncated_pair_recombines() {
        let p = params();
        let (nu0, r) = (8.0, 11.0);
        let member = intra_member_pdf(&p, nu0).unwrap();
        let (inner, outer) = truncated_interferer_pdfs(&p, nu0, r).unwrap();
        let f_r = member.cdf(r);
        for i in 1..60 {
            let w = i as f64 * 0.5;
            if (w - r).abs() < 1e-12 {
                continue;
            }
            let lhs = f_r * inner.pdf(w) + (1.0 - f_r) * outer.pdf(w);
            assert!((lhs - member.pdf(w)).abs() < 1e-14, "w={w}");
        }
        assert_eq!(inner.pdf(r + 1.0), 0.0);
        assert_eq!(outer.pdf(r - 1.0), 0.0);
    }

    #[test]
    fn degenerate_truncation_reported() {
        let p = params();
        let err = truncated_interferer_pdfs(&p, 0.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::DegenerateTruncation { .. }));
        let err = truncated_interferer_pdfs(&p, 0.0, 1e3).unwrap_err();
        assert!(matches!(err, Error::DegenerateTruncation { .. }));
    }

    #[test]
    fn inter_member_concentrates_near_center() {
        let p = params();
        let nu = 20.0 * p.sigma;
        let pdf = inter_member_pdf(&p, nu).unwrap();
        assert!(pdf.cdf(nu - 5.0 * p.sigma) < 1e-5);
    }

    #[test]
    fn center_distance_mode_is_sigma() {
        let p = params();
        let pdf = cluster_center_distance_pdf(&p);
        let h = 1e-3;
        assert!(pdf.pdf(p.sigma) > pdf.pdf(p.sigma - h));
        assert!(pdf.pdf(p.sigma) > pdf.pdf(p.sigma + h));
    }

    #[test]
    fn rank_out_of_range() {
        let p = params();
        assert!(serving_pdf(&p, ContentStrategy::KClosest { k: 0 }, 1.0).is_err());
        assert!(serving_pdf(&p, ContentStrategy::KClosest { k: 41 }, 1.0).is_err());
    }
}
