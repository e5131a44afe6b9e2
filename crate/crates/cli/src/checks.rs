//! Numerical self-checks and the distance-distribution validation.

use std::fmt::Write as _;

use d2d_coverage::geometry::{
    cluster_center_distance_pdf, inter_member_pdf, marginal_serving_pdf, rayleigh_density,
    serving_pdf, truncated_interferer_pdfs, ConditionalPdf, Conditioning, ContentStrategy,
};
use d2d_coverage::interference::{
    evaluate_on_grid, inter_lower_bound, intra_lower_bound, truncated_poisson_pmf, InterCluster,
    IntraIidApprox, IntraKClosest, IntraLowerBound, IntraUniform, LaplaceEvaluator, TransformForm,
};
use d2d_coverage::mathkernel::{integrate, integrate_finite, QuadratureSpec, Upper};
use d2d_coverage::metrics::{coverage_closed_form, coverage_uniform_approx};
use d2d_coverage::montecarlo::{distance_suite, KsReport, SimulationConfig};
use d2d_coverage::Params;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub fn report(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        writeln!(s, "{status}  {:<28} {}", c.name, c.detail).unwrap();
    }
    s
}

fn s_grid(p: &Params) -> Vec<f64> {
    let base = p.sigma.powf(p.alpha);
    (0..20)
        .map(|i| base * 10f64.powf(-2.0 + 6.0 * i as f64 / 19.0))
        .collect()
}

fn mass(pdf: &ConditionalPdf<f64>, sigma: f64) -> Result<f64> {
    let spec = QuadratureSpec::with_tolerances(1e-11, 1e-15);
    let (_, hi) = pdf.support();
    let (_, eff_hi) = pdf.effective_support();
    let body = pdf.expectation(|_| 1.0, &spec)?;
    Ok(if hi.is_infinite() {
        body + integrate(
            |x| pdf.pdf(x),
            eff_hi,
            Upper::Infinity,
            &spec.with_tail_scale(sigma),
        )?
    } else {
        body
    })
}

fn normalization(p: &Params) -> Result<Check> {
    let sigma = p.sigma;
    let k = 5.min(p.max_transmitters);
    let mut pdfs = vec![cluster_center_distance_pdf(p)];
    for strategy in [ContentStrategy::Uniform, ContentStrategy::KClosest { k }] {
        pdfs.push(marginal_serving_pdf(p, strategy)?);
        pdfs.push(serving_pdf(p, strategy, sigma)?);
    }
    pdfs.push(inter_member_pdf(p, 3.0 * sigma)?);
    let (inner, outer) = truncated_interferer_pdfs(p, sigma, 1.5 * sigma)?;
    pdfs.push(inner);
    pdfs.push(outer);
    let mut worst: f64 = 0.0;
    for f in &pdfs {
        worst = worst.max((mass(f, sigma)? - 1.0).abs());
    }
    Ok(Check {
        name: "density normalization",
        pass: worst <= 1e-6,
        detail: format!("{} densities, worst |mass − 1| = {worst:.2e}", pdfs.len()),
    })
}

fn transforms(p: &Params) -> Result<Check> {
    let conditioning = Conditioning {
        nu0: Some(p.sigma),
        r: Some(1.5 * p.sigma),
        ..Conditioning::default()
    };
    let k = 5.min(p.max_transmitters);
    let evaluators: Vec<Box<dyn LaplaceEvaluator<f64>>> = vec![
        Box::new(IntraUniform::new(p, TransformForm::Exact)?),
        Box::new(IntraUniform::new(p, TransformForm::Limit)?),
        Box::new(IntraIidApprox::new(p)?),
        Box::new(IntraLowerBound::new(p)?),
        Box::new(InterCluster::new(p, TransformForm::Exact)?),
        Box::new(InterCluster::new(p, TransformForm::Limit)?),
        Box::new(IntraKClosest::new(p, k, TransformForm::Exact)?),
    ];
    let grid = s_grid(p);
    let mut bad = Vec::new();
    for e in &evaluators {
        let zero = e.evaluate(0.0, &conditioning)?;
        let mut values = vec![zero];
        values.extend(evaluate_on_grid(e.as_ref(), &grid, &conditioning)?);
        let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        if (zero - 1.0).abs() > 1e-12 || !monotone {
            bad.push(e.method().as_str());
        }
    }
    Ok(Check {
        name: "transform shape",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "{} transforms equal 1 at s = 0 and decrease",
                evaluators.len()
            )
        } else {
            format!("misbehaving: {}", bad.join(", "))
        },
    })
}

fn bounds(p: &Params) -> Result<Check> {
    let spec = QuadratureSpec::with_tolerances(1e-10, 1e-15);
    let intra = IntraUniform::new(p, TransformForm::Limit)?;
    let inter_limit = InterCluster::new(p, TransformForm::Limit)?;
    let inter_exact = InterCluster::new(p, TransformForm::Exact)?;
    let grid = s_grid(p);
    let mut violations = 0;
    for &s in &grid {
        let mixed = integrate_finite(
            |nu0| intra.at(s, nu0).unwrap_or(f64::NAN) * rayleigh_density(nu0, p.sigma_sq()),
            0.0,
            9.5 * p.sigma,
            &spec,
        )?;
        violations += (intra_lower_bound(p, s)? > mixed + 1e-9) as usize;
        let lb = inter_lower_bound(p, s)?;
        violations += (lb > inter_limit.at(s)? + 1e-9) as usize;
        violations += (lb > inter_exact.at(s)? + 1e-9) as usize;
    }
    let closed = coverage_closed_form(p)?.value;
    let approx = coverage_uniform_approx(p)?.value;
    let ordered = closed <= approx + 1e-9;
    Ok(Check {
        name: "bound ordering",
        pass: violations == 0 && ordered,
        detail: format!(
            "{violations} transform bound violations over {} points; closed form {closed:.4} ≤ approx {approx:.4}: {ordered}",
            grid.len()
        ),
    })
}

fn count_masses(p: &Params) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for (mean, cap) in [
        (p.m_bar, p.max_transmitters),
        (0.5, 0),
        (30.0, p.max_transmitters),
    ] {
        let s: f64 = truncated_poisson_pmf(mean, cap)?.iter().sum();
        worst = worst.max((s - 1.0).abs());
    }
    Ok(Check {
        name: "count distributions",
        pass: worst <= 1e-12,
        detail: format!("worst |Σ pmf − 1| = {worst:.2e}"),
    })
}

/// Internal consistency checks at `p`. Failing checks are reported, not
/// returned as errors.
pub fn selftest(p: &Params) -> Result<Vec<Check>> {
    p.validate()?;
    Ok(vec![
        normalization(p)?,
        transforms(p)?,
        bounds(p)?,
        count_masses(p)?,
    ])
}

/// The distance-distribution suite with a pass/fail verdict per row.
/// A skipped bin counts as a failure.
pub fn validate(
    p: &Params,
    cfg: &SimulationConfig,
    per_bin: usize,
    max_ks: f64,
) -> Result<Vec<(KsReport, bool)>> {
    Ok(distance_suite(p, cfg, per_bin)?
        .into_iter()
        .map(|r| {
            let pass = r.ks.is_some_and(|d| d < max_ks);
            (r, pass)
        })
        .collect())
}

pub fn validation_report(rows: &[(KsReport, bool)], max_ks: f64) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<6} {:<36} {:<22} {:>8} {:>8}",
        "", "distribution", "bin", "samples", "KS"
    )
    .unwrap();
    for (r, pass) in rows {
        let bin = r
            .bin
            .map_or("-".to_string(), |(lo, hi)| format!("[{lo:.2}, {hi:.2})"));
        let ks = r.ks.map_or("skipped".to_string(), |d| format!("{d:.4}"));
        let status = if *pass { "PASS" } else { "FAIL" };
        writeln!(
            s,
            "{status:<6} {:<36} {bin:<22} {:>8} {ks:>8}",
            r.distribution, r.samples
        )
        .unwrap();
    }
    writeln!(s, "threshold: KS < {max_ks}").unwrap();
    s
}
