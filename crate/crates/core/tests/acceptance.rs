//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run a subset by passing criterion numbers: `cargo test --test acceptance -- 2 3`.

use std::time::Instant;

use d2d_coverage::geometry::*;
use d2d_coverage::interference::*;
use d2d_coverage::mathkernel::{integrate, integrate_finite, QuadratureSpec, Upper};
use d2d_coverage::metrics::*;
use d2d_coverage::montecarlo::{distance_suite, simulate_coverage, SimulationConfig};
use d2d_coverage::{Options, Params};

const SWEEP: [f64; 6] = [1.0, 2.0, 4.0, 6.0, 8.0, 10.0];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn preset() -> Params {
    Params::preset()
}

fn exact(p: &Params) -> f64 {
    coverage_uniform_exact(p).unwrap().value
}

fn s_grid(p: &Params) -> Vec<f64> {
    let base = p.sigma.powf(p.alpha);
    (0..30)
        .map(|i| base * 10f64.powf(-2.0 + 6.0 * i as f64 / 29.0))
        .collect()
}

fn oracle_equivalence() -> Verdict {
    let cfg = SimulationConfig::default().with_seed(2024);
    let mut worst_ratio: f64 = 0.0;
    let mut rows = Vec::new();
    for m in SWEEP {
        let p = preset().with_m_bar(m);
        let analytic = exact(&p);
        let mc = simulate_coverage(&p, &cfg).unwrap();
        let tol = (2.0 * mc.std_error).max(0.01);
        let diff = (analytic - mc.p_hat).abs();
        worst_ratio = worst_ratio.max(diff / tol);
        rows.push(format!("m̄={m}: {analytic:.4} vs {:.4}", mc.p_hat));
    }
    verdict(
        worst_ratio <= 1.0,
        format!("{}; worst |diff|/tol = {worst_ratio:.3}", rows.join(", ")),
    )
}

fn approximation_tightness() -> Verdict {
    let mut worst: f64 = 0.0;
    for m in SWEEP {
        let p = preset().with_m_bar(m);
        let approx = coverage_uniform_approx(&p).unwrap().value;
        worst = worst.max((approx - exact(&p)).abs());
    }
    verdict(
        worst <= 0.02,
        format!("max |approx − exact| = {worst:.4} (limit 0.02)"),
    )
}

fn bound_validity() -> Verdict {
    let spec = QuadratureSpec::with_tolerances(1e-10, 1e-15);
    let mut violations = 0;
    for m in SWEEP {
        let p = preset().with_m_bar(m);
        let intra = IntraUniform::new(&p, TransformForm::Limit).unwrap();
        let inter_limit = InterCluster::new(&p, TransformForm::Limit).unwrap();
        let inter_exact = InterCluster::new(&p, TransformForm::Exact).unwrap();
        for s in s_grid(&p) {
            let mixed = integrate_finite(
                |nu0| intra.at(s, nu0).unwrap() * rayleigh_density(nu0, p.sigma_sq()),
                0.0,
                9.5 * p.sigma,
                &spec,
            )
            .unwrap();
            let lb = intra_lower_bound(&p, s).unwrap();
            violations += (lb > mixed + 1e-9) as usize;
            let lb = inter_lower_bound(&p, s).unwrap();
            violations += (lb > inter_limit.at(s).unwrap() + 1e-9) as usize;
            violations += (lb > inter_exact.at(s).unwrap() + 1e-9) as usize;
        }
    }
    let mut worst_gap: f64 = 0.0;
    let mut worst_at = 0.0;
    let mut above = Vec::new();
    for m in SWEEP {
        let p = preset().with_m_bar(m);
        let closed = coverage_closed_form(&p).unwrap().value;
        let ex = exact(&p);
        if (closed - ex).abs() > worst_gap {
            worst_gap = (closed - ex).abs();
            worst_at = m;
        }
        // "Near" means at most 0.01 above.
        if closed > ex + 0.01 {
            above.push(m);
        }
    }
    let pass = violations == 0 && worst_gap <= 0.1 && above.is_empty();
    verdict(
        pass,
        format!(
            "{violations} bound violations on the grid; max |closed-form − exact| = {worst_gap:.4} at m̄={worst_at} \
             (limit 0.1); closed form above exact at m̄ {above:?}"
        ),
    )
}

fn kclosest_ordering() -> Verdict {
    let mut failures = Vec::new();
    for m in [2.0, 6.0, 10.0] {
        let p = preset().with_m_bar(m);
        let uniform = ase(
            &p,
            ContentStrategy::Uniform,
            CoverageMethod::Exact,
            &Options::default(),
        )
        .unwrap();
        let best = ase(
            &p,
            ContentStrategy::KClosest { k: 1 },
            CoverageMethod::KClosestExact,
            &Options::default(),
        )
        .unwrap();
        let worst = ase(
            &p,
            ContentStrategy::KClosest { k: 40 },
            CoverageMethod::KClosestExact,
            &Options::default(),
        )
        .unwrap();
        let cov_ok = best.coverage.value >= uniform.coverage.value
            && uniform.coverage.value >= worst.coverage.value;
        let ase_ok = best.value >= uniform.value && uniform.value >= worst.value;
        if !(cov_ok && ase_ok) {
            failures.push(format!(
                "m̄={m}: {:.4}/{:.4}/{:.4}",
                best.coverage.value, uniform.coverage.value, worst.coverage.value
            ));
        }
    }
    let p = preset().with_m_bar(6.0);
    let gap = |k: usize, variant: u8| {
        let ex = coverage_kclosest_exact(&p, k).unwrap().value;
        (coverage_kclosest_approx(&p, k, variant).unwrap().value - ex).abs()
    };
    let mut gaps = Vec::new();
    for variant in [1, 2] {
        let (g1, g20) = (gap(1, variant), gap(20, variant));
        if g20 >= g1 {
            failures.push(format!(
                "variant {variant} gap {g20:.4} at k=20 not below {g1:.4} at k=1"
            ));
        }
        gaps.push(format!("variant {variant}: {g1:.4} → {g20:.4}"));
    }
    verdict(
        failures.is_empty(),
        format!(
            "k=1 ≥ uniform ≥ k=M for m̄ ∈ {{2,6,10}}; approximation gaps k=1 → k=20: {}{}",
            gaps.join(", "),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join("; "))
            }
        ),
    )
}

fn optimum_structure() -> Verdict {
    let options = Options::fast();
    let m = preset().max_transmitters;
    let optimum = |p: &Params, strategy: ContentStrategy, method| {
        optimize_mbar(p, strategy, method, &options, 1..=m)
            .unwrap()
            .m_bar
    };
    let per_sigma: Vec<(f64, usize)> = [10.0, 20.0, 40.0]
        .into_iter()
        .map(|sigma| {
            (
                sigma,
                optimum(
                    &preset().with_sigma(sigma),
                    ContentStrategy::Uniform,
                    CoverageMethod::Exact,
                ),
            )
        })
        .collect();
    let uniform = per_sigma[0].1;
    let interior = uniform > 1 && uniform < m;
    let same = per_sigma.iter().all(|&(_, o)| o == uniform);
    let best_link = optimum(
        &preset(),
        ContentStrategy::KClosest { k: 1 },
        CoverageMethod::KClosestExact,
    );
    let ordered = best_link >= uniform;
    verdict(
        interior && same && ordered,
        format!(
            "interior maximizer: {interior} (m̄*={uniform} in 1..={m}); m̄* by σ: {per_sigma:?} identical: {same}; \
             m̄*(k=1)={best_link} ≥ m̄*(uniform)={uniform}: {ordered}"
        ),
    )
}

fn distance_suite_check() -> Verdict {
    let reports = distance_suite(
        &preset(),
        &SimulationConfig::default().with_seed(77),
        100_000,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    let mut conditioned = std::collections::BTreeMap::<String, usize>::new();
    for r in &reports {
        match r.ks {
            Some(ks) => {
                worst = worst.max(ks);
                if r.bin.is_some() {
                    *conditioned.entry(r.distribution.clone()).or_default() += 1;
                }
            }
            None => skipped += 1,
        }
    }
    let enough_bins = conditioned.values().all(|&n| n >= 3) && conditioned.len() >= 5;
    verdict(
        worst < 0.02 && skipped == 0 && enough_bins,
        format!(
            "{} comparisons, max KS = {worst:.4} (limit 0.02), {skipped} skipped bins, bins per conditioned \
             distribution: {conditioned:?}",
            reports.len()
        ),
    )
}

fn mass(pdf: &ConditionalPdf<f64>, sigma: f64) -> f64 {
    let spec = QuadratureSpec::with_tolerances(1e-11, 1e-15);
    let (_, hi) = pdf.support();
    let (_, eff_hi) = pdf.effective_support();
    let body = pdf.expectation(|_| 1.0, &spec).unwrap();
    if hi.is_infinite() {
        body + integrate(
            |x| pdf.pdf(x),
            eff_hi,
            Upper::Infinity,
            &spec.with_tail_scale(sigma),
        )
        .unwrap()
    } else {
        body
    }
}

fn property_suite() -> Verdict {
    let start = Instant::now();
    let p = preset();
    let sigma = p.sigma;
    let mut failures = Vec::new();

    let mut pdfs = vec![cluster_center_distance_pdf(&p)];
    for strategy in [ContentStrategy::Uniform, ContentStrategy::KClosest { k: 5 }] {
        pdfs.push(marginal_serving_pdf(&p, strategy).unwrap());
        for nu0 in [0.0, sigma, 4.0 * sigma] {
            pdfs.push(serving_pdf(&p, strategy, nu0).unwrap());
        }
    }
    for nu in [0.0, 3.0 * sigma, 50.0 * sigma] {
        pdfs.push(inter_member_pdf(&p, nu).unwrap());
    }
    for (nu0, r) in [
        (0.5 * sigma, sigma),
        (sigma, 2.0 * sigma),
        (3.0 * sigma, sigma),
    ] {
        let (inner, outer) = truncated_interferer_pdfs(&p, nu0, r).unwrap();
        pdfs.push(inner);
        pdfs.push(outer);
    }
    let worst_mass = pdfs
        .iter()
        .map(|f| (mass(f, sigma) - 1.0).abs())
        .fold(0.0, f64::max);
    if worst_mass > 1e-6 {
        failures.push(format!("normalization off by {worst_mass:e}"));
    }

    let conditioning = Conditioning {
        nu0: Some(sigma),
        r: Some(1.5 * sigma),
        ..Conditioning::default()
    };
    let evaluators: Vec<Box<dyn LaplaceEvaluator<f64>>> = vec![
        Box::new(IntraUniform::new(&p, TransformForm::Exact).unwrap()),
        Box::new(IntraUniform::new(&p, TransformForm::Limit).unwrap()),
        Box::new(IntraIidApprox::new(&p).unwrap()),
        Box::new(IntraLowerBound::new(&p).unwrap()),
        Box::new(InterCluster::new(&p, TransformForm::Exact).unwrap()),
        Box::new(InterCluster::new(&p, TransformForm::Limit).unwrap()),
        Box::new(InterLowerBound::new(&p).unwrap()),
        Box::new(IntraKClosest::new(&p, 5, TransformForm::Exact).unwrap()),
        Box::new(IntraKClosest::new(&p, 1, TransformForm::Limit).unwrap()),
        Box::new(IntraKClosest::new(&p, 40, TransformForm::Limit).unwrap()),
    ];
    let grid = s_grid(&p);
    for e in &evaluators {
        let zero = e.evaluate(0.0, &conditioning).unwrap();
        let values = evaluate_on_grid(e.as_ref(), &grid, &conditioning).unwrap();
        let monotone = std::iter::once(zero)
            .chain(values.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12);
        if (zero - 1.0).abs() > 1e-12 || !monotone {
            failures.push(format!(
                "{}: L(0) = {zero}, monotone {monotone}",
                e.method()
            ));
        }
    }

    let spec = QuadratureSpec::with_tolerances(1e-11, 1e-16);
    let mut worst_mix: f64 = 0.0;
    for a in [0.3 * sigma, sigma, 2.0 * sigma, 4.0 * sigma] {
        let mixed = integrate(
            |nu0| rician_pdf(a, nu0, p.sigma_sq()).unwrap() * rayleigh_density(nu0, p.sigma_sq()),
            0.0,
            Upper::Infinity,
            &spec.with_tail_scale(sigma),
        )
        .unwrap();
        worst_mix = worst_mix.max((mixed - rayleigh_pdf(a, 2.0 * p.sigma_sq()).unwrap()).abs());
    }
    if worst_mix > 1e-6 {
        failures.push(format!("marginalization off by {worst_mix:e}"));
    }

    let mut worst_sum: f64 = 0.0;
    for (mean, cap) in [(0.5, 0), (4.0, 39), (9.0, 5), (30.0, 40)] {
        let s: f64 = truncated_poisson_pmf(mean, cap).unwrap().iter().sum();
        worst_sum = worst_sum.max((s - 1.0).abs());
    }
    for (n, q, cap) in [(39, 4.0 / 39.0, 4), (10, 0.5, 10), (60, 0.9, 3)] {
        let s: f64 = truncated_binomial_pmf(n, q, cap).unwrap().iter().sum();
        worst_sum = worst_sum.max((s - 1.0).abs());
    }
    if worst_sum > 1e-12 {
        failures.push(format!("count masses off by {worst_sum:e}"));
    }

    let cfg = SimulationConfig::default().with_trials(5000).with_seed(9);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_coverage(&p, &cfg).unwrap().p_hat)
    };
    let (one, eight) = (run(1), run(8));
    if one.to_bits() != eight.to_bits() {
        failures.push(format!("MC p_hat {one} (1 thread) vs {eight} (8 threads)"));
    }

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        failures.push(format!("took {elapsed:.1} s"));
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} pdfs (max mass error {worst_mass:.1e}), {} evaluators, marginalization error {worst_mix:.1e}, \
             count-mass error {worst_sum:.1e}, MC 1 vs 8 threads bitwise equal: {}{}",
            pdfs.len(),
            evaluators.len(),
            one.to_bits() == eight.to_bits(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join("; "))
            }
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 7] = [
        (
            1,
            "analytic coverage matches Monte Carlo",
            oracle_equivalence,
        ),
        (
            2,
            "i.i.d. approximation within 0.02 of exact",
            approximation_tightness,
        ),
        (
            3,
            "lower bounds hold, closed form within 0.1",
            bound_validity,
        ),
        (4, "k-closest ordering and convergence", kclosest_ordering),
        (5, "optimum m̄ structure", optimum_structure),
        (6, "distance-distribution KS suite", distance_suite_check),
        (7, "property suite", property_suite),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        println!(
            "criterion {id} [{name}]: {} ({:.1} s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
