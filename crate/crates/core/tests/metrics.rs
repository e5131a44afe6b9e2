use d2d_coverage::geometry::{ContentStrategy, NetworkParams};
use d2d_coverage::metrics::*;
use d2d_coverage::{Error, Options, Params};
use proptest::prelude::*;

fn fast() -> Options {
    CoverageOptions::fast()
}

/// Closed-form coverage computed from scratch for `α = 4`, where the sinc
/// factor is `π/2`.
fn closed_form_alpha4(p: &Params) -> f64 {
    let load = 4.0 * std::f64::consts::PI * p.lambda_c * p.sigma_sq() * p.m_bar + p.m_bar - 1.0;
    1.0 / (load * p.beta.sqrt() * std::f64::consts::FRAC_PI_2 + 1.0)
}

#[test]
fn closed_form_on_preset() {
    let p = Params::preset().with_m_bar(1.0);
    let v = coverage_closed_form(&p).unwrap().value;
    assert!((v - 0.7715).abs() < 1e-4, "{v}");
    for m in [1.0, 2.5, 7.0] {
        let p = Params::preset().with_m_bar(m);
        let v = coverage_closed_form(&p).unwrap().value;
        assert!((v - closed_form_alpha4(&p)).abs() < 1e-14);
    }
}

#[test]
fn single_link_without_clusters_is_always_covered() {
    let p = Params::preset().with_m_bar(1.0).with_lambda_c(0.0);
    for method in [
        CoverageMethod::Exact,
        CoverageMethod::IidApprox,
        CoverageMethod::ClosedForm,
    ] {
        let v = coverage(&p, ContentStrategy::Uniform, method, &Options::default())
            .unwrap()
            .value;
        assert!((v - 1.0).abs() < 1e-6, "{method}: {v}");
    }
}

#[test]
fn sparse_clusters_single_link() {
    let p = Params::preset().with_m_bar(1.0).with_lambda_c(1e-9);
    let v = coverage_uniform_exact_with(&p, &fast()).unwrap().value;
    assert!((v - 1.0).abs() < 1e-3, "{v}");
}

#[test]
fn vanishing_threshold_gives_full_coverage() {
    let p = Params::preset().with_beta(1e-10);
    let v = coverage_uniform_exact_with(&p, &fast()).unwrap().value;
    assert!((v - 1.0).abs() < 1e-3, "{v}");
}

#[test]
fn coverage_decreases_in_threshold_load_and_density() {
    let base = Params::preset().with_m_bar(3.0);
    let check = |values: Vec<Params>| {
        let cov: Vec<f64> = values
            .iter()
            .map(|p| coverage_uniform_exact_with(p, &fast()).unwrap().value)
            .collect();
        assert!(cov.windows(2).all(|w| w[1] < w[0]), "{cov:?}");
    };
    check(
        [0.25, 1.0, 4.0]
            .iter()
            .map(|&b| base.with_beta(b))
            .collect(),
    );
    check(
        [1.0, 3.0, 8.0]
            .iter()
            .map(|&m| base.with_m_bar(m))
            .collect(),
    );
    check(
        [5e-5, 1.5e-4, 4e-4]
            .iter()
            .map(|&l| base.with_lambda_c(l))
            .collect(),
    );
}

#[test]
fn closed_form_below_iid_approximation() {
    for m in [1.0, 2.0, 5.0, 10.0] {
        let p = Params::preset().with_m_bar(m);
        let closed = coverage_closed_form(&p).unwrap().value;
        let approx = coverage_uniform_approx_with(&p, &fast()).unwrap().value;
        assert!(closed <= approx + 1e-6, "m̄ {m}: {closed} > {approx}");
    }
}

#[test]
fn single_transmitter_cluster_kclosest_equals_uniform() {
    let p = Params::preset().with_transmitters(1).with_m_bar(1.0);
    let uniform = coverage_uniform_exact_with(&p, &fast()).unwrap().value;
    let first = coverage_kclosest_exact_with(&p, 1, &fast()).unwrap().value;
    assert!((uniform - first).abs() < 1e-6, "{uniform} vs {first}");
}

#[test]
fn kclosest_extremes_bracket_uniform() {
    let p = Params::preset().with_m_bar(4.0);
    let uniform = coverage_uniform_exact_with(&p, &fast()).unwrap().value;
    let best = coverage_kclosest_exact_with(&p, 1, &fast()).unwrap().value;
    let worst = coverage_kclosest_exact_with(&p, 40, &fast()).unwrap().value;
    assert!(
        best > uniform && uniform > worst,
        "{best} {uniform} {worst}"
    );
}

#[test]
fn ase_is_linear_in_coverage() {
    let p = Params::preset().with_m_bar(3.0).with_beta(3.0);
    let a = ase(
        &p,
        ContentStrategy::Uniform,
        CoverageMethod::IidApprox,
        &fast(),
    )
    .unwrap();
    let expected = 3.0 * p.lambda_c * 2.0 * a.coverage.value;
    assert!((a.value - expected).abs() <= 1e-15 * expected);
    assert_eq!(a.m_bar_used, 3.0);
    let c = ase_closed_form(&p).unwrap();
    assert!((c.value - 3.0 * p.lambda_c * 2.0 * closed_form_alpha4(&p)).abs() < 1e-18);
}

#[test]
fn mismatched_methods_are_rejected() {
    let p = Params::preset();
    let r = coverage(
        &p,
        ContentStrategy::KClosest { k: 1 },
        CoverageMethod::Exact,
        &fast(),
    );
    assert!(matches!(r, Err(Error::Unsupported(_))));
    let r = coverage(
        &p,
        ContentStrategy::Uniform,
        CoverageMethod::KClosestApprox2,
        &fast(),
    );
    assert!(matches!(r, Err(Error::Unsupported(_))));
    assert!(matches!(
        coverage_kclosest_approx(&p, 1, 3),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        coverage_kclosest_exact(&p, 41),
        Err(Error::Domain(_))
    ));
    assert!(coverage_closed_form(&p.with_m_bar(-1.0)).is_err());
}

#[test]
fn method_names_round_trip() {
    for m in CoverageMethod::ALL {
        assert_eq!(m.as_str().parse::<CoverageMethod>().unwrap(), m);
        assert_eq!(m.to_string(), m.as_str());
    }
    assert!("bogus".parse::<CoverageMethod>().is_err());
}

#[test]
fn optimizer_single_transmitter() {
    let p = Params::preset().with_transmitters(1);
    let opt = optimize_mbar(
        &p,
        ContentStrategy::Uniform,
        CoverageMethod::Exact,
        &fast(),
        1..=1,
    )
    .unwrap();
    assert_eq!(opt.m_bar, 1);
    assert_eq!(opt.curve.len(), 1);
}

#[test]
fn optimizer_picks_first_maximum() {
    let p = Params::preset();
    let opt = optimize_mbar(
        &p,
        ContentStrategy::Uniform,
        CoverageMethod::ClosedForm,
        &fast(),
        1..=20,
    )
    .unwrap();
    let values: Vec<f64> = opt.curve.iter().map(|a| a.value).collect();
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let first = values.iter().position(|&v| v == max).unwrap();
    assert_eq!(opt.m_bar, first + 1);
    assert_eq!(opt.best.value, max);
    assert!(opt
        .curve
        .iter()
        .enumerate()
        .all(|(i, a)| a.m_bar_used == (i + 1) as f64));
    assert!(optimize_mbar(
        &p,
        ContentStrategy::Uniform,
        CoverageMethod::ClosedForm,
        &fast(),
        0..=3
    )
    .is_err());
}

#[test]
fn optimizer_is_deterministic_across_thread_counts() {
    let p = Params::preset();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                optimize_mbar(
                    &p,
                    ContentStrategy::Uniform,
                    CoverageMethod::IidApprox,
                    &fast(),
                    1..=6,
                )
                .unwrap()
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn single_precision_tracks_double() {
    let p64 = Params::preset().with_m_bar(3.0);
    let p32: NetworkParams<f32> = p64.cast();
    let a = coverage_uniform_approx_with(&p64, &fast()).unwrap().value;
    let b = coverage_uniform_approx_with(&p32, &CoverageOptions::fast())
        .unwrap()
        .value;
    assert!((a - b as f64).abs() < 1e-4, "{a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_is_a_probability_and_falls_with_load(
        m in 1.0f64..30.0,
        beta in 0.01f64..100.0,
        sigma in 1.0f64..80.0,
        lambda in 0.0f64..1e-3,
        alpha in 2.2f64..6.0,
    ) {
        let p = Params::preset().with_m_bar(m).with_beta(beta).with_sigma(sigma)
            .with_lambda_c(lambda).with_alpha(alpha);
        let v = coverage_closed_form(&p).unwrap().value;
        prop_assert!(v > 0.0 && v <= 1.0);
        let heavier = coverage_closed_form(&p.with_m_bar(m + 1.0)).unwrap().value;
        prop_assert!(heavier < v);
        let stricter = coverage_closed_form(&p.with_beta(beta * 2.0)).unwrap().value;
        prop_assert!(stricter < v);
    }
}
