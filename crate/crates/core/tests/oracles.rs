//! Closed forms checked against independent numerical routes.

mod common;

use common::{arb_any_case, arb_case, FAMILIES};
use pointproc_core::quadrature::{adaptive_simpson, integrate_intensity};
use pointproc_core::simulate::{invert_compensator, Inversion};
use pointproc_core::{
    log_likelihood, log_likelihood_numeric, Event, History, ModelSpec, ObservationWindow,
    PointPattern,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

#[test]
fn compensator_matches_quadrature_for_every_family() {
    for family in FAMILIES {
        runner(100)
            .run(&arb_case(family), |(model, events, t)| {
                let history = History::new(&events);
                let closed = model.evaluate_compensator(t, history).unwrap();
                let numeric = integrate_intensity(&model, history, t, 1e-9).unwrap();
                prop_assert!(
                    (closed - numeric).abs() <= 1e-6 * (1.0 + closed),
                    "{family}: closed {closed} vs quadrature {numeric}"
                );
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn strongly_clustered_renewal_compensator_matches_quadrature() {
    // Shapes far below 1 put most of the hazard mass at tiny ages.
    for &(shape, rate) in &[(0.1, 1.0), (0.02, 0.2)] {
        let model = ModelSpec::renewal_gamma(shape, rate).unwrap();
        let events = [Event::new(0.4), Event::new(3.0)];
        for &t in &[0.2, 1.0, 2.9, 3.5, 12.0] {
            let history = History::new(&events);
            let closed = model.evaluate_compensator(t, history).unwrap();
            let numeric = integrate_intensity(&model, history, t, 1e-10).unwrap();
            assert!(
                (closed - numeric).abs() <= 1e-6 * (1.0 + closed),
                "shape {shape}, t {t}: {closed} vs {numeric}"
            );
        }
    }
}

#[test]
fn thinning_envelope_dominates_gridded_intensity() {
    runner(1000)
        .run(
            &(arb_any_case(), 0.05..5.0f64),
            |((model, events, t), lookahead)| {
                let history = History::new(&events);
                let envelope = model
                    .thinning_envelope_with_lookahead(t, history, lookahead)
                    .unwrap();
                prop_assert!(envelope.horizon > 0.0);
                let known = history.up_to(t);
                let span = envelope.horizon.min(10.0);
                for i in 0..100 {
                    let s = t + span * i as f64 / 99.0;
                    let intensity = model.intensity_given_past(s, known).unwrap();
                    prop_assert!(
                        envelope.bound >= intensity * (1.0 - 1e-12),
                        "{}: bound {} < intensity {} at {} (t {})",
                        model.tag(),
                        envelope.bound,
                        intensity,
                        s,
                        t
                    );
                }
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn inversion_round_trip() {
    runner(500)
        .run(
            &(arb_any_case(), 0.0..30.0f64),
            |((model, events, t_lower), extra)| {
                let history = History::new(&events);
                let start = model.evaluate_compensator(t_lower, history).unwrap();
                let target = start + extra;
                match invert_compensator(&model, history, target, t_lower, 1e-9).unwrap() {
                    Inversion::Terminated => {
                        let piecewise = matches!(model, ModelSpec::PiecewisePoisson { .. });
                        let exhausted =
                            model.is_exhausted(t_lower, History::new(history.up_to(t_lower)));
                        prop_assert!(exhausted || piecewise);
                    }
                    Inversion::Time(t) => {
                        prop_assert!(t >= t_lower);
                        let known = History::new(history.up_to(t_lower));
                        let reached = model.evaluate_compensator(t, known).unwrap();
                        prop_assert!(
                            (reached - target).abs() <= 1e-8 * (1.0 + target),
                            "{}: target {} reached {}",
                            model.tag(),
                            target,
                            reached
                        );
                    }
                }
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn terminating_inversions_are_detected() {
    let pw = ModelSpec::piecewise_poisson(vec![1.0], vec![1.0, 0.0]).unwrap();
    let r = invert_compensator(&pw, History::empty(), 1.5, 0.0, 1e-9).unwrap();
    assert_eq!(r, Inversion::Terminated);
    let r = invert_compensator(&pw, History::empty(), 0.5, 0.0, 1e-9).unwrap();
    match r {
        Inversion::Time(t) => assert!((t - 0.5).abs() < 1e-9),
        other => panic!("expected a time, got {other:?}"),
    }

    let stop = ModelSpec::stop_after_n(2.0, 1).unwrap();
    let ev = [Event::new(0.3)];
    let r = invert_compensator(&stop, History::new(&ev), 1.0, 0.3, 1e-9).unwrap();
    assert_eq!(r, Inversion::Terminated);
}

#[test]
fn mark_density_normalizes() {
    for &delta in &[0.5, 1.0, 2.0, 7.5] {
        let model = ModelSpec::etas_exp(0.5, 0.2, 1.0, 1.0, delta).unwrap();
        let f = |k: f64| {
            model
                .mark_log_density(k, 1.0, History::empty())
                .map(f64::exp)
        };
        let total = adaptive_simpson(&f, 0.0, 50.0 / delta, 1e-12).unwrap();
        // The exact value is 1 - e^-50; allow rounding of the rule above 1.
        assert!(
            (1.0 - 1e-6..=1.0 + 64.0 * f64::EPSILON).contains(&total),
            "delta {delta}: integral {total}"
        );
    }
}

#[test]
fn hawkes_jump_size() {
    runner(100)
        .run(&arb_case("hawkes_exp"), |(model, events, _)| {
            let ModelSpec::HawkesExp {
                alpha, gamma_rate, ..
            } = model
            else {
                unreachable!()
            };
            for (i, e) in events.iter().enumerate() {
                let before = model.intensity_given_past(e.time, &events[..i]).unwrap();
                let after = model.intensity_given_past(e.time, &events[..=i]).unwrap();
                prop_assert!((after - before - alpha * gamma_rate).abs() < 1e-12 * (1.0 + after));
            }
            Ok(())
        })
        .unwrap();
}

// Product of next-event densities f(tᵢ | H) = λ*(tᵢ) exp(-(Λ*(tᵢ) - Λ*(tᵢ₋₁)))
// and the survival term, each evaluated from scratch on its history prefix.
fn sequential_log_likelihood(model: &ModelSpec, pattern: &PointPattern) -> f64 {
    let events = pattern.events();
    let mut total = 0.0;
    let mut previous = 0.0;
    for (i, e) in events.iter().enumerate() {
        let prefix = History::new(&events[..i]);
        let intensity = model.evaluate_intensity(e.time, prefix).unwrap();
        let reached = model.evaluate_compensator(e.time, prefix).unwrap();
        total += intensity.ln() - (reached - previous);
        if let Some(k) = e.mark {
            total += model.mark_log_density(k, e.time, prefix).unwrap();
        }
        previous = model
            .evaluate_compensator(e.time, History::new(&events[..=i]))
            .unwrap();
    }
    let survival = model
        .evaluate_compensator(pattern.t_end(), History::new(events))
        .unwrap();
    total - (survival - previous)
}

fn pattern_strategy() -> impl Strategy<Value = (ModelSpec, PointPattern)> {
    arb_any_case().prop_filter_map(
        "needs positive intensity at events",
        |(model, events, _)| {
            let window = ObservationWindow::new(20.0).unwrap();
            let pattern = PointPattern::new(events, window)
                .unwrap()
                .with_marking(model.is_marked())
                .unwrap();
            let ll = log_likelihood(&model, &pattern).unwrap();
            ll.is_finite().then_some((model, pattern))
        },
    )
}

#[test]
fn likelihood_factorizes_into_conditional_densities() {
    runner(50)
        .run(&pattern_strategy(), |(model, pattern)| {
            let single_pass = log_likelihood(&model, &pattern).unwrap();
            let sequential = sequential_log_likelihood(&model, &pattern);
            // Absolute for |ll| up to about 1; beyond that 1e-10 is below f64
            // resolution and the bound scales with the value.
            prop_assert!(
                (single_pass - sequential).abs() <= 1e-10 * (1.0 + single_pass.abs()),
                "{}: {single_pass} vs {sequential}",
                model.tag()
            );
            Ok(())
        })
        .unwrap();
}

#[test]
fn closed_and_numeric_likelihoods_agree() {
    runner(200)
        .run(&pattern_strategy(), |(model, pattern)| {
            let closed = log_likelihood(&model, &pattern).unwrap();
            let numeric = log_likelihood_numeric(&model, &pattern, 1e-9).unwrap();
            prop_assert!(
                (closed - numeric).abs() <= 1e-6 * (1.0 + closed.abs()),
                "{}: {closed} vs {numeric}",
                model.tag()
            );
            Ok(())
        })
        .unwrap();
}
