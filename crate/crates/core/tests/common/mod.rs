#![allow(dead_code)]

use pointproc_core::{Event, ModelSpec};
use proptest::prelude::*;

pub const FAMILIES: [&str; 7] = [
    "hom_poisson",
    "piecewise_poisson",
    "renewal_gamma",
    "hawkes_exp",
    "self_correcting",
    "etas_exp",
    "stop_after_n",
];

pub fn arb_model(family: &'static str) -> BoxedStrategy<ModelSpec> {
    match family {
        "hom_poisson" => (0.01..10.0f64)
            .prop_map(|l| ModelSpec::hom_poisson(l).unwrap())
            .boxed(),
        "piecewise_poisson" => prop::collection::vec((0.1..5.0f64, 0.0..5.0f64), 1..5)
            .prop_flat_map(|segs| (Just(segs), 0.0..5.0f64, any::<bool>()))
            .prop_map(|(segs, last, zero_somewhere)| {
                let mut breakpoints = Vec::new();
                let mut rates = Vec::new();
                let mut edge = 0.0;
                for (len, rate) in segs {
                    edge += len;
                    breakpoints.push(edge);
                    rates.push(rate);
                }
                rates.push(last);
                if zero_somewhere {
                    rates[0] = 0.0;
                }
                ModelSpec::piecewise_poisson(breakpoints, rates).unwrap()
            })
            .boxed(),
        "renewal_gamma" => (0.02..5.0f64, 0.1..10.0f64)
            .prop_map(|(k, r)| ModelSpec::renewal_gamma(k, r).unwrap())
            .boxed(),
        "hawkes_exp" => (0.05..2.0f64, 0.01..0.95f64, 0.1..5.0f64)
            .prop_map(|(m, a, g)| ModelSpec::hawkes_exp(m, a, g).unwrap())
            .boxed(),
        "self_correcting" => (0.05..1.5f64, 0.01..1.0f64)
            .prop_map(|(m, a)| ModelSpec::self_correcting(m, a).unwrap())
            .boxed(),
        "etas_exp" => (
            0.05..2.0f64,
            0.01..0.5f64,
            0.01..2.0f64,
            0.1..5.0f64,
            0.5..5.0f64,
        )
            .prop_map(|(m, a, b, g, d)| ModelSpec::etas_exp(m, a, b, g, d).unwrap())
            .boxed(),
        "stop_after_n" => (0.1..5.0f64, 1usize..10)
            .prop_map(|(l, n)| ModelSpec::stop_after_n(l, n).unwrap())
            .boxed(),
        other => panic!("unknown family {other}"),
    }
}

/// Strictly increasing event times in (0, horizon), marked when `marked`.
pub fn arb_events(marked: bool, max_len: usize, horizon: f64) -> BoxedStrategy<Vec<Event>> {
    prop::collection::vec((0.0..1.0f64, 0.0..3.0f64), 0..=max_len)
        .prop_map(move |raw| {
            let mut times: Vec<(f64, f64)> = raw
                .into_iter()
                .map(|(u, k)| (1e-3 + u * (horizon - 2e-3), k))
                .collect();
            times.sort_by(|a, b| a.0.total_cmp(&b.0));
            times.dedup_by(|a, b| a.0 - b.0 < 1e-6);
            times
                .into_iter()
                .map(|(t, k)| {
                    if marked {
                        Event::marked(t, k)
                    } else {
                        Event::new(t)
                    }
                })
                .collect()
        })
        .boxed()
}

/// A model, a history on (0, 20) and an evaluation time in (0, 25].
pub fn arb_case(family: &'static str) -> BoxedStrategy<(ModelSpec, Vec<Event>, f64)> {
    arb_model(family)
        .prop_flat_map(|m| {
            let marked = m.is_marked();
            (Just(m), arb_events(marked, 12, 20.0), 0.01..25.0f64)
        })
        .boxed()
}

/// Any zoo model with a case, family chosen uniformly.
pub fn arb_any_case() -> BoxedStrategy<(ModelSpec, Vec<Event>, f64)> {
    prop::sample::select(FAMILIES.to_vec())
        .prop_flat_map(arb_case)
        .boxed()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}
