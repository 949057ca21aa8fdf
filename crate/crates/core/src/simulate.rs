//! Simulation by compensator inversion and by Ogata's modified thinning.
//!
//! Both algorithms walk forward in time with an [`IntensityState`], draw
//! marks for marked models as soon as an event time is fixed, and stop at the
//! end of the observation window.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, DEFAULT_LOOKAHEAD};
use crate::pattern::{Event, History, ObservationWindow, PointPattern};
use crate::rng::{RngStream, UniformSource};
use crate::state::IntensityState;

/// Bracketing gives up beyond this distance from the lower bound.
pub const MAX_BRACKET: f64 = 1_152_921_504_606_846_976.0; // 2^60

/// Relative accuracy of `Λ*` at an inverted time.
const COMPENSATOR_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Inverse,
    Thinning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub algorithm: Algorithm,
    pub window: ObservationWindow,
    pub seed: u64,
    pub replicates: usize,
    /// Absolute time accuracy of compensator inversion.
    pub inversion_tolerance: f64,
    pub max_events: usize,
    /// Thinning horizon for intensities that rise between events.
    pub lookahead: f64,
}

impl SimConfig {
    pub fn new(algorithm: Algorithm, window: ObservationWindow, seed: u64) -> Self {
        SimConfig {
            algorithm,
            window,
            seed,
            replicates: 1,
            inversion_tolerance: 1e-9,
            max_events: 10_000_000,
            lookahead: DEFAULT_LOOKAHEAD,
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.inversion_tolerance.is_nan() || self.inversion_tolerance <= 0.0 {
            return Err(Error::InvalidConfig(
                "inversion tolerance must be positive".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if !self.lookahead.is_finite() || self.lookahead <= 0.0 {
            return Err(Error::InvalidConfig(
                "lookahead must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of inverting the compensator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inversion {
    Time(f64),
    /// `Λ*` stays below the target forever: the process has no further events.
    Terminated,
}

/// Smallest `t >= t_lower` with `Λ*(t) >= target`, given the events in
/// `history` (all at or before `t_lower`) and no events after `t_lower`.
pub fn invert_compensator(
    model: &ModelSpec,
    history: History<'_>,
    target: f64,
    t_lower: f64,
    tolerance: f64,
) -> Result<Inversion> {
    let mut state = IntensityState::from_events(model, history.up_to(t_lower))?;
    state.advance(t_lower)?;
    invert_from_state(&state, target, tolerance)
}

// Overflow of an exponentially growing compensator means it is far past
// any finite target.
fn compensator_or_infinity(state: &IntensityState<'_>, t: f64) -> Result<f64> {
    match state.compensator_at(t) {
        Ok(c) => Ok(c),
        Err(Error::NonFiniteResult(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Inversion starting at the state's reference time: bracket by doubling,
/// then bisect.
pub fn invert_from_state(
    state: &IntensityState<'_>,
    target: f64,
    tolerance: f64,
) -> Result<Inversion> {
    let t_lower = state.time();
    let base = state.compensator();
    if target <= base {
        return Ok(Inversion::Time(t_lower));
    }
    if state.exhausted_at(t_lower) {
        return Ok(Inversion::Terminated);
    }

    let needed = target - base;
    let mut step = match state.intensity_at(t_lower) {
        Ok(rate) if rate > 0.0 && rate.is_finite() => needed / rate,
        _ => 1.0,
    };
    if !step.is_finite() || step <= 0.0 {
        step = 1.0;
    }

    let mut lo = t_lower;
    let mut hi = t_lower + step;
    let mut c_hi;
    loop {
        c_hi = compensator_or_infinity(state, hi)?;
        if c_hi >= target {
            break;
        }
        if state.exhausted_at(hi) {
            return Ok(Inversion::Terminated);
        }
        if hi - t_lower > MAX_BRACKET {
            return match state.intensity_at(hi) {
                Ok(0.0) => Ok(Inversion::Terminated),
                _ => Err(Error::NoConvergence { target }),
            };
        }
        lo = hi;
        step *= 2.0;
        hi = t_lower + step;
    }

    loop {
        if hi - lo <= tolerance && c_hi - target <= COMPENSATOR_RTOL * (1.0 + target.abs()) {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let c_mid = compensator_or_infinity(state, mid)?;
        if c_mid >= target {
            hi = mid;
            c_hi = c_mid;
        } else {
            lo = mid;
        }
    }
    Ok(Inversion::Time(hi))
}

fn finish(
    events: Vec<Event>,
    model: &ModelSpec,
    window: ObservationWindow,
) -> Result<PointPattern> {
    PointPattern::new(events, window)?.with_marking(model.is_marked())
}

fn make_event<R: UniformSource + ?Sized>(
    model: &ModelSpec,
    time: f64,
    past: &[Event],
    rng: &mut R,
) -> Result<Event> {
    if model.is_marked() {
        let mark = model.sample_mark(time, History::new(past), rng)?;
        Ok(Event::marked(time, mark))
    } else {
        Ok(Event::new(time))
    }
}

/// Simulation by inversion with the replicate-0 stream of `config.seed`.
pub fn simulate_inverse(model: &ModelSpec, config: &SimConfig) -> Result<PointPattern> {
    let mut rng = RngStream::for_replicate(config.seed, 0);
    simulate_inverse_with(model, config, &mut rng)
}

/// Transforms unit-rate Poisson arrivals `s₁ < s₂ < …` through `Λ*⁻¹`.
///
/// Each target is anchored at the compensator value of the previous event,
/// `sₙ = Λ*(tₙ₋₁) + Eₙ` with `Eₙ ~ Exp(1)`, so inversion error does not
/// accumulate.
pub fn simulate_inverse_with<R: UniformSource + ?Sized>(
    model: &ModelSpec,
    config: &SimConfig,
    rng: &mut R,
) -> Result<PointPattern> {
    config.validate()?;
    let t_end = config.window.t_end();
    let mut state = IntensityState::new(model);
    let mut events: Vec<Event> = Vec::new();
    loop {
        let target = state.compensator() + rng.exponential(1.0);
        // Λ* is non-decreasing, so a target beyond Λ*(T) lands after the window.
        if compensator_or_infinity(&state, t_end)? < target {
            break;
        }
        let t = match invert_from_state(&state, target, config.inversion_tolerance)? {
            Inversion::Terminated => break,
            Inversion::Time(t) => t,
        };
        if t >= t_end {
            break;
        }
        if events.len() >= config.max_events {
            return Err(Error::EventCapExceeded {
                cap: config.max_events,
            });
        }
        let event = make_event(model, t, &events, rng)?;
        state.record(&event)?;
        events.push(event);
    }
    finish(events, model, config.window)
}

/// Ogata thinning with the replicate-0 stream of `config.seed`.
pub fn simulate_thinning(model: &ModelSpec, config: &SimConfig) -> Result<PointPattern> {
    let mut rng = RngStream::for_replicate(config.seed, 0);
    simulate_thinning_with(model, config, &mut rng)
}

/// Ogata's modified thinning.
///
/// At cursor `t`: take the envelope `(m, l)`, draw `s ~ Exp(m)` and
/// `U ~ Unif(0,1)`. If `s > l` move to `t + l`; otherwise move to `t + s` and
/// keep that point when it is inside the window and `U <= λ*(t+s) / m`.
pub fn simulate_thinning_with<R: UniformSource + ?Sized>(
    model: &ModelSpec,
    config: &SimConfig,
    rng: &mut R,
) -> Result<PointPattern> {
    config.validate()?;
    let t_end = config.window.t_end();
    let mut state = IntensityState::new(model);
    let mut events: Vec<Event> = Vec::new();
    let mut t = 0.0_f64;
    while t <= t_end {
        state.advance(t)?;
        let envelope = state.envelope(config.lookahead)?;
        let bound = envelope.bound;
        if !bound.is_finite() {
            return Err(Error::UnboundedEnvelope { time: t });
        }
        let s = if bound > 0.0 {
            rng.exponential(bound)
        } else {
            f64::INFINITY
        };
        let u = rng.uniform();
        if s > envelope.horizon {
            t += envelope.horizon;
            continue;
        }
        // Keeps the cursor strictly increasing when s is below t's resolution.
        let candidate = (t + s).max(t.next_up());
        t = candidate;
        if candidate >= t_end {
            continue;
        }
        let intensity = state.intensity_at(candidate)?;
        if intensity > bound * (1.0 + 1e-12) {
            return Err(Error::InvalidEnvelope {
                time: candidate,
                bound,
                intensity,
            });
        }
        if u <= intensity / bound {
            if events.len() >= config.max_events {
                return Err(Error::EventCapExceeded {
                    cap: config.max_events,
                });
            }
            let event = make_event(model, candidate, &events, rng)?;
            state.record(&event)?;
            events.push(event);
        }
    }
    finish(events, model, config.window)
}

/// Runs `config.replicates` independent replicates, in parallel, with
/// replicate `k` driven by `RngStream::for_replicate(config.seed, k)`.
/// Output order is replicate order.
pub fn simulate_batch(model: &ModelSpec, config: &SimConfig) -> Result<Vec<PointPattern>> {
    config.validate()?;
    (0..config.replicates)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::for_replicate(config.seed, k as u64);
            let run = match config.algorithm {
                Algorithm::Inverse => simulate_inverse_with(model, config, &mut rng),
                Algorithm::Thinning => simulate_thinning_with(model, config, &mut rng),
            };
            run.map_err(|e| Error::Replicate {
                index: k,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Dispatches on `config.algorithm` for a single run.
pub fn simulate(model: &ModelSpec, config: &SimConfig) -> Result<PointPattern> {
    match config.algorithm {
        Algorithm::Inverse => simulate_inverse(model, config),
        Algorithm::Thinning => simulate_thinning(model, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Event;
    use crate::rng::FixedUniforms;

    fn config(algorithm: Algorithm, t_end: f64, seed: u64) -> SimConfig {
        SimConfig::new(algorithm, ObservationWindow::new(t_end).unwrap(), seed)
    }

    #[test]
    fn inversion_examples() {
        let p = ModelSpec::hom_poisson(2.0).unwrap();
        let r = invert_compensator(&p, History::empty(), 3.0, 0.0, 1e-12).unwrap();
        match r {
            Inversion::Time(t) => assert!((t - 1.5).abs() < 1e-12),
            _ => panic!("expected a time"),
        }

        let hawkes = ModelSpec::hawkes_exp(0.5, 0.9, 1.0).unwrap();
        let ev = [Event::new(1.0)];
        let r = invert_compensator(
            &hawkes,
            History::new(&ev),
            1.568_908_502_945_702,
            1.0,
            1e-12,
        )
        .unwrap();
        match r {
            Inversion::Time(t) => assert!((t - 2.0).abs() < 1e-9),
            _ => panic!("expected a time"),
        }

        let terminating = ModelSpec::piecewise_poisson(vec![1.0], vec![1.0, 0.0]).unwrap();
        let r = invert_compensator(&terminating, History::empty(), 2.0, 0.0, 1e-9).unwrap();
        assert_eq!(r, Inversion::Terminated);

        let stopped = ModelSpec::stop_after_n(1.0, 0).unwrap();
        let r = invert_compensator(&stopped, History::empty(), 0.5, 0.0, 1e-9).unwrap();
        assert_eq!(r, Inversion::Terminated);
    }

    #[test]
    fn inverse_poisson_is_running_sum_of_draws() {
        let model = ModelSpec::hom_poisson(1.0).unwrap();
        let cfg = config(Algorithm::Inverse, 10.0, 5);
        let pattern = simulate_inverse(&model, &cfg).unwrap();

        let mut rng = RngStream::for_replicate(5, 0);
        let mut sum = 0.0;
        let mut expected = Vec::new();
        loop {
            sum += rng.exponential(1.0);
            if sum >= 10.0 {
                break;
            }
            expected.push(sum);
        }
        assert_eq!(pattern.len(), expected.len());
        for (a, b) in pattern.times().zip(&expected) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn thinning_with_fixed_draws() {
        // Rate-2 Poisson: s = -ln(U1)/2, accepted since U2 <= 1.
        let model = ModelSpec::hom_poisson(2.0).unwrap();
        let cfg = config(Algorithm::Thinning, 1.0, 0);
        let u = [0.5f64, 0.9, 0.1, 0.3];
        let mut rng = FixedUniforms::new(u.to_vec());
        let pattern = simulate_thinning_with(&model, &cfg, &mut rng).unwrap();
        let first = -(0.5f64).ln() / 2.0;
        assert_eq!(pattern.len(), 1);
        assert!((pattern.events()[0].time - first).abs() < 1e-15);
    }

    #[test]
    fn stop_after_n_never_exceeds_cap() {
        let model = ModelSpec::stop_after_n(1.0, 3).unwrap();
        for alg in [Algorithm::Inverse, Algorithm::Thinning] {
            let cfg = config(alg, 50.0, 11).with_replicates(50);
            for p in simulate_batch(&model, &cfg).unwrap() {
                assert!(p.len() <= 3);
            }
        }
    }

    #[test]
    fn event_cap_is_enforced() {
        let model = ModelSpec::hom_poisson(100.0).unwrap();
        let mut cfg = config(Algorithm::Thinning, 10.0, 1);
        cfg.max_events = 10;
        assert_eq!(
            simulate_thinning(&model, &cfg),
            Err(Error::EventCapExceeded { cap: 10 })
        );
        cfg.algorithm = Algorithm::Inverse;
        assert_eq!(
            simulate_inverse(&model, &cfg),
            Err(Error::EventCapExceeded { cap: 10 })
        );
    }

    #[test]
    fn batch_errors_carry_replicate_index() {
        let model = ModelSpec::hom_poisson(100.0).unwrap();
        let mut cfg = config(Algorithm::Inverse, 10.0, 1).with_replicates(3);
        cfg.max_events = 10;
        match simulate_batch(&model, &cfg) {
            Err(Error::Replicate { index, source }) => {
                assert_eq!(index, 0);
                assert!(matches!(*source, Error::EventCapExceeded { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn thinning_refuses_unbounded_hazard() {
        let model = ModelSpec::renewal_gamma(0.5, 1.0).unwrap();
        let cfg = config(Algorithm::Thinning, 10.0, 1);
        assert!(matches!(
            simulate_thinning(&model, &cfg),
            Err(Error::UnboundedEnvelope { .. })
        ));
    }

    #[test]
    fn marked_output_is_marked_even_when_empty() {
        let model = ModelSpec::etas_exp(1e-6, 0.2, 1.0, 1.0, 1.0).unwrap();
        let cfg = config(Algorithm::Inverse, 1.0, 1);
        let p = simulate_inverse(&model, &cfg).unwrap();
        assert!(p.is_marked());
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(Algorithm::Inverse, 1.0, 1);
        cfg.replicates = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(Algorithm::Inverse, 1.0, 1);
        cfg.inversion_tolerance = 0.0;
        assert!(cfg.validate().is_err());
    }
}
