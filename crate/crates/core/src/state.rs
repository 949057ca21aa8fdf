//! Incremental conditional-intensity state.
//!
//! [`IntensityState`] tracks `λ*` and `Λ*` forward in time with O(1) work per
//! event for every built-in model, so that simulating or scoring a pattern of
//! `n` events costs O(n) rather than O(n²). All recorded events are at or
//! before the reference time; queries at `t >= time()` assume no further
//! events in `[time(), t)`.

use crate::error::{Error, Result};
use crate::model::{
    check_log, event_mark, piecewise_cumulative, segment_index, self_correcting_segment, ModelSpec,
    ThinningEnvelope,
};
use crate::pattern::Event;
use crate::special;

#[derive(Debug, Clone)]
pub struct IntensityState<'m> {
    model: &'m ModelSpec,
    time: f64,
    count: usize,
    last_event: Option<f64>,
    // Hawkes/ETAS: intensity in excess of mu at `time`.
    excitation: f64,
    compensator: f64,
}

impl<'m> IntensityState<'m> {
    pub fn new(model: &'m ModelSpec) -> Self {
        IntensityState {
            model,
            time: 0.0,
            count: 0,
            last_event: None,
            excitation: 0.0,
            compensator: 0.0,
        }
    }

    /// State after replaying `events` in order.
    pub fn from_events(model: &'m ModelSpec, events: &[Event]) -> Result<Self> {
        let mut state = IntensityState::new(model);
        for event in events {
            state.record(event)?;
        }
        Ok(state)
    }

    pub fn model(&self) -> &'m ModelSpec {
        self.model
    }

    /// Reference time.
    pub fn time(&self) -> f64 {
        self.time
    }

    /// Number of recorded events.
    pub fn count(&self) -> usize {
        self.count
    }

    /// `Λ*` at the reference time.
    pub fn compensator(&self) -> f64 {
        self.compensator
    }

    fn age(&self, t: f64) -> f64 {
        t - self.last_event.unwrap_or(0.0)
    }

    /// `λ*(t)` for `t >= time()`; at `t == time()` this is the right limit,
    /// including the jumps of events recorded at `time()`.
    pub fn intensity_at(&self, t: f64) -> Result<f64> {
        debug_assert!(t >= self.time);
        let value = match *self.model {
            ModelSpec::HomPoisson { lambda } => lambda,
            ModelSpec::PiecewisePoisson {
                ref breakpoints,
                ref rates,
            } => rates[segment_index(breakpoints, t)],
            ModelSpec::RenewalGamma { shape, rate } => {
                special::gamma_hazard(shape, rate, self.age(t))
            }
            ModelSpec::HawkesExp { mu, gamma_rate, .. } => {
                mu + self.excitation * (-gamma_rate * (t - self.time)).exp()
            }
            ModelSpec::SelfCorrecting { mu, alpha } => {
                let log = mu * t - alpha * self.count as f64;
                check_log(log, "self-correcting intensity")?;
                log.exp()
            }
            ModelSpec::EtasExp { mu, gamma, .. } => {
                mu + self.excitation * (-gamma * (t - self.time)).exp()
            }
            ModelSpec::StopAfterN { lambda, n_max } => {
                if self.count < n_max {
                    lambda
                } else {
                    0.0
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteResult(format!(
                "{} intensity at t = {t}",
                self.model.tag()
            )));
        }
        Ok(value)
    }

    /// `Λ*(t) - Λ*(time())` for `t >= time()`.
    pub fn increment(&self, t: f64) -> Result<f64> {
        let dt = t - self.time;
        if dt <= 0.0 {
            return Ok(0.0);
        }
        let value = match *self.model {
            ModelSpec::HomPoisson { lambda } => lambda * dt,
            ModelSpec::PiecewisePoisson {
                ref breakpoints,
                ref rates,
            } => {
                piecewise_cumulative(breakpoints, rates, t)
                    - piecewise_cumulative(breakpoints, rates, self.time)
            }
            ModelSpec::RenewalGamma { shape, rate } => {
                special::gamma_cumulative_hazard(shape, rate, self.age(t))
                    - special::gamma_cumulative_hazard(shape, rate, self.age(self.time))
            }
            ModelSpec::HawkesExp { mu, gamma_rate, .. } => {
                mu * dt + self.excitation * -(-gamma_rate * dt).exp_m1() / gamma_rate
            }
            ModelSpec::SelfCorrecting { mu, alpha } => {
                self_correcting_segment(mu, alpha, self.count, self.time, t)?
            }
            ModelSpec::EtasExp { mu, gamma, .. } => {
                mu * dt + self.excitation * -(-gamma * dt).exp_m1() / gamma
            }
            ModelSpec::StopAfterN { lambda, n_max } => {
                if self.count < n_max {
                    lambda * dt
                } else {
                    0.0
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteResult(format!(
                "{} compensator at t = {t}",
                self.model.tag()
            )));
        }
        Ok(value.max(0.0))
    }

    /// `Λ*(t)` for `t >= time()`.
    pub fn compensator_at(&self, t: f64) -> Result<f64> {
        // History-free compensators are evaluated directly, so summing
        // increments cannot drift from the closed form.
        match *self.model {
            ModelSpec::HomPoisson { lambda } if t >= self.time => Ok(lambda * t),
            ModelSpec::PiecewisePoisson {
                ref breakpoints,
                ref rates,
            } if t >= self.time => Ok(piecewise_cumulative(breakpoints, rates, t)),
            _ => Ok(self.compensator + self.increment(t)?),
        }
    }

    /// Moves the reference time forward to `t` without recording an event.
    pub fn advance(&mut self, t: f64) -> Result<()> {
        if t <= self.time {
            return Ok(());
        }
        self.compensator = self.compensator_at(t)?;
        match *self.model {
            ModelSpec::HawkesExp { gamma_rate, .. } => {
                self.excitation *= (-gamma_rate * (t - self.time)).exp();
            }
            ModelSpec::EtasExp { gamma, .. } => {
                self.excitation *= (-gamma * (t - self.time)).exp();
            }
            _ => {}
        }
        self.time = t;
        Ok(())
    }

    /// Advances to `event.time` and applies the event's effect.
    pub fn record(&mut self, event: &Event) -> Result<()> {
        self.advance(event.time)?;
        match *self.model {
            ModelSpec::HawkesExp {
                alpha, gamma_rate, ..
            } => self.excitation += alpha * gamma_rate,
            ModelSpec::EtasExp { alpha, beta, .. } => {
                self.excitation += alpha * (beta * event_mark(event)?).exp();
            }
            _ => {}
        }
        self.count += 1;
        self.last_event = Some(event.time);
        Ok(())
    }

    /// True when `λ*` is zero from `t` on unless new events arrive.
    pub fn exhausted_at(&self, t: f64) -> bool {
        match *self.model {
            ModelSpec::PiecewisePoisson {
                ref breakpoints,
                ref rates,
            } => rates[segment_index(breakpoints, t)..]
                .iter()
                .all(|&r| r == 0.0),
            ModelSpec::StopAfterN { n_max, .. } => self.count >= n_max,
            _ => false,
        }
    }

    /// Thinning envelope at the reference time.
    ///
    /// Models whose intensity never rises between events get
    /// `bound = λ*(time+)` and an infinite horizon. Rising intensities use a
    /// finite horizon and the value at its right end. A bound of 0 means no
    /// event can occur within the horizon.
    pub fn envelope(&self, lookahead: f64) -> Result<ThinningEnvelope> {
        let t = self.time;
        match *self.model {
            ModelSpec::PiecewisePoisson {
                ref breakpoints,
                ref rates,
            } => {
                let j = segment_index(breakpoints, t);
                let current = rates[j];
                if rates[j + 1..].iter().all(|&r| r <= current) {
                    Ok(ThinningEnvelope {
                        bound: current,
                        horizon: f64::INFINITY,
                    })
                } else {
                    Ok(ThinningEnvelope {
                        bound: current.max(rates[j + 1]),
                        horizon: breakpoints[j] - t,
                    })
                }
            }
            ModelSpec::RenewalGamma { shape, .. } if shape > 1.0 => Ok(ThinningEnvelope {
                bound: self.intensity_at(t + lookahead)?,
                horizon: lookahead,
            }),
            ModelSpec::SelfCorrecting { .. } => Ok(ThinningEnvelope {
                bound: self.intensity_at(t + lookahead)?,
                horizon: lookahead,
            }),
            ModelSpec::RenewalGamma { shape, rate } => {
                // Decreasing hazard; unbounded at a renewal when shape < 1.
                Ok(ThinningEnvelope {
                    bound: special::gamma_hazard(shape, rate, self.age(t)),
                    horizon: f64::INFINITY,
                })
            }
            _ => Ok(ThinningEnvelope {
                bound: self.intensity_at(t)?,
                horizon: f64::INFINITY,
            }),
        }
    }
}
