//! The model catalogue and direct evaluation of conditional intensities,
//! compensators, and mark densities.
//!
//! Every model is specified by its conditional intensity `λ*(t)`, the event
//! rate at `t` given all events strictly before `t`. The compensator
//! `Λ*(t) = ∫₀ᵗ λ*(s) ds` has a closed form for each variant. The
//! functions here evaluate both directly from an explicit history; the
//! incremental [`IntensityState`] is the fast path used by simulation and
//! likelihood code.
//!
//! Gamma renewal parameters are `(shape, rate)`: mean interevent time is
//! `shape / rate`, coefficient of variation `1 / √shape`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{Event, History};
use crate::rng::UniformSource;
use crate::special;
use crate::state::IntensityState;

/// Largest exponent accepted before an exponentially growing intensity is
/// reported as overflowing.
pub const MAX_LOG_INTENSITY: f64 = 700.0;

/// Default lookahead for models whose intensity rises between events.
pub const DEFAULT_LOOKAHEAD: f64 = 1.0;

/// A model family together with its parameters.
///
/// The JSON form is `{"model": "<tag>", "params": {...}}` with the variant
/// tag in snake case and parameter names as in the variant fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "model",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum ModelSpec {
    /// Constant rate.
    HomPoisson { lambda: f64 },
    /// Rate `rates[0]` on `[0, breakpoints[0])`, `rates[i]` on
    /// `[breakpoints[i-1], breakpoints[i])`, and the last rate from the last
    /// breakpoint on. Right-continuous at breakpoints.
    PiecewisePoisson {
        breakpoints: Vec<f64>,
        rates: Vec<f64>,
    },
    /// Renewal process with Gamma(shape, rate) interevent times, renewing at 0.
    RenewalGamma { shape: f64, rate: f64 },
    /// `μ + α Σ γ e^{-γ(t - tᵢ)}`: each event adds a unit-mass exponential kernel.
    HawkesExp {
        mu: f64,
        alpha: f64,
        gamma_rate: f64,
    },
    /// `exp(μ t - α N(t-))`.
    SelfCorrecting { mu: f64, alpha: f64 },
    /// Ground intensity `μ + α Σ e^{β κᵢ} e^{-γ(t - tᵢ)}` with
    /// Exponential(δ) magnitudes.
    EtasExp {
        mu: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
    },
    /// Poisson with rate `lambda` until `n_max` events have occurred, then 0.
    StopAfterN { lambda: f64, n_max: usize },
}

/// Dominating constant rate `bound` valid on `(t, t + horizon]` provided no
/// event occurs in that interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinningEnvelope {
    pub bound: f64,
    pub horizon: f64,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        });
    }
    Ok(())
}

impl ModelSpec {
    pub fn hom_poisson(lambda: f64) -> Result<Self> {
        ModelSpec::HomPoisson { lambda }.validated()
    }

    pub fn piecewise_poisson(breakpoints: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        ModelSpec::PiecewisePoisson { breakpoints, rates }.validated()
    }

    pub fn renewal_gamma(shape: f64, rate: f64) -> Result<Self> {
        ModelSpec::RenewalGamma { shape, rate }.validated()
    }

    pub fn hawkes_exp(mu: f64, alpha: f64, gamma_rate: f64) -> Result<Self> {
        ModelSpec::HawkesExp {
            mu,
            alpha,
            gamma_rate,
        }
        .validated()
    }

    pub fn self_correcting(mu: f64, alpha: f64) -> Result<Self> {
        ModelSpec::SelfCorrecting { mu, alpha }.validated()
    }

    pub fn etas_exp(mu: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        ModelSpec::EtasExp {
            mu,
            alpha,
            beta,
            gamma,
            delta,
        }
        .validated()
    }

    pub fn stop_after_n(lambda: f64, n_max: usize) -> Result<Self> {
        ModelSpec::StopAfterN { lambda, n_max }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter constraints of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::HomPoisson { lambda } => positive("lambda", *lambda),
            ModelSpec::PiecewisePoisson { breakpoints, rates } => {
                if rates.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidConfig(format!(
                        "piecewise_poisson needs one more rate than breakpoints ({} rates, {} breakpoints)",
                        rates.len(),
                        breakpoints.len()
                    )));
                }
                for &r in rates {
                    if !r.is_finite() || r < 0.0 {
                        return Err(Error::InvalidParameter {
                            name: "rates",
                            value: r,
                            reason: "must be finite and non-negative",
                        });
                    }
                }
                let mut prev = 0.0;
                for &b in breakpoints {
                    if !b.is_finite() || b <= prev {
                        return Err(Error::InvalidParameter {
                            name: "breakpoints",
                            value: b,
                            reason: "must be finite, positive and strictly increasing",
                        });
                    }
                    prev = b;
                }
                Ok(())
            }
            ModelSpec::RenewalGamma { shape, rate } => {
                positive("shape", *shape)?;
                positive("rate", *rate)
            }
            ModelSpec::HawkesExp {
                mu,
                alpha,
                gamma_rate,
            } => {
                positive("mu", *mu)?;
                positive("alpha", *alpha)?;
                positive("gamma_rate", *gamma_rate)
            }
            ModelSpec::SelfCorrecting { mu, alpha } => {
                positive("mu", *mu)?;
                positive("alpha", *alpha)
            }
            ModelSpec::EtasExp {
                mu,
                alpha,
                beta,
                gamma,
                delta,
            } => {
                positive("mu", *mu)?;
                positive("alpha", *alpha)?;
                positive("beta", *beta)?;
                positive("gamma", *gamma)?;
                positive("delta", *delta)
            }
            ModelSpec::StopAfterN { lambda, .. } => positive("lambda", *lambda),
        }
    }

    /// Parses and validates a model spec document.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("model spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model spec serializes")
    }

    /// The variant tag used in model spec files.
    pub fn tag(&self) -> &'static str {
        match self {
            ModelSpec::HomPoisson { .. } => "hom_poisson",
            ModelSpec::PiecewisePoisson { .. } => "piecewise_poisson",
            ModelSpec::RenewalGamma { .. } => "renewal_gamma",
            ModelSpec::HawkesExp { .. } => "hawkes_exp",
            ModelSpec::SelfCorrecting { .. } => "self_correcting",
            ModelSpec::EtasExp { .. } => "etas_exp",
            ModelSpec::StopAfterN { .. } => "stop_after_n",
        }
    }

    pub fn is_marked(&self) -> bool {
        matches!(self, ModelSpec::EtasExp { .. })
    }

    /// `λ*(t)` given the events of `history` strictly before `t` (the ground
    /// intensity for marked models).
    pub fn evaluate_intensity(&self, t: f64, history: History<'_>) -> Result<f64> {
        self.intensity_given_past(t, history.before(t))
    }

    /// `λ*(t)` treating every event in `past` as having occurred by `t`. With
    /// an event at `t` itself this is the right limit `λ*(t+)`.
    pub fn intensity_given_past(&self, t: f64, past: &[Event]) -> Result<f64> {
        let value = match self {
            ModelSpec::HomPoisson { lambda } => *lambda,
            ModelSpec::PiecewisePoisson { breakpoints, rates } => {
                rates[segment_index(breakpoints, t)]
            }
            ModelSpec::RenewalGamma { shape, rate } => {
                let age = t - past.last().map_or(0.0, |e| e.time);
                special::gamma_hazard(*shape, *rate, age)
            }
            ModelSpec::HawkesExp {
                mu,
                alpha,
                gamma_rate,
            } => {
                let sum: f64 = past
                    .iter()
                    .map(|e| (-gamma_rate * (t - e.time)).exp())
                    .sum();
                mu + alpha * gamma_rate * sum
            }
            ModelSpec::SelfCorrecting { mu, alpha } => {
                let log = mu * t - alpha * past.len() as f64;
                check_log(log, "self-correcting intensity")?;
                log.exp()
            }
            ModelSpec::EtasExp {
                mu,
                alpha,
                beta,
                gamma,
                ..
            } => {
                let mut sum = 0.0;
                for e in past {
                    sum += (beta * event_mark(e)? - gamma * (t - e.time)).exp();
                }
                mu + alpha * sum
            }
            ModelSpec::StopAfterN { lambda, n_max } => {
                if past.len() < *n_max {
                    *lambda
                } else {
                    0.0
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteResult(format!(
                "{} intensity at t = {t}",
                self.tag()
            )));
        }
        Ok(value)
    }

    /// `Λ*(t)` in closed form, using the events of `history` before `t`.
    pub fn evaluate_compensator(&self, t: f64, history: History<'_>) -> Result<f64> {
        let past = history.before(t);
        let value = match self {
            ModelSpec::HomPoisson { lambda } => lambda * t,
            ModelSpec::PiecewisePoisson { breakpoints, rates } => {
                piecewise_cumulative(breakpoints, rates, t)
            }
            ModelSpec::RenewalGamma { shape, rate } => {
                let mut total = 0.0;
                let mut last = 0.0;
                for e in past {
                    total += special::gamma_cumulative_hazard(*shape, *rate, e.time - last);
                    last = e.time;
                }
                total + special::gamma_cumulative_hazard(*shape, *rate, t - last)
            }
            ModelSpec::HawkesExp {
                mu,
                alpha,
                gamma_rate,
            } => {
                let sum: f64 = past
                    .iter()
                    .map(|e| -(-gamma_rate * (t - e.time)).exp_m1())
                    .sum();
                mu * t + alpha * sum
            }
            ModelSpec::SelfCorrecting { mu, alpha } => {
                let mut total = 0.0;
                let mut start = 0.0;
                for (count, end) in past.iter().map(|e| e.time).chain([t]).enumerate() {
                    total += self_correcting_segment(*mu, *alpha, count, start, end)?;
                    start = end;
                }
                total
            }
            ModelSpec::EtasExp {
                mu,
                alpha,
                beta,
                gamma,
                ..
            } => {
                let mut sum = 0.0;
                for e in past {
                    sum += (beta * event_mark(e)?).exp() * -(-gamma * (t - e.time)).exp_m1();
                }
                mu * t + alpha * sum / gamma
            }
            ModelSpec::StopAfterN { lambda, n_max } => {
                if past.len() < *n_max {
                    lambda * t
                } else if *n_max == 0 {
                    0.0
                } else {
                    lambda * past[n_max - 1].time
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteResult(format!(
                "{} compensator at t = {t}",
                self.tag()
            )));
        }
        Ok(value)
    }

    /// Envelope with the default lookahead. `history` may include events at
    /// `t` itself; the bound covers the right limit `λ*(t+)`.
    pub fn thinning_envelope(&self, t: f64, history: History<'_>) -> Result<ThinningEnvelope> {
        self.thinning_envelope_with_lookahead(t, history, DEFAULT_LOOKAHEAD)
    }

    pub fn thinning_envelope_with_lookahead(
        &self,
        t: f64,
        history: History<'_>,
        lookahead: f64,
    ) -> Result<ThinningEnvelope> {
        let mut state = IntensityState::from_events(self, history.up_to(t))?;
        state.advance(t)?;
        state.envelope(lookahead)
    }

    /// `ln f*(κ | t)`. Marks of the built-in marked model are unpredictable,
    /// so `t` and `history` do not enter.
    pub fn mark_log_density(&self, kappa: f64, _t: f64, _history: History<'_>) -> Result<f64> {
        match self {
            ModelSpec::EtasExp { delta, .. } => {
                if kappa < 0.0 {
                    Ok(f64::NEG_INFINITY)
                } else {
                    Ok(delta.ln() - delta * kappa)
                }
            }
            _ => Err(Error::UnmarkedModel),
        }
    }

    /// Draws a mark by inverting the mark CDF: `κ = -ln(U) / δ`.
    pub fn sample_mark<R: UniformSource + ?Sized>(
        &self,
        _t: f64,
        _history: History<'_>,
        rng: &mut R,
    ) -> Result<f64> {
        match self {
            ModelSpec::EtasExp { delta, .. } => Ok(rng.exponential(*delta)),
            _ => Err(Error::UnmarkedModel),
        }
    }

    /// True when `λ*` is zero at `t` and stays zero for all later times in
    /// the absence of new events.
    pub fn is_exhausted(&self, t: f64, history: History<'_>) -> bool {
        match self {
            ModelSpec::PiecewisePoisson { breakpoints, rates } => rates
                [segment_index(breakpoints, t)..]
                .iter()
                .all(|&r| r == 0.0),
            ModelSpec::StopAfterN { n_max, .. } => history.before(t).len() >= *n_max,
            _ => false,
        }
    }

    /// Points in the open interval `(a, b)` where the intensity may jump for
    /// reasons other than an event.
    pub fn discontinuities(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            ModelSpec::PiecewisePoisson { breakpoints, .. } => breakpoints
                .iter()
                .copied()
                .filter(|&x| x > a && x < b)
                .collect(),
            _ => Vec::new(),
        }
    }
}

pub(crate) fn event_mark(event: &Event) -> Result<f64> {
    event.mark.ok_or(Error::MarkMismatch {
        model_marked: true,
        pattern_marked: false,
    })
}

pub(crate) fn check_log(log: f64, what: &str) -> Result<()> {
    if log > MAX_LOG_INTENSITY || log.is_nan() {
        return Err(Error::NonFiniteResult(format!(
            "{what}: log value {log} exceeds {MAX_LOG_INTENSITY}"
        )));
    }
    Ok(())
}

/// Index of the segment containing `t`, right-continuous at breakpoints.
pub(crate) fn segment_index(breakpoints: &[f64], t: f64) -> usize {
    breakpoints.partition_point(|&b| b <= t)
}

pub(crate) fn piecewise_cumulative(breakpoints: &[f64], rates: &[f64], t: f64) -> f64 {
    let mut total = 0.0;
    let mut start = 0.0;
    for (i, &rate) in rates.iter().enumerate() {
        let end = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        if t <= start {
            break;
        }
        if rate > 0.0 {
            total += rate * (t.min(end) - start);
        }
        start = end;
    }
    total
}

/// `∫ₐᵇ exp(μ s - α n) ds`, evaluated in log space.
pub(crate) fn self_correcting_segment(
    mu: f64,
    alpha: f64,
    n: usize,
    a: f64,
    b: f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let log_top = mu * b - alpha * n as f64;
    check_log(log_top, "self-correcting compensator")?;
    Ok((log_top + (-(-mu * (b - a)).exp_m1()).ln() - mu.ln()).exp())
}
