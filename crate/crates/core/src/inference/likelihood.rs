use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pattern::{History, PointPattern};
use crate::quadrature::integrate_intensity;
use crate::state::IntensityState;

fn check_marking(model: &ModelSpec, pattern: &PointPattern) -> Result<()> {
    if model.is_marked() != pattern.is_marked() {
        return Err(Error::MarkMismatch {
            model_marked: model.is_marked(),
            pattern_marked: pattern.is_marked(),
        });
    }
    Ok(())
}

/// Log-likelihood `Σ ln λ*(tᵢ) [+ Σ ln f*(κᵢ | tᵢ)] - Λ*(T)` in one pass.
///
/// Returns `-inf` if the intensity vanishes at an observed event.
pub fn log_likelihood(model: &ModelSpec, pattern: &PointPattern) -> Result<f64> {
    check_marking(model, pattern)?;
    let events = pattern.events();
    let mut state = IntensityState::new(model);
    let mut total = 0.0;
    for (i, event) in events.iter().enumerate() {
        let intensity = state.intensity_at(event.time)?;
        if intensity <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += intensity.ln();
        if let Some(mark) = event.mark {
            total += model.mark_log_density(mark, event.time, History::new(&events[..i]))?;
        }
        state.record(event)?;
    }
    total -= state.compensator_at(pattern.t_end())?;
    if total.is_nan() {
        return Err(Error::NonFiniteResult("log-likelihood is NaN".into()));
    }
    Ok(total)
}

/// Same contract as [`log_likelihood`] with `Λ*(T)` obtained by adaptive
/// quadrature of the directly evaluated intensity.
pub fn log_likelihood_numeric(
    model: &ModelSpec,
    pattern: &PointPattern,
    quad_tolerance: f64,
) -> Result<f64> {
    check_marking(model, pattern)?;
    let history = History::from(pattern);
    let mut total = 0.0;
    for event in pattern.events() {
        let intensity = model.evaluate_intensity(event.time, history)?;
        if intensity <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += intensity.ln();
        if let Some(mark) = event.mark {
            total += model.mark_log_density(mark, event.time, history)?;
        }
    }
    total -= integrate_intensity(model, history, pattern.t_end(), quad_tolerance)?;
    Ok(total)
}

/// Closed-form rate estimate `n / T` of a homogeneous Poisson process. An
/// empty pattern gives 0, the limit of the maximizer.
pub fn poisson_mle(pattern: &PointPattern) -> f64 {
    pattern.len() as f64 / pattern.t_end()
}
