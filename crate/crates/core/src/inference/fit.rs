use serde::{Deserialize, Serialize};

use super::likelihood::log_likelihood;
use super::nelder_mead::{minimize, NelderMeadOptions};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pattern::PointPattern;

/// A model family whose continuous parameters are estimated. Structural
/// settings (breakpoints, event cap) are fixed by the family itself.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    HomPoisson,
    PiecewisePoisson { breakpoints: Vec<f64> },
    RenewalGamma,
    HawkesExp,
    SelfCorrecting,
    EtasExp,
    StopAfterN { n_max: usize },
}

impl ModelFamily {
    pub fn of(model: &ModelSpec) -> Self {
        match model {
            ModelSpec::HomPoisson { .. } => ModelFamily::HomPoisson,
            ModelSpec::PiecewisePoisson { breakpoints, .. } => ModelFamily::PiecewisePoisson {
                breakpoints: breakpoints.clone(),
            },
            ModelSpec::RenewalGamma { .. } => ModelFamily::RenewalGamma,
            ModelSpec::HawkesExp { .. } => ModelFamily::HawkesExp,
            ModelSpec::SelfCorrecting { .. } => ModelFamily::SelfCorrecting,
            ModelSpec::EtasExp { .. } => ModelFamily::EtasExp,
            ModelSpec::StopAfterN { n_max, .. } => ModelFamily::StopAfterN { n_max: *n_max },
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ModelFamily::HomPoisson => "hom_poisson",
            ModelFamily::PiecewisePoisson { .. } => "piecewise_poisson",
            ModelFamily::RenewalGamma => "renewal_gamma",
            ModelFamily::HawkesExp => "hawkes_exp",
            ModelFamily::SelfCorrecting => "self_correcting",
            ModelFamily::EtasExp => "etas_exp",
            ModelFamily::StopAfterN { .. } => "stop_after_n",
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        let fixed: &[&str] = match self {
            ModelFamily::HomPoisson | ModelFamily::StopAfterN { .. } => &["lambda"],
            ModelFamily::PiecewisePoisson { breakpoints } => {
                return (0..=breakpoints.len())
                    .map(|i| format!("rates[{i}]"))
                    .collect();
            }
            ModelFamily::RenewalGamma => &["shape", "rate"],
            ModelFamily::HawkesExp => &["mu", "alpha", "gamma_rate"],
            ModelFamily::SelfCorrecting => &["mu", "alpha"],
            ModelFamily::EtasExp => &["mu", "alpha", "beta", "gamma", "delta"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    pub fn dimension(&self) -> usize {
        self.param_names().len()
    }

    /// Builds the model for a parameter vector in `param_names` order.
    pub fn build(&self, p: &[f64]) -> Result<ModelSpec> {
        if p.len() != self.dimension() {
            return Err(Error::InvalidConfig(format!(
                "{} takes {} parameters, got {}",
                self.tag(),
                self.dimension(),
                p.len()
            )));
        }
        match self {
            ModelFamily::HomPoisson => ModelSpec::hom_poisson(p[0]),
            ModelFamily::PiecewisePoisson { breakpoints } => {
                ModelSpec::piecewise_poisson(breakpoints.clone(), p.to_vec())
            }
            ModelFamily::RenewalGamma => ModelSpec::renewal_gamma(p[0], p[1]),
            ModelFamily::HawkesExp => ModelSpec::hawkes_exp(p[0], p[1], p[2]),
            ModelFamily::SelfCorrecting => ModelSpec::self_correcting(p[0], p[1]),
            ModelFamily::EtasExp => ModelSpec::etas_exp(p[0], p[1], p[2], p[3], p[4]),
            ModelFamily::StopAfterN { n_max } => ModelSpec::stop_after_n(p[0], *n_max),
        }
    }

    /// Parameter vector of `model` in `param_names` order.
    pub fn params(model: &ModelSpec) -> Vec<f64> {
        match model {
            ModelSpec::HomPoisson { lambda } | ModelSpec::StopAfterN { lambda, .. } => {
                vec![*lambda]
            }
            ModelSpec::PiecewisePoisson { rates, .. } => rates.clone(),
            ModelSpec::RenewalGamma { shape, rate } => vec![*shape, *rate],
            ModelSpec::HawkesExp {
                mu,
                alpha,
                gamma_rate,
            } => vec![*mu, *alpha, *gamma_rate],
            ModelSpec::SelfCorrecting { mu, alpha } => vec![*mu, *alpha],
            ModelSpec::EtasExp {
                mu,
                alpha,
                beta,
                gamma,
                delta,
            } => vec![*mu, *alpha, *beta, *gamma, *delta],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub initial_params: Vec<f64>,
    pub max_iterations: usize,
    /// Simplex diameter threshold on the log-parameter scale.
    pub param_tolerance: f64,
    /// Threshold on the spread of negative log-likelihoods over the simplex.
    pub objective_tolerance: f64,
}

impl FitConfig {
    pub fn new(initial_params: Vec<f64>) -> Self {
        FitConfig {
            initial_params,
            max_iterations: 2000,
            param_tolerance: 1e-8,
            objective_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    ToleranceMet,
    MaxIterations,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: ModelSpec,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination_reason: TerminationReason,
}

impl FitResult {
    /// Fitted parameters in family order.
    pub fn params(&self) -> Vec<f64> {
        ModelFamily::params(&self.model)
    }
}

/// Maximum-likelihood fit by Nelder–Mead on log-parameters.
///
/// The search is run twice: once from `initial_params`, then again from the
/// best vertex with a fresh simplex. The reported convergence is that of the
/// second run.
pub fn fit_mle(
    family: &ModelFamily,
    pattern: &PointPattern,
    config: &FitConfig,
) -> Result<FitResult> {
    if !(config.param_tolerance > 0.0 && config.objective_tolerance > 0.0) {
        return Err(Error::InvalidConfig(
            "fit tolerances must be positive".into(),
        ));
    }
    // The log transform is undefined on the boundary, whatever the length.
    if config
        .initial_params
        .iter()
        .any(|&p| !p.is_finite() || p <= 0.0)
    {
        return Err(Error::NonFiniteObjectiveAtStart);
    }
    if config.initial_params.len() != family.dimension() {
        return Err(Error::InvalidConfig(format!(
            "{} takes {} initial values, got {}",
            family.tag(),
            family.dimension(),
            config.initial_params.len()
        )));
    }
    let start_model = family.build(&config.initial_params)?;
    match log_likelihood(&start_model, pattern) {
        Ok(v) if v.is_finite() => {}
        Ok(_) => return Err(Error::NonFiniteObjectiveAtStart),
        Err(e) if e.is_numerical() => return Err(Error::NonFiniteObjectiveAtStart),
        Err(e) => return Err(e),
    }

    let objective = |theta: &[f64]| -> f64 {
        let params: Vec<f64> = theta.iter().map(|x| x.exp()).collect();
        match family.build(&params) {
            Ok(model) => match log_likelihood(&model, pattern) {
                Ok(ll) if ll.is_finite() => -ll,
                _ => f64::INFINITY,
            },
            Err(_) => f64::INFINITY,
        }
    };
    let options = NelderMeadOptions {
        max_iterations: config.max_iterations,
        x_tolerance: config.param_tolerance,
        f_tolerance: config.objective_tolerance,
        ..Default::default()
    };
    let start: Vec<f64> = config.initial_params.iter().map(|p| p.ln()).collect();
    let first = minimize(objective, &start, &options);
    let second = minimize(objective, &first.x, &options);

    let params: Vec<f64> = second.x.iter().map(|x| x.exp()).collect();
    let model = family.build(&params)?;
    let log_likelihood = log_likelihood(&model, pattern)?;
    let termination_reason = if !log_likelihood.is_finite() {
        TerminationReason::NumericalFailure
    } else if second.converged {
        TerminationReason::ToleranceMet
    } else {
        TerminationReason::MaxIterations
    };
    Ok(FitResult {
        model,
        log_likelihood,
        iterations: first.iterations + second.iterations,
        converged: termination_reason == TerminationReason::ToleranceMet,
        termination_reason,
    })
}
