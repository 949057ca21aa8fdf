//! Likelihood evaluation and maximum-likelihood fitting.

mod fit;
mod likelihood;
mod nelder_mead;

pub use fit::{fit_mle, FitConfig, FitResult, ModelFamily, TerminationReason};
pub use likelihood::{log_likelihood, log_likelihood_numeric, poisson_mle};
pub use nelder_mead::{minimize, NelderMeadOptions, NelderMeadOutcome};
