//! Temporal point processes specified by their conditional intensity.
//!
//! - [`model`]: the model catalogue, intensities, compensators, marks.
//! - [`simulate`]: inversion and thinning simulators, seeded batches.
//! - [`inference`]: exact log-likelihoods and maximum-likelihood fits.
//! - [`residuals`]: time-rescaling residual analysis.

pub mod error;
pub mod inference;
pub mod io;
pub mod model;
pub mod pattern;
pub mod quadrature;
pub mod residuals;
pub mod rng;
pub mod simulate;
pub mod special;
pub mod state;

pub use error::{Error, Result};
pub use inference::{
    fit_mle, log_likelihood, log_likelihood_numeric, poisson_mle, FitConfig, FitResult,
    ModelFamily, TerminationReason,
};
pub use model::{ModelSpec, ThinningEnvelope};
pub use pattern::{Event, History, ObservationWindow, PointPattern};
pub use residuals::{exp1_ks_test, rescale, residual_report, ResidualReport};
pub use rng::{RngStream, UniformSource};
pub use simulate::{
    invert_compensator, simulate_batch, simulate_inverse, simulate_thinning, Algorithm, Inversion,
    SimConfig,
};
pub use state::IntensityState;
