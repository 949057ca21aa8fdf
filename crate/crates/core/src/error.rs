use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate event time {time}: the process must be simple")]
    DuplicateTime { time: f64 },

    #[error("event time {time} outside the observation window [0, {t_end})")]
    OutOfWindow { time: f64, t_end: f64 },

    #[error("events are not sorted: {time} follows {previous}")]
    Unsorted { previous: f64, time: f64 },

    #[error("pattern mixes marked and unmarked events")]
    MixedMarks,

    #[error("non-finite or invalid value: {0}")]
    NonFiniteValue(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical overflow or non-finite result: {0}")]
    NonFiniteResult(String),

    #[error("model has no mark distribution")]
    UnmarkedModel,

    #[error("marked pattern/model mismatch (model marked: {model_marked}, pattern marked: {pattern_marked})")]
    MarkMismatch {
        model_marked: bool,
        pattern_marked: bool,
    },

    #[error("compensator inversion did not bracket target {target} within 2^60 time units")]
    NoConvergence { target: f64 },

    #[error("simulation exceeded the cap of {cap} events")]
    EventCapExceeded { cap: usize },

    #[error("thinning envelope {bound} violated by intensity {intensity} at t = {time}")]
    InvalidEnvelope {
        time: f64,
        bound: f64,
        intensity: f64,
    },

    #[error("no finite thinning envelope at t = {time}; use the inverse method")]
    UnboundedEnvelope { time: f64 },

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("adaptive quadrature failed on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("objective is not finite at the initial parameters")]
    NonFiniteObjectiveAtStart,
}

impl Error {
    /// True for failures of the numerics rather than of the input data.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFiniteResult(_)
            | Error::NoConvergence { .. }
            | Error::EventCapExceeded { .. }
            | Error::InvalidEnvelope { .. }
            | Error::UnboundedEnvelope { .. }
            | Error::QuadratureFailure { .. }
            | Error::NonFiniteObjectiveAtStart => true,
            Error::Replicate { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
