use thiserror::Error;

/// Errors raised by the models, solvers and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate pulses: total Rabi frequency {total:e} is below the floor {floor:e}")]
    DegeneratePulse { total: f64, floor: f64 },

    #[error("state has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dark state is required for the nonlinear linearization")]
    MissingDarkState,

    #[error("operation is only defined for linear systems")]
    NonlinearVariant,

    #[error("adiabatic elimination needs a nonzero complex detuning (delta + i gamma)")]
    SingularElimination,

    #[error("dark-state manifold singular at t = {t}: {reason}")]
    ManifoldSingularity { t: f64, reason: String },

    #[error("numerical singularity at t = {t}: {reason}")]
    Singularity { t: f64, reason: String },

    #[error("integration would take {steps} steps, more than the limit of {limit}")]
    StepLimit { steps: f64, limit: f64 },

    #[error("discriminant has no sign change on [{t0}, {t1}]")]
    NoCrossing { t0: f64, t1: f64 },

    #[error("discriminant changes sign {count} times on [{t0}, {t1}], expected exactly two")]
    TooManyCrossings { count: usize, t0: f64, t1: f64 },

    #[error("time series do not overlap")]
    DisjointWindows,

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
}

impl Error {
    /// True for failures that come from the numerics rather than from the input.
    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::DegeneratePulse { .. }
                | Error::ManifoldSingularity { .. }
                | Error::Singularity { .. }
                | Error::SingularElimination
                | Error::StepLimit { .. }
                | Error::NoCrossing { .. }
                | Error::TooManyCrossings { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
