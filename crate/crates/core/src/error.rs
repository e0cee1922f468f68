use thiserror::Error;

/// Errors raised by the chart, kinematics and integration layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point not in patch {patch}")]
    NotInPatch { patch: usize },

    #[error("the zero vector is not a projective point")]
    ZeroVector,

    #[error("patch index {index} out of range 0..={max}")]
    PatchIndex { index: usize, max: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("patch Euler step degenerate; reduce dt or switch patch")]
    DegenerateStep,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step failed at t = {t}: {source}")]
    StepFailed { t: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
