use thiserror::Error;

/// Errors produced by the segmentation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("window too short: need at least {min} samples, got {got}")]
    WindowTooShort { min: usize, got: usize },
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("firing rate exceeds sample rate: rate {rate_hz} Hz with dt {dt} s gives probability {probability}")]
    FiringRateExceedsSampleRate {
        rate_hz: f64,
        dt: f64,
        probability: f64,
    },
    #[error("signal too short: need at least {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },
    #[error("sensitivity undefined: ground truth has no boundaries")]
    SensitivityUndefined,
    #[error("unstable AR model: {0}")]
    UnstableArModel(String),
    #[error("missing AR model for state '{0}'")]
    MissingModel(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid boundary set: {0}")]
    InvalidBoundaries(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
