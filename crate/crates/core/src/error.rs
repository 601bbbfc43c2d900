use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("observation {index}: {reason}")]
    InvalidObservation { index: usize, reason: String },

    #[error("k = {k} out of range for n = {n} (need 1 <= k <= n-1)")]
    KOutOfRange { k: usize, n: usize },

    #[error("no uncensored observation above the threshold ({exceedances} exceedances)")]
    NoUncensoredExceedance { exceedances: usize },

    #[error("censored observation {index} has no expert tail index and no fallback is configured")]
    MissingBeta { index: usize },

    #[error("observation {index} (z = {z}) lies below the scale x0 = {x0}")]
    BelowScale { index: usize, z: f64, x0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sum of log-spacings is zero")]
    DegenerateLogSpacing,

    #[error("no censored observations carry expert information")]
    NoCensored,

    #[error("no interior maximum found in the search bracket")]
    NoInteriorMaximum,

    #[error("posterior mass on [{b1}, {b2}] underflows")]
    IntervalMassUnderflow { b1: f64, b2: f64 },

    #[error("level {q} beyond the reach of the Kaplan-Meier curve (survival floor {floor})")]
    QuantileOutOfReach { q: f64, floor: f64 },

    #[error("invalid asymptotic regime: {0}")]
    InvalidRegime(String),

    #[error("empty grid")]
    EmptyGrid,
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")))
    }
}
