use thiserror::Error;

/// Errors reported by speed-set validation, witness construction and the
/// bound algorithms.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("speed of a moving runner must be nonzero")]
    ZeroSpeed,

    #[error("speed set must contain at least one runner")]
    EmptySpeeds,

    #[error("duplicate speed {0} in speed set")]
    DuplicateSpeed(u64),

    #[error("runner index {index} out of range 1..={n}")]
    RunnerIndex { index: usize, n: usize },

    #[error("time scale {0} must lie in 1..=63")]
    ScaleRange(u32),

    #[error("bit index {bit} out of range 1..={scale}")]
    BitRange { bit: u32, scale: u32 },

    #[error("separation exponent {0} must lie in 1..=63")]
    SeparationExponent(u32),

    #[error("sector resolution {0} must lie in 1..=63")]
    SectorResolution(u32),

    #[error("window requires c >= 2")]
    WindowParam,

    #[error("Theorem 3 requires n >= 4")]
    Theorem3Precondition,

    #[error("method t7 requires n >= 4")]
    T7Precondition,

    #[error("bound undefined for n = {n}: requires n >= {min}")]
    BoundUndefined { n: u64, min: u64 },

    #[error("enumeration scale {requested} exceeds the configured budget {budget}")]
    ScaleBudget { requested: u32, budget: u32 },

    #[error("adversarial pattern requires c >= 2 and x >= 1")]
    AdversarialParams,

    #[error("adversarial pattern with c = {c} needs p >= c, got p = {p}")]
    AdversarialShift { c: u32, p: u32 },

    #[error("oracle made no progress at scale {0}; increase the scale")]
    NoProgress(u32),

    #[error("malformed time vector bits {0:?}: expected 1..=63 characters of 0/1")]
    BadBits(String),

    #[error("malformed separation distance {0:?}: expected the form 1/2^c with 1 <= c <= 63")]
    BadDistance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
