use thiserror::Error;

/// Errors raised by the geometric and combinatorial operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistError {
    #[error("support radius {0} is outside (0, 1)")]
    InvalidEpsilon(f64),
    #[error("covector vanishes; the circle action is undefined at v = 0")]
    ZeroCovector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point violates the cotangent constraint (|x|^2-1 = {norm:e}, <x,v> = {dot:e})")]
    OffConstraint { norm: f64, dot: f64 },
    #[error("point is off the reference great circle bundle (residual {0:e})")]
    OffGreatCircle(f64),
    #[error("point lies outside the chart hemisphere")]
    OutsideChart,
    #[error("point lies outside the plumbing overlap of spheres {0} and {1}")]
    OutsideOverlap(usize, usize),
    #[error("point lies outside the band surface")]
    OutsideSurface,
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("negative shear entry {value} at position {index}")]
    NegativeShear { index: usize, value: f64 },
    #[error("shear sequence is not admissible: {0}")]
    NotAdmissible(String),
    #[error("point is not hyperbolic: {0}")]
    NonHyperbolic(String),
    #[error("data is not periodic: {0}")]
    NotPeriodic(String),
    #[error("curve is not admissible: {0}")]
    NonAdmissibleCurve(String),
    #[error("exponent signs do not alternate: {0}")]
    NonAlternating(String),
    #[error("class ({0}, {1}) is not primitive")]
    NotPrimitive(String, String),
    #[error("rank sequence has {defined} defined entries, need at least {needed}")]
    TooFewEntries { defined: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, TwistError>;
