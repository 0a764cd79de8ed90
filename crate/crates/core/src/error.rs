use thiserror::Error;

/// Errors raised by grid operations when a precondition is violated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: usize, right: usize },

    #[error("scale {scale} out of range for resolution {resolution}")]
    ScaleOutOfRange { scale: usize, resolution: usize },

    #[error("index {index} out of range at scale {scale}")]
    IndexOutOfRange { index: usize, scale: usize },

    #[error("empty collection of squares")]
    EmptyCollection,

    #[error("no unique root: a maximal square does not contain all others")]
    NoUniqueRoot,

    #[error("convexity violated: an intermediate square is missing")]
    NotConvex,

    #[error("square form is negative beyond tolerance: {value}")]
    NegativeBoxForm { value: f64 },

    #[error("input must be nonnegative")]
    NegativeInput,

    #[error("input function is identically zero")]
    ZeroFunction,

    #[error("degenerate input: zero denominator with nonzero numerator")]
    DegenerateInput,

    #[error("coefficient {index} exceeds unit bound: |{value}| > 1")]
    CoefficientBound { index: usize, value: f64 },

    #[error("exponents out of range: {0}")]
    ExponentRange(String),

    #[error("threshold must be positive")]
    NonPositiveThreshold,

    #[error("scale range violates the lattice Nyquist limit: k = {k}, log2 size = {log2_size}")]
    NyquistViolation { k: i32, log2_size: usize },

    #[error("mollifier profile is not normalized: value {at_zero} at frequency zero")]
    NotNormalized { at_zero: f64 },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
