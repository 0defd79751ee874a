use thiserror::Error;

/// Errors raised by the polynomial, character and stochastic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("polynomial is not exactly divisible by the given denominator")]
    NotDivisible,

    #[error("point has {got} coordinates but the polynomial has {expected} variables")]
    PointLength { expected: usize, got: usize },

    #[error("zero coordinate at position {0}")]
    ZeroCoordinate(usize),

    #[error("invalid signature {parts:?}: {reason}")]
    InvalidSignature { parts: Vec<i64>, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not in the span of the character basis: {0}")]
    NotInSpan(String),

    #[error("series diverges at x = {x} (radius of convergence {radius})")]
    NonConvergent { x: f64, radius: f64 },

    #[error("negative weight {value:e} at {lambda}")]
    NegativeWeight { lambda: String, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear system ill-conditioned after {0} attempts")]
    IllConditioned(usize),

    #[error("no link row for source {0}")]
    MissingRow(String),

    #[error("Fourier index {index} exceeds certified half-width {half_width}")]
    FourierIndex { index: i64, half_width: usize },

    #[error("cutoff {cutoff} too small: defect {defect:e} exceeds tolerance {tolerance:e}")]
    CutoffTooSmall {
        cutoff: u32,
        defect: f64,
        tolerance: f64,
    },

    #[error("state {0} is not in the truncated state space")]
    UnknownState(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
