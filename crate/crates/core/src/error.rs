use std::fmt;

use thiserror::Error;

/// Probabilistic metric axioms, in the order they are validated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Axiom {
    PM1,
    PM2,
    PM3,
    PM4,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::PM1 => "PM1",
            Axiom::PM2 => "PM2",
            Axiom::PM3 => "PM3",
            Axiom::PM4 => "PM4",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("values must be nondecreasing (violated at position {index})")]
    MonotonicityViolation { index: usize },
    #[error("probability {value} lies outside [0, 1]")]
    RangeViolation { value: f64 },
    #[error("breakpoints must be finite and strictly increasing (violated at position {index})")]
    UnsortedBreakpoints { index: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("threshold {0} must be nonnegative")]
    NegativeThreshold(f64),
    #[error("family must be nonempty")]
    EmptyFamily,
    #[error("tolerance {0} must be positive")]
    NonPositiveTolerance(f64),
    #[error("argument is not a distance function: {0}")]
    DomainViolation(String),
    #[error("at least {needed} probes are required, got {got}")]
    InsufficientProbes { needed: usize, got: usize },
    #[error("axiom {axiom} violated at ({})", witness.join(", "))]
    AxiomViolation { axiom: Axiom, witness: Vec<String> },
    #[error("matrix is not a metric: {0}")]
    NotAMetric(String),
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("point set must be nonempty")]
    EmptySet,
    #[error("point sets belong to different spaces")]
    SpaceMismatch,
    #[error("precondition not met{}: {detail}", level.map(|l| format!(" at level {l}")).unwrap_or_default())]
    PreconditionNotMet { level: Option<usize>, detail: String },
    #[error("duplicate point label {0}")]
    DuplicateLabel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
