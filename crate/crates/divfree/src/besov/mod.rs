//! Besov spaces `B^{p,q}_beta(K)` on `d`-regular sets: sampled measures,
//! the level conditions a)-d) of an approximating sequence, reduction to
//! sequences without derivatives, and monotone compression.

mod conditions;
mod measure;
mod reduce;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::jets::JetError;

pub use conditions::{
    besov_conditions, canonical_sequence, fit_sequence, max_level, BesovReport, BesovSequence, ConditionEntry,
    VALID_SLACK,
};
pub use measure::{sample_measure, RegularMeasure, RegularityProbe, REGULARITY_WARNING_RATIO};
pub use reduce::{besov_compress, zero_derivative_reduce, BesovCompression, Reduction};

#[derive(Debug, Error)]
pub enum BesovError {
    #[error("dimension must lie in [0, 2), got {0}")]
    DimensionOutOfRange(f64),
    #[error("cannot sample a measure on an empty set")]
    EmptySet,
    #[error("unsupported measure: {0}")]
    Unsupported(String),
    #[error("smoothness must be positive, got {0}")]
    InvalidBeta(f64),
    #[error("exponent must be at least 1, got {0}")]
    InvalidExponent(f64),
    #[error("jet samples differ from the measure's points")]
    SampleMismatch,
    #[error("jet of order {got} is too short, need {needed}")]
    OrderTooLow { needed: u32, got: u32 },
    #[error("sequence has {jets} jets but {scalars} scalars")]
    LengthMismatch { jets: usize, scalars: usize },
    #[error("the target jet has nonzero derivatives (|f^(j)| = {0:e})")]
    NonzeroTarget(f64),
    #[error("the approximating sequence still carries derivatives (level {0})")]
    Unreduced(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
