//! The approximation pipeline and its stages: stream potentials, interval
//! covers of `Psi(K)`, monotone compression, mollified cutoffs, the locally
//! constant auxiliary function, gluing, and the Koch sharpness harness.

mod auxiliary;
mod compress;
mod cutoff;
mod glue;
mod pipeline;
mod sharpness;
mod stream;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::grid::GridError;
use crate::jets::JetError;
use crate::norms::NormError;
use crate::whitney::WhitneyError;

pub use auxiliary::{auxiliary_function, Auxiliary};
pub use compress::{
    compress_jet, compression_delta, compression_map, cover_values, image_cover, CompressionDelta, CompressionMap,
    BUDGET_FRACTION,
};
pub use cutoff::{
    distance_to_set, hedberg_truncate, smooth_cutoff, truncate, Hedberg, HedbergEstimates, HedbergTerm, SmoothCutoff,
    VANISH_TOLERANCE,
};
pub use glue::{glue_approximations, glue_constant};
pub use pipeline::{
    approximate_divfree, EpsDiagnostics, PipelineConfig, PipelineOutput, PipelineReport, StageEntry,
};
pub use sharpness::{
    koch_target, sharpness_certificate, truncation_candidates, CandidateCertificate, KochTarget, SharpnessReport,
};
pub use stream::{perp_gradient, raw_potential, stream_potential, support_gap, DIVERGENCE_TOLERANCE};

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("field is not divergence free: max |div u| = {max_div:e}")]
    NonzeroDivergence { max_div: f64 },
    #[error("cover budget {budget} too small: {clusters} value clusters already span {minimal}")]
    BudgetTooSmall { budget: f64, minimal: f64, clusters: usize },
    #[error("cover budget must be positive, got {0}")]
    NonPositiveBudget(f64),
    #[error("no sampled values to cover")]
    NothingToCover,
    #[error("intervals ({0}, {1}) and ({2}, {3}) are unsorted or their closures meet")]
    OverlappingIntervals(f64, f64, f64, f64),
    #[error("cutoff width {eps} is below the resolvable minimum {min} (8 h)")]
    CutoffTooNarrow { eps: f64, min: f64 },
    #[error("jet entry of order {order} is {value:e}, above the vanishing tolerance {tolerance:e}")]
    NotVanishing { order: u32, value: f64, tolerance: f64 },
    #[error("m-th derivatives do not flatten near K: seminorm {outer:e} on K_eps vs {inner:e} on K_eps/4")]
    HolderNotVanishing { outer: f64, inner: f64 },
    #[error("covers are {gap} apart, need at least {min}")]
    CoversTouch { gap: f64, min: f64 },
    #[error("{0} covers but {1} constants")]
    LengthMismatch(usize, usize),
    #[error("cutoff must be 1 near K1 and 0 near K2; violated at ({x}, {y}) with value {value}")]
    CutoffSupport { x: f64, y: f64, value: f64 },
    #[error("input field {index} is supported on its set (gap {gap})")]
    SupportTouchesSet { index: usize, gap: f64 },
    #[error("candidate `{name}` touches the curve (support gap {gap})")]
    CandidateTouchesSet { name: String, gap: f64 },
    #[error("empty schedule")]
    EmptySchedule,
    #[error("stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Whitney(#[from] WhitneyError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl ApproxError {
    /// Wraps any stage failure with the pipeline step that raised it.
    pub fn at(stage: &'static str) -> impl FnOnce(ApproxError) -> ApproxError {
        move |e| ApproxError::Stage { stage, message: e.to_string() }
    }
}
