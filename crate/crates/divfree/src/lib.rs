//! Constructive approximation of planar divergence-free fields that vanish
//! on a compact set `K` by smooth divergence-free fields supported away
//! from `K`, on uniform grids.
//!
//! The pieces compose as a pipeline: a stream potential is restricted to a
//! jet on `K`, the jet's image is compressed by a monotone map, extended by
//! Whitney's operator, corrected by a locally constant auxiliary function,
//! and truncated with a mollified cutoff. Every stage is also usable alone.

pub mod approx;
pub mod besov;
pub mod cli;
pub mod fixtures;
pub mod geometry;
pub mod grid;
pub mod jets;
pub mod multi_index;
pub mod norms;
pub mod whitney;

pub use grid::{Grid, GridError, ScalarField, VectorField2};
pub use multi_index::MultiIndex;
