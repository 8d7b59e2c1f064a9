//! Finite-model evidence for non-identifiability of overspread supports.
//!
//! Bi-infinite objects are replaced by nested finite sections, and "not
//! stable" is read off the smallest singular values of those sections.

use thiserror::Error;

pub mod composition;
pub mod frame;
pub mod prototype;
pub mod slanted;
pub mod tail;

pub use composition::{
    composition_instability, composition_sections, CompositionCurve, CompositionSetup, SectionPoint,
};
pub use frame::{balanced_steps, densest_steps_below, gaussian_frame_bounds, GaborFrameSpec};
pub use prototype::{build_prototype, riesz_gram_check, GramReport, PrototypeOp};
pub use slanted::{build_slanted, kernel_vector, KernelVectorReport, SlantedMatrixSpec, SlantedSection};
pub use tail::{tail_sum, PowerWeight, TailTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NecessityError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("section is numerically full rank; no kernel vector exists")]
    NumericalRankFull,
    #[error("tail sum diverges for decay power {0} (need > 2)")]
    DivergentTail(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("support with {cells} cells on L={l} is not overspread")]
    PlanNotOverspread { cells: usize, l: usize },
    #[error(transparent)]
    Spark(#[from] crate::spark::SparkError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}
