//! Equivariant K-classes in two models: tuples of restrictions to the torus
//! fixed points, and Stanley–Reisner representatives tensored with R(T_H).

mod conversion;
mod curves;
mod decomposition;
mod localization;
mod presentation;
mod stanley_reisner;

pub use conversion::{kiso_join, kiso_split, localization_to_sr, product_lattice, sr_to_localization};
pub use curves::{enumerate_invariant_curves, Curve, CurveKind};
pub use decomposition::{
    filtration_membership, graded_multiply, kg_decompose, DecompositionJson, GradedDecomposition, GradedModel,
};
pub use localization::{
    collapse, enumerate_fixed_points, expand, kg_membership, kt_membership, line_bundle_class, FixedPoint,
    FixedPointSet, LocalizationClass, LocalizationClassJson, LocalizedValueJson, Membership, PiecewiseLinear, Scope,
    Witness,
};
pub use presentation::{
    line_bundle_relation, wonderful_presentation_check, KClassPresentation, PresentationReport, Relation, RelationReport,
};
pub use stanley_reisner::SrRing;

use thiserror::Error;

use crate::fan::FanError;
use crate::group_ring::GroupRingError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KringError {
    #[error("index set mismatch: expected {expected} entries, found {found}")]
    IndexMismatch { expected: usize, found: usize },
    #[error("unknown fixed point ({cone}, {coset})")]
    UnknownFixedPoint { cone: String, coset: String },
    #[error("scope mismatch: expected {expected:?}")]
    ScopeMismatch { expected: Scope },
    #[error("element is not W_H-invariant: {0}")]
    NotInvariant(String),
    #[error("decomposition residual: {0}")]
    DecompositionResidual(String),
    #[error("relation {0} does not vanish")]
    RelationViolation(String),
    #[error("no preimage with exponents bounded by {bound}")]
    NoPreimageInBox { bound: i64 },
    #[error("class is not in the image of the Stanley-Reisner ring: {0}")]
    NotInImage(String),
    #[error("invalid piecewise linear data: {0}")]
    InvalidPiecewiseLinear(String),
    #[error("curve enumeration is inconsistent: {0}")]
    CurveMismatch(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    GroupRing(#[from] GroupRingError),
}
