//! Lie–Rinehart algebras over a finite-dimensional base, modules with
//! connections, alternating forms and their twisted differentials, curvature,
//! graded brackets, and the canonical subobjects of a totally intransitive
//! algebra.

mod algebroid;
mod base;
mod bracket;
mod connection;
mod forms;
mod subobjects;

pub use algebroid::{embed, FailureKind, LieRinehart, ValidationFailure, ValidationReport};
pub use base::{left_composition, right_composition, BaseAlgebra, Derivation, RModule};
pub use bracket::{ad_connection, ad_form, connection_difference, graded_bracket, shift_connection};
pub use connection::{
    bianchi_residual, ce_complex, ce_differential, cohomology, cup_curvature, curvature, curvature_is_bilinear,
    curvature_on, Connection, FirstOrderOp,
};
pub use forms::{binomial, form_space, sort_with_sign, subsets, Cochain, FormSpace};
pub use subobjects::{canonical_subobjects, center, CanonicalSubobjects, Center};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LrError {
    #[error("form degree {degree} exceeds rank {rank}")]
    DegreeOutOfRange { degree: usize, rank: usize },
    #[error("connection does not act on the given module")]
    ConnectionMismatch,
    #[error("connection is not flat: curvature nonzero on generators ({i},{j})")]
    NotFlat { i: usize, j: usize },
    #[error("canonical subobjects need a zero anchor")]
    NotTotallyIntransitive,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
