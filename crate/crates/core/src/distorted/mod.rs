//! Distorted sums: bounded theories of components, sparse theories of far
//! apart index points, the greedy merge of overlapping balls, expanded index
//! models, and behavioral checks of the resulting factorization.

mod bth;
mod c216;
mod decompose;
mod expand;
mod lemma214;
mod sparse;

use thiserror::Error;

use crate::system::SystemError;
use crate::theory::TheoryError;

pub use bth::{bth, component_check, project_bth};
pub use c216::{c216_check, check_hypothesis, i_of_m, random_instance, window, C216Config, C216Report};
pub use decompose::{decompose_components, star_holds, Decomposition, RadiusRule};
pub use expand::{expand_index, expand_pool, expanded_system, realized, ExpandLimits};
pub use lemma214::{lemma214_check, standard_pool, Lemma214Config, Lemma214Report, Lemma214Violation};
pub use sparse::{sparse_check, sparse_formula, uth};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistortedError {
    #[error("empty tuple")]
    EmptyTuple,
    #[error("element {0} out of range")]
    OutOfRange(usize),
    #[error("tuple is not a component of radius {0}")]
    NotComponent(u32),
    #[error("element {0} is not in the index sort")]
    NotIndex(usize),
    #[error("length mismatch: {0} points, {1} radii")]
    LengthMismatch(usize, usize),
    #[error("tuple is not sparse")]
    NotSparse,
    #[error("growth rule fails the merge inequality: {0}")]
    Growth(String),
    #[error("size guard: {0}")]
    Guard(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    System(#[from] SystemError),
}
