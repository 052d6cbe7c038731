//! Random graphs with order and the perturbation machinery around them:
//! edge-probability sequences, Monte Carlo estimation, perturbed index sets,
//! exact small-scale disagreement probabilities, and the coupled drunkard
//! sampler.

mod bounds;
mod coupling;
mod cutpoints;
mod drunkard;
mod pseq;
mod sample;
mod spr;
mod zeta;

use thiserror::Error;

use crate::logic::EvalError;
use crate::theory::TheoryError;

pub use bounds::{ramsey_upper, xi_37, xi_38, zeta_lower, RAMSEY_GUARD};
pub use coupling::{chisq_pvalue, coupling_check, edge_count_law, CouplingMode, CouplingReport, SideReport, COIN_GUARD};
pub use cutpoints::{choose_cutpoints, gap_tail, CutPoints};
pub use drunkard::{drunkard_sample, DrunkardParams, DrunkardRecord, Layout};
pub use pseq::{parse_rational, PSeq};
pub use sample::{
    estimate_prob, graph_from_edges, in_pool, sample_graph_order, sample_graph_with, vw_sweep, wilson, DiffRow,
    EstimationResult, Sweep, Z95,
};
pub use spr::{closed_form_law, condition_on_growth, enumerate_law, sample_spr, swapped, SprLaw, SprMode, SprPair};
pub use zeta::{claim33_estimate, exact_zeta, order_alphabet, zeta_oracle, Letter, ZetaValue, ZETA_GUARD};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RandError {
    #[error("{0}")]
    Parse(String),
    #[error("the formula is not a sentence")]
    NotSentence,
    #[error("J must be a nonempty subset of I")]
    BadJ,
    #[error("out of range: {0}")]
    Range(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}
