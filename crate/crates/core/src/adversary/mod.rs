//! Instances that force large churn: the collinear stream against exact
//! maintenance, and expander-based line streams for the hitting problem.

pub mod churn;
pub mod expander;
pub mod lines;
pub mod lower_bound;
pub mod rational;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("size {0} is not a multiple of 3")]
    NotMultipleOfThree(usize),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("no graph passed the expansion check within {0} attempts")]
    SeedExhausted(usize),
    #[error("could not place a sparse line representation within {0} attempts")]
    RepresentationFailed(usize),
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("probe returned {got} points, expected {expected}")]
    ProbeSize { got: usize, expected: usize },
}

pub use churn::{
    lower_bound_verdict, measure_churn, measure_line_churn, ChurnRecord, Frozen, LowerBoundVerdict,
};
pub use expander::{
    build_gml, build_gmr, negative_control, random_expander, sampled_expansion_check,
    BipartiteExpander, Graph,
};
pub use lines::{
    adaptive_line_stream, evaluate_hitting, greedy_probe, sparse_line_rep, AdaptiveLineStream, GreedyHitting,
    HittingMaintainer, LineConstruction, Side, SparseLineRep,
};
pub use lower_bound::{lower_bound_prefix, lower_bound_stream, lower_bound_stream_against, Trigger};
pub use rational::{RationalLine, RationalPoint};
