use thiserror::Error;

use crate::action::ActionReport;
use crate::tree::TreeReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state space: {0}")]
    StateSpace(String),

    #[error("interval [{lo}, {hi}] is not a closed subinterval of [0, 1]")]
    InvalidInterval { lo: String, hi: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("weights are not an affine vector: {0}")]
    AffineVector(String),

    #[error("cannot parse {0:?} as an exact rational")]
    ParseRational(String),

    #[error("invalid affine-tree: {0}")]
    InvalidTree(TreeReport),

    #[error("expected an affine-star, found a leaf")]
    NotAStar,

    #[error("branch index {index} out of range for a star with {arity} branches")]
    BranchIndex { index: usize, arity: usize },

    #[error("need at least {needed} operands, got {got}")]
    TooFewOperands { needed: usize, got: usize },

    #[error("stars have different arities ({0} vs {1})")]
    ArityMismatch(usize, usize),

    #[error("tree contains a finite (non-convex) leaf")]
    FiniteLeaf,

    #[error("tree is not standard: leaf at path {0:?} is not a state")]
    NotStandard(Vec<usize>),

    #[error("branch weights are infeasible: sum of lower bounds {lo_sum} > 1 or sum of upper bounds {hi_sum} < 1")]
    InfeasibleWeights { lo_sum: String, hi_sum: String },

    #[error("invalid action: {0}")]
    InvalidAction(ActionReport),

    #[error("abstract action admits no instantiation")]
    Uninstantiable,

    #[error("cannot pair branches: {0}")]
    Pairing(String),

    #[error("cannot compose: {0}")]
    NotComposable(String),

    #[error("{path}: {message}")]
    Decode { path: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("oracle size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
