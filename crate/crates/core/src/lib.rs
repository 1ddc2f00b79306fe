//! Affine-trees over convex sets of probability distributions, with exact
//! projection of plans through abstract actions, expected utility intervals,
//! action abstraction operators and a vertex-enumeration oracle.

pub mod abstraction;
pub mod action;
pub mod codec;
pub mod credal;
pub mod error;
pub mod oracle;
pub mod projection;
pub mod tree;
pub mod valuation;

pub use action::{
    action_instantiates, effect_compose, effect_instantiates, effect_union, AbstractAction, AbstractBranch,
    AbstractEffect, ActionReport, ActionViolation, PrimitiveAction, PrimitiveBranch, PrimitiveEffect,
};
pub use credal::{
    format_rational, int, parse_rational, ratio, Distribution, EuInterval, Interval, Rational, StateId, StateSet,
    StateSpace, UtilityFunction,
};
pub use error::{Error, Result};
pub use projection::{pr1, pr2, pr3, project_plan, PlanProjection, ProjectionRule, StepMetrics};
pub use tree::{AffineTree, Branch};
pub use valuation::{dominates, eliminate_dominated, eui, Eui};
