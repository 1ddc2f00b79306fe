//! Exact reference semantics for affine-trees, used to check the fast paths.

pub mod gen;
pub mod lifted;
pub mod simplex;
pub mod suite;
pub mod vertices;

use rand::Rng;

use crate::action::AbstractAction;
use crate::credal::Distribution;
use crate::error::Result;
use crate::tree::AffineTree;

pub use lifted::{member_in_tree, subsumes_lifted};
pub use suite::{run_property, run_property_suite, Selection, SuiteConfig, SuiteReport};
pub use vertices::{
    delta_vertices, member, subsumes_exact, subsumes_vertices, witnessed_vertices, world_vertices,
    world_vertices_with, OracleLimits, VertexSet, Witness,
};

/// `count` points of the true image `Λ(world(t))`: each is `λ(P)` for a
/// sampled instantiation `λ` and a sampled member `P`.
pub fn sampled_action_image<R: Rng + ?Sized>(
    action: &AbstractAction,
    t: &AffineTree,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Distribution>> {
    let n = action.n_states();
    (0..count)
        .map(|_| {
            let lambda = action.sample_instantiation(rng)?;
            lambda.apply_dist(&t.sample_member(n, rng))
        })
        .collect()
}
