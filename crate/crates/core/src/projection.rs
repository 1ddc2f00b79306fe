//! Projection of worlds through abstract actions.
//!
//! Three rules are provided. The first maps each state leaf to a star over
//! the finite effect images, which is exact but not closed under further
//! projection. The second takes convex hulls of those images. The third
//! projects set leaves directly, giving a shallower but coarser tree.

use std::fmt;

use crate::action::AbstractAction;
use crate::credal::{Interval, StateId, StateSet};
use crate::error::{Error, Result};
use crate::tree::{check_feasible, AffineTree, Branch};

/// `S_b(C)`.
pub fn indicator_state(b: StateId, c: &StateSet) -> bool {
    c.contains(b)
}

/// `S_B(C)`: `[1, 1]` when `C ⊇ B`, `[0, 0]` when they are disjoint, and
/// `[0, 1]` otherwise.
pub fn indicator_set(b: &StateSet, c: &StateSet) -> Interval {
    if b.is_subset(c) {
        Interval::one()
    } else if b.is_disjoint(c) {
        Interval::zero()
    } else {
        Interval::unit()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProjectionRule {
    Pr1,
    Pr2,
    Pr3,
}

impl ProjectionRule {
    pub fn number(self) -> u8 {
        match self {
            ProjectionRule::Pr1 => 1,
            ProjectionRule::Pr2 => 2,
            ProjectionRule::Pr3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(ProjectionRule::Pr1),
            2 => Some(ProjectionRule::Pr2),
            3 => Some(ProjectionRule::Pr3),
            _ => None,
        }
    }
}

impl fmt::Display for ProjectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PR{}", self.number())
    }
}

/// Output of the first rule. It may hold finite leaves, so it cannot be
/// projected again; [`Pr1Projection::hull`] lifts it to a proper world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pr1Projection(AffineTree);

impl Pr1Projection {
    pub fn tree(&self) -> &AffineTree {
        &self.0
    }

    pub fn into_tree(self) -> AffineTree {
        self.0
    }

    /// Replaces finite leaves by their convex hulls.
    pub fn hull(&self) -> AffineTree {
        self.0.convex_hull_leaves()
    }
}

fn require_standard(t: &AffineTree) -> Result<()> {
    fn first_non_state(t: &AffineTree, path: &mut Vec<usize>) -> bool {
        match t {
            AffineTree::State(_) => false,
            AffineTree::Star(bs) => {
                for (i, b) in bs.iter().enumerate() {
                    path.push(i);
                    if first_non_state(&b.child, path) {
                        return true;
                    }
                    path.pop();
                }
                false
            }
            _ => true,
        }
    }
    let mut path = Vec::new();
    if first_non_state(t, &mut path) {
        Err(Error::NotStandard(path))
    } else {
        Ok(())
    }
}

fn project_states(
    action: &AbstractAction,
    t: &AffineTree,
    child: impl Fn(&StateSet) -> AffineTree,
) -> Result<AffineTree> {
    require_standard(t)?;
    t.try_map_leaves(&mut |leaf, _| {
        let AffineTree::State(b) = leaf else { unreachable!("checked standard") };
        let branches = action
            .branches()
            .iter()
            .map(|br| {
                let weight = if indicator_state(*b, &br.condition) { br.prob.clone() } else { Interval::zero() };
                Branch::new(weight, child(br.effect.image(*b)))
            })
            .collect();
        Ok(AffineTree::Star(branches))
    })
}

/// First rule: each state leaf `b` becomes a star with weights
/// `S_b(C_i)·P_i` over the finite images `E_i(b)`.
pub fn pr1(action: &AbstractAction, t: &AffineTree) -> Result<Pr1Projection> {
    project_states(action, t, |img| match img.len() {
        1 => AffineTree::State(img.first().expect("nonempty")),
        _ => AffineTree::Finite(img.clone()),
    })
    .map(Pr1Projection)
}

/// Second rule: as the first, with children `CH(E_i(b))`.
pub fn pr2(action: &AbstractAction, t: &AffineTree) -> Result<AffineTree> {
    project_states(action, t, |img| AffineTree::Set(img.clone()))
}

/// Third rule: each leaf `CH(B)` becomes a star with weights
/// `S_B(C_i)·P_i` over `CH(E_i(B ∩ C_i))`. Branches with `B ∩ C_i = ∅` carry
/// weight `[0, 0]` and are dropped.
pub fn pr3(action: &AbstractAction, t: &AffineTree) -> Result<AffineTree> {
    if t.has_finite_leaf() {
        return Err(Error::FiniteLeaf);
    }
    t.try_map_leaves(&mut |leaf, _| {
        let b = leaf.leaf_states().expect("leaf");
        let branches: Vec<Branch> = action
            .branches()
            .iter()
            .filter_map(|br| {
                let within = b.intersection(&br.condition);
                (!within.is_empty()).then(|| {
                    Branch::new(
                        indicator_set(&b, &br.condition).mul(&br.prob),
                        AffineTree::Set(br.effect.image_of_set(&within)),
                    )
                })
            })
            .collect();
        check_feasible(branches.iter().map(|br| &br.weight))?;
        Ok(AffineTree::Star(branches))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepMetrics {
    pub depth: usize,
    pub leaves: usize,
}

impl StepMetrics {
    pub fn of(t: &AffineTree) -> Self {
        Self { depth: t.depth(), leaves: t.leaf_count() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanProjection {
    pub tree: AffineTree,
    /// Metrics of the tree after each step.
    pub steps: Vec<StepMetrics>,
}

/// Folds a rule over the plan's actions, starting from `w0`.
///
/// Under the second rule the world is standardized before each step and the
/// final tree is standardized as well. The first rule yields a tree that
/// cannot be projected further, so it only accepts single-step plans.
pub fn project_plan(steps: &[AbstractAction], w0: &AffineTree, rule: ProjectionRule) -> Result<PlanProjection> {
    if steps.is_empty() {
        return Err(Error::TooFewOperands { needed: 1, got: 0 });
    }
    if w0.has_finite_leaf() {
        return Err(Error::FiniteLeaf);
    }
    let mut metrics = Vec::with_capacity(steps.len());
    let tree = match rule {
        ProjectionRule::Pr1 => {
            if steps.len() != 1 {
                return Err(Error::Unsupported(format!(
                    "PR1 output cannot be projected again; plan has {} steps",
                    steps.len()
                )));
            }
            let out = pr1(&steps[0], &w0.standardize()?)?.into_tree();
            metrics.push(StepMetrics::of(&out));
            out
        }
        ProjectionRule::Pr2 => {
            let mut current = w0.standardize()?;
            for action in steps {
                current = pr2(action, &current)?.standardize()?;
                metrics.push(StepMetrics::of(&current));
            }
            current
        }
        ProjectionRule::Pr3 => {
            let mut current = w0.clone();
            for action in steps {
                current = pr3(action, &current)?;
                metrics.push(StepMetrics::of(&current));
            }
            current
        }
    };
    Ok(PlanProjection { tree, steps: metrics })
}
