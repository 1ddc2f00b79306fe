//! Random fixtures for the property suite.

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::{AbstractAction, AbstractBranch, AbstractEffect, PrimitiveAction, PrimitiveBranch, PrimitiveEffect};
use crate::credal::{ratio, Interval, Rational, StateId, StateSet, UtilityFunction};
use crate::tree::{AffineTree, MassAssignment};

/// Size bounds for generated fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub max_states: usize,
    pub max_depth: usize,
    pub max_arity: usize,
    pub max_branches: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self { max_states: 4, max_depth: 3, max_arity: 3, max_branches: 3 }
    }
}

impl GenConfig {
    /// Halves depth and arity, keeping every bound at least 1.
    /// Configurations with exactly one bound halved, skipping those already at 1.
    pub fn shrink_steps(&self) -> Vec<Self> {
        let steps = [
            Self { max_depth: half(self.max_depth), ..*self },
            Self { max_arity: half(self.max_arity), ..*self },
            Self { max_branches: half(self.max_branches), ..*self },
        ];
        steps.into_iter().filter(|c| c != self).collect()
    }
}

fn half(x: usize) -> usize {
    x.div_ceil(2).max(1)
}

const DENOMINATORS: [i64; 6] = [1, 2, 3, 4, 5, 10];

/// A random affine vector of length `k` on a small rational grid.
pub fn affine_vector<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Rational> {
    let den = *DENOMINATORS.choose(rng).expect("nonempty") * k as i64;
    let mut cuts: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(0..=den)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(k);
    for c in cuts.into_iter().chain(std::iter::once(den)) {
        out.push(ratio(c - prev, den));
        prev = c;
    }
    out
}

/// An interval containing `p`: a point, the unit interval, or `p` widened
/// by random grid steps.
pub fn interval_around<R: Rng + ?Sized>(p: &Rational, rng: &mut R) -> Interval {
    match rng.gen_range(0..6) {
        0 => Interval::point(p.clone()).expect("p in [0,1]"),
        1 => Interval::unit(),
        _ => {
            let step = ratio(1, *DENOMINATORS[1..].choose(rng).expect("nonempty"));
            let lo = (p - &step * Rational::from_integer(rng.gen_range(0..=2).into())).max(Rational::zero());
            let hi = (p + &step * Rational::from_integer(rng.gen_range(0..=2).into())).min(Rational::one());
            Interval::new(lo, hi).expect("ordered")
        }
    }
}

/// Feasible branch weights: intervals around a random affine vector.
pub fn weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Interval> {
    affine_vector(k, rng).iter().map(|p| interval_around(p, rng)).collect()
}

pub fn state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateId {
    StateId(rng.gen_range(0..n))
}

/// A nonempty subset of at most `max_len` states.
pub fn subset<R: Rng + ?Sized>(n: usize, max_len: usize, rng: &mut R) -> StateSet {
    let len = rng.gen_range(1..=max_len.clamp(1, n));
    let mut all: Vec<StateId> = (0..n).map(StateId).collect();
    all.shuffle(rng);
    all.into_iter().take(len).collect()
}

pub fn state_count<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> usize {
    rng.gen_range(2..=cfg.max_states.max(2))
}

/// A random tree of depth at most `cfg.max_depth`. With `standard` set,
/// every leaf is a state; otherwise leaves are states or hulls.
pub fn tree<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, standard: bool, rng: &mut R) -> AffineTree {
    fn go<R: Rng + ?Sized>(n: usize, depth: usize, cfg: &GenConfig, standard: bool, top: bool, rng: &mut R) -> AffineTree {
        if depth == 0 || (!top && rng.gen_range(0..3) == 0) {
            return if standard || rng.gen_bool(0.4) {
                AffineTree::State(state(n, rng))
            } else {
                AffineTree::Set(subset(n, n, rng))
            };
        }
        let k = rng.gen_range(1..=cfg.max_arity.max(1));
        let ws = weights(k, rng);
        AffineTree::Star(
            ws.into_iter()
                .map(|w| crate::tree::Branch::new(w, go(n, depth - 1, cfg, standard, false, rng)))
                .collect(),
        )
    }
    let depth = rng.gen_range(0..=cfg.max_depth);
    go(n, depth, cfg, standard, true, rng)
}

/// A star at the root, always.
pub fn star<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, standard: bool, rng: &mut R) -> AffineTree {
    loop {
        let t = tree(n, cfg, standard, rng);
        if !t.is_leaf() {
            return t;
        }
    }
}

pub fn utility<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UtilityFunction {
    UtilityFunction::new((0..n).map(|_| ratio(rng.gen_range(-10..=20), *[1, 1, 2, 3].choose(rng).expect("nonempty"))).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionShape {
    /// Every branch applies everywhere.
    Unconditional,
    /// A random partition of the states, with branches per block.
    Partition,
    /// Branches on every state plus branches on blocks of a partition.
    Overlapping,
}

fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<StateSet> {
    let blocks = rng.gen_range(1..=n.min(3));
    let mut out = vec![StateSet::new(); blocks];
    let mut states: Vec<StateId> = (0..n).map(StateId).collect();
    states.shuffle(rng);
    for (i, s) in states.into_iter().enumerate() {
        let b = if i < blocks { i } else { rng.gen_range(0..blocks) };
        out[b].insert(s);
    }
    out
}

/// `(condition, probability)` pairs satisfying the sum rule in every state.
fn primitive_layout<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, shape: ConditionShape, rng: &mut R) -> Vec<(StateSet, Rational)> {
    let k_max = cfg.max_branches.max(1);
    match shape {
        ConditionShape::Unconditional => {
            let k = rng.gen_range(1..=k_max);
            affine_vector(k, rng).into_iter().map(|p| (StateSet::all(n), p)).collect()
        }
        ConditionShape::Partition => {
            let mut out = Vec::new();
            for block in random_partition(n, rng) {
                let k = rng.gen_range(1..=k_max.min(2));
                out.extend(affine_vector(k, rng).into_iter().map(|p| (block.clone(), p)));
            }
            out
        }
        ConditionShape::Overlapping => {
            let share = affine_vector(2, rng);
            let mut out = vec![(StateSet::all(n), share[0].clone())];
            for block in random_partition(n, rng) {
                out.push((block, share[1].clone()));
            }
            out
        }
    }
}

pub fn shape<R: Rng + ?Sized>(rng: &mut R) -> ConditionShape {
    *[ConditionShape::Unconditional, ConditionShape::Partition, ConditionShape::Overlapping]
        .choose(rng)
        .expect("nonempty")
}

pub fn primitive_action<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, rng: &mut R) -> PrimitiveAction {
    let s = shape(rng);
    let branches = primitive_layout(n, cfg, s, rng)
        .into_iter()
        .map(|(condition, prob)| PrimitiveBranch {
            condition,
            prob,
            effect: PrimitiveEffect::new((0..n).map(|_| state(n, rng)).collect()),
        })
        .collect();
    PrimitiveAction::new(n, branches)
}

/// A valid abstract action: intervals widened around a primitive layout,
/// effects with images of at most `max_image` states.
pub fn abstract_action_with<R: Rng + ?Sized>(
    n: usize,
    cfg: &GenConfig,
    shape: ConditionShape,
    max_image: usize,
    rng: &mut R,
) -> AbstractAction {
    let branches = primitive_layout(n, cfg, shape, rng)
        .into_iter()
        .map(|(condition, p)| {
            let effect = AbstractEffect::new((0..n).map(|_| subset(n, max_image, rng)).collect());
            AbstractBranch::new(condition, interval_around(&p, rng), effect)
        })
        .collect();
    AbstractAction::new(n, branches)
}

pub fn abstract_action<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, rng: &mut R) -> AbstractAction {
    let s = shape(rng);
    let max_image = rng.gen_range(1..=n.min(3));
    abstract_action_with(n, cfg, s, max_image, rng)
}

/// Unconditional action whose every image has exactly `k` states.
pub fn uniform_image_action<R: Rng + ?Sized>(n: usize, branches: usize, k: usize, rng: &mut R) -> AbstractAction {
    let brs = affine_vector(branches, rng)
        .into_iter()
        .map(|p| {
            let effect = AbstractEffect::new(
                (0..n)
                    .map(|_| {
                        let mut all: Vec<StateId> = (0..n).map(StateId).collect();
                        all.shuffle(rng);
                        all.into_iter().take(k).collect()
                    })
                    .collect(),
            );
            AbstractBranch::new(StateSet::all(n), interval_around(&p, rng), effect)
        })
        .collect();
    AbstractAction::new(n, brs)
}

/// A copy of `action` with the same conditions and widened or re-drawn
/// intervals and effects, kept instantiable.
pub fn sibling_action<R: Rng + ?Sized>(action: &AbstractAction, rng: &mut R) -> AbstractAction {
    let n = action.n_states();
    loop {
        let branches = action
            .branches()
            .iter()
            .map(|b| {
                let prob = if rng.gen_bool(0.5) { b.prob.hull(&interval_around(b.prob.lo(), rng)) } else { b.prob.clone() };
                let effect = if rng.gen_bool(0.5) {
                    AbstractEffect::new((0..n).map(|_| subset(n, 2, rng)).collect())
                } else {
                    b.effect.clone()
                };
                AbstractBranch::new(b.condition.clone(), prob, effect)
            })
            .collect();
        let out = AbstractAction::new(n, branches);
        if out.validate().is_ok() {
            return out;
        }
    }
}

/// A random partition of `0..k` into groups.
pub fn branch_groups<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let blocks = rng.gen_range(1..=k);
    let mut groups = vec![Vec::new(); blocks];
    let mut idx: Vec<usize> = (0..k).collect();
    idx.shuffle(rng);
    for (i, b) in idx.into_iter().enumerate() {
        let g = if i < blocks { i } else { rng.gen_range(0..blocks) };
        groups[g].push(b);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort();
    groups
}

/// At most `max_focals` focal sets with positive masses summing to one.
pub fn mass_assignment<R: Rng + ?Sized>(n: usize, max_focals: usize, rng: &mut R) -> MassAssignment {
    let k = rng.gen_range(1..=max_focals.max(1));
    let mut focals: Vec<(StateSet, Rational)> = Vec::new();
    for m in affine_vector(k, rng) {
        if m.is_zero() {
            continue;
        }
        let b = subset(n, n, rng);
        match focals.iter_mut().find(|(f, _)| *f == b) {
            Some((_, acc)) => *acc += m,
            None => focals.push((b, m)),
        }
    }
    MassAssignment::new(focals).expect("masses sum to one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_fixtures_are_valid() {
        let cfg = GenConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let n = state_count(&cfg, &mut rng);
            let t = tree(n, &cfg, rng.gen_bool(0.5), &mut rng);
            assert!(t.validate_over(n).is_ok(), "{t}");
            assert!(t.depth() <= cfg.max_depth);
            assert!(abstract_action(n, &cfg, &mut rng).validate().is_ok());
            assert!(primitive_action(n, &cfg, &mut rng).validate().is_ok());
            let sib = sibling_action(&abstract_action(n, &cfg, &mut rng), &mut rng);
            assert!(sib.validate().is_ok());
            let q = affine_vector(3, &mut rng);
            assert!(q.iter().sum::<Rational>().is_one());
        }
    }

    #[test]
    fn groups_partition_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..6 {
            let mut all: Vec<usize> = branch_groups(k, &mut rng).concat();
            all.sort_unstable();
            assert_eq!(all, (0..k).collect::<Vec<_>>());
        }
    }
}
