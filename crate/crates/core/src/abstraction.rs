//! Abstraction operators on abstract actions.
//!
//! `bundle` and `combine` merge branches of one action or of several
//! alternative actions; `compose` builds the branch of a two-step sequence.

use crate::action::{effect_compose, effect_union, AbstractAction, AbstractBranch, AbstractEffect};
use crate::credal::{Interval, Rational, StateId, StateSet};
use crate::error::{Error, Result};

fn require_two(brs: &[AbstractBranch]) -> Result<()> {
    if brs.len() < 2 {
        return Err(Error::TooFewOperands { needed: 2, got: brs.len() });
    }
    Ok(())
}

fn union_parts(brs: &[AbstractBranch]) -> (StateSet, AbstractEffect) {
    let condition = brs.iter().skip(1).fold(brs[0].condition.clone(), |acc, b| acc.union(&b.condition));
    let effect = brs.iter().skip(1).fold(brs[0].effect.clone(), |acc, b| effect_union(&acc, &b.effect));
    (condition, effect)
}

fn same_conditions(brs: &[AbstractBranch]) -> bool {
    brs.iter().all(|b| b.condition == brs[0].condition)
}

fn min_lo(brs: &[AbstractBranch]) -> Rational {
    brs.iter().map(|b| b.prob.lo()).min().expect("nonempty").clone()
}

fn max_hi(brs: &[AbstractBranch]) -> Rational {
    brs.iter().map(|b| b.prob.hi()).max().expect("nonempty").clone()
}

/// Replaces several branches by one that happens whenever any of them does.
pub fn bundle_branches(brs: &[AbstractBranch]) -> Result<AbstractBranch> {
    require_two(brs)?;
    let (condition, effect) = union_parts(brs);
    let prob = if same_conditions(brs) {
        brs.iter().skip(1).fold(brs[0].prob.clone(), |acc, b| acc.add(&b.prob))
    } else {
        let hi_sum: Rational = brs.iter().map(|b| b.prob.hi()).sum();
        let one = Rational::from_integer(1.into());
        Interval::new(min_lo(brs), hi_sum.min(one))?
    };
    Ok(AbstractBranch::new(condition, prob, effect))
}

/// Replaces alternative branches (of different actions) by one covering each.
pub fn combine_branches(brs: &[AbstractBranch]) -> Result<AbstractBranch> {
    require_two(brs)?;
    let (condition, effect) = union_parts(brs);
    let lo = if same_conditions(brs) { min_lo(brs) } else { Rational::from_integer(0.into()) };
    Ok(AbstractBranch::new(condition, Interval::new(lo, max_hi(brs))?, effect))
}

/// The branch "first `br1`, then `br2`". `None` when no state satisfying
/// `br1`'s condition can reach `br2`'s condition.
pub fn compose_branches(br1: &AbstractBranch, br2: &AbstractBranch) -> Option<AbstractBranch> {
    let condition: StateSet =
        br1.condition.iter().filter(|&b| !br1.effect.image(b).is_disjoint(&br2.condition)).collect();
    (!condition.is_empty()).then(|| {
        AbstractBranch::new(condition, br1.prob.mul(&br2.prob), effect_compose(&br1.effect, &br2.effect))
    })
}

/// Replaces each group of branch indices by the bundle of its branches.
/// Groups must partition the branch indices; singleton groups keep their
/// branch unchanged.
pub fn intra_abstract(action: &AbstractAction, groups: &[Vec<usize>]) -> Result<AbstractAction> {
    let k = action.branches().len();
    let mut seen = vec![false; k];
    for g in groups {
        if g.is_empty() {
            return Err(Error::Pairing("empty branch group".into()));
        }
        for &i in g {
            if i >= k {
                return Err(Error::BranchIndex { index: i, arity: k });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Pairing(format!("branch {i} appears in more than one group")));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Pairing(format!("branch {i} is in no group")));
    }
    let branches = groups
        .iter()
        .map(|g| {
            let members: Vec<AbstractBranch> = g.iter().map(|&i| action.branches()[i].clone()).collect();
            match members.len() {
                1 => Ok(members.into_iter().next().expect("one")),
                _ => bundle_branches(&members),
            }
        })
        .collect::<Result<_>>()?;
    let out = AbstractAction::new(action.n_states(), branches);
    out.validate().into_result()?;
    Ok(out)
}

/// One action standing for any of `actions`. Each input is rewritten over
/// mutually exclusive conditions; branches are then paired by position and
/// must agree on their conditions.
pub fn inter_abstract(actions: &[AbstractAction]) -> Result<AbstractAction> {
    let Some(first) = actions.first() else {
        return Err(Error::TooFewOperands { needed: 1, got: 0 });
    };
    let n = first.n_states();
    if let Some(a) = actions.iter().find(|a| a.n_states() != n) {
        return Err(Error::Pairing(format!("state spaces differ ({n} vs {} states)", a.n_states())));
    }
    let normalized: Vec<AbstractAction> = actions.iter().map(AbstractAction::normalize_conditions).collect();
    let k = normalized[0].branches().len();
    for (idx, a) in normalized.iter().enumerate().skip(1) {
        if a.branches().len() != k {
            return Err(Error::Pairing(format!(
                "action {idx} has {} branches after normalization, action 0 has {k}",
                a.branches().len()
            )));
        }
        for (i, (x, y)) in normalized[0].branches().iter().zip(a.branches()).enumerate() {
            if x.condition != y.condition {
                return Err(Error::Pairing(format!(
                    "branch {i}: condition {} of action {idx} does not match {}",
                    y.condition, x.condition
                )));
            }
        }
    }
    if normalized.len() == 1 {
        return Ok(normalized.into_iter().next().expect("one"));
    }
    let branches = (0..k)
        .map(|i| {
            let column: Vec<AbstractBranch> = normalized.iter().map(|a| a.branches()[i].clone()).collect();
            combine_branches(&column)
        })
        .collect::<Result<_>>()?;
    let out = AbstractAction::new(n, branches);
    out.validate().into_result()?;
    Ok(out)
}

/// A state and branch pair for which composing pairwise is unsound: the
/// image `E1_i(b)` straddles the condition `C2_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Straddle {
    pub first_branch: usize,
    pub state: StateId,
    pub second_branch: usize,
}

/// Every place where a first-step image meets a second-step condition only
/// partially.
pub fn straddles(first: &AbstractAction, second: &AbstractAction) -> Vec<Straddle> {
    let mut out = Vec::new();
    for (i, br1) in first.branches().iter().enumerate() {
        for b in br1.condition.iter() {
            let img = br1.effect.image(b);
            for (j, br2) in second.branches().iter().enumerate() {
                if !img.is_subset(&br2.condition) && !img.is_disjoint(&br2.condition) {
                    out.push(Straddle { first_branch: i, state: b, second_branch: j });
                }
            }
        }
    }
    out
}

/// Pairwise composition of all branches, with empty results dropped. This
/// is the raw operator; it may under-approximate the sequence when
/// [`straddles`] is nonempty. Prefer [`seq_abstract`].
pub fn seq_compose_all(first: &AbstractAction, second: &AbstractAction) -> AbstractAction {
    let branches = first
        .branches()
        .iter()
        .flat_map(|br1| second.branches().iter().filter_map(move |br2| compose_branches(br1, br2)))
        .collect();
    AbstractAction::new(first.n_states(), branches)
}

/// One action standing for `first` followed by `second`.
///
/// Requires that each first-step image `E1_i(b)`, `b ∈ C1_i`, lies either
/// inside or outside every second-step condition. Without this, pairwise
/// composition can miss reachable outcomes, so such inputs are rejected.
pub fn seq_abstract(first: &AbstractAction, second: &AbstractAction) -> Result<AbstractAction> {
    if first.n_states() != second.n_states() {
        return Err(Error::NotComposable(format!(
            "state spaces differ ({} vs {} states)",
            first.n_states(),
            second.n_states()
        )));
    }
    if let Some(s) = straddles(first, second).first() {
        return Err(Error::NotComposable(format!(
            "image of {} under branch {} straddles the condition of branch {}",
            s.state, s.first_branch, s.second_branch
        )));
    }
    let out = seq_compose_all(first, second);
    out.validate().into_result()?;
    Ok(out)
}
