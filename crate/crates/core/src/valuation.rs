//! Expected utility intervals and interval-dominance plan elimination.

use num::Zero;

use crate::credal::{EuInterval, Interval, Rational, UtilityFunction};
use crate::error::Result;
use crate::tree::{check_feasible, AffineTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eui {
    pub interval: EuInterval,
    /// Set when the tree held finite leaves, which were evaluated as their
    /// convex hulls.
    pub hull_approximated: bool,
}

/// Smallest `Σ q_i v_i` over `q_i ∈ weights[i]`, `Σ q_i = 1`. Starting from
/// the lower bounds, the remaining mass goes to the cheapest children first.
fn greedy_min(weights: &[&Interval], values: &[Rational]) -> Rational {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].cmp(&values[j]).then(i.cmp(&j)));
    fill(weights, values, &order)
}

fn greedy_max(weights: &[&Interval], values: &[Rational]) -> Rational {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].cmp(&values[i]).then(i.cmp(&j)));
    fill(weights, values, &order)
}

fn fill(weights: &[&Interval], values: &[Rational], order: &[usize]) -> Rational {
    let mut q: Vec<Rational> = weights.iter().map(|w| w.lo().clone()).collect();
    let mut slack = Rational::from_integer(1.into()) - q.iter().sum::<Rational>();
    for &i in order {
        if slack.is_zero() {
            break;
        }
        let step = weights[i].width().min(slack.clone());
        slack -= &step;
        q[i] += step;
    }
    q.iter().zip(values).map(|(qi, v)| qi * v).sum()
}

fn bounds(t: &AffineTree, f: &UtilityFunction, approximated: &mut bool) -> Result<(Rational, Rational)> {
    match t {
        AffineTree::State(s) => Ok((f.value(*s).clone(), f.value(*s).clone())),
        AffineTree::Set(b) | AffineTree::Finite(b) => {
            if matches!(t, AffineTree::Finite(_)) {
                *approximated = true;
            }
            let mut values = b.iter().map(|s| f.value(s));
            let first = values.next().expect("leaf sets are nonempty").clone();
            Ok(values.fold((first.clone(), first), |(lo, hi), v| (lo.min(v.clone()), hi.max(v.clone()))))
        }
        AffineTree::Star(bs) => {
            check_feasible(bs.iter().map(|b| &b.weight))?;
            let mut lows = Vec::with_capacity(bs.len());
            let mut highs = Vec::with_capacity(bs.len());
            for b in bs {
                let (l, u) = bounds(&b.child, f, approximated)?;
                lows.push(l);
                highs.push(u);
            }
            let weights: Vec<&Interval> = bs.iter().map(|b| &b.weight).collect();
            Ok((greedy_min(&weights, &lows), greedy_max(&weights, &highs)))
        }
    }
}

/// The interval `[min, max]` of expected utility over the world of `t`.
pub fn eui(t: &AffineTree, f: &UtilityFunction) -> Result<Eui> {
    let mut hull_approximated = false;
    let (lo, hi) = bounds(t, f, &mut hull_approximated)?;
    let interval = EuInterval::new(lo, hi).expect("greedy bounds are ordered");
    Ok(Eui { interval, hull_approximated })
}

/// Strict interval dominance: every outcome of `winner` beats every outcome
/// of `loser`.
pub fn dominates(winner: &EuInterval, loser: &EuInterval) -> bool {
    winner.lo > loser.hi
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination<K> {
    /// Undominated entries, in input order.
    pub survivors: Vec<(K, EuInterval)>,
    /// `(loser, winner)` for each eliminated entry, naming the first
    /// dominating entry in input order.
    pub log: Vec<(K, K)>,
}

pub fn eliminate_dominated<K: Clone>(entries: &[(K, EuInterval)]) -> Elimination<K> {
    let mut survivors = Vec::new();
    let mut log = Vec::new();
    for (name, iv) in entries {
        match entries.iter().find(|(_, other)| dominates(other, iv)) {
            Some((winner, _)) => log.push((name.clone(), winner.clone())),
            None => survivors.push((name.clone(), iv.clone())),
        }
    }
    Elimination { survivors, log }
}
