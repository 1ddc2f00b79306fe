//! Affine-trees: recursive interval-weighted trees whose nodes denote convex
//! sets of probability distributions ("worlds").
//!
//! A [`AffineTree::Star`] with branch intervals `Q_i` and children `w_i`
//! denotes every mixture `Σ q_i P_i` with `q_i ∈ Q_i`, `Σ q_i = 1` and
//! `P_i ∈ w_i`. Leaves are single states, convex hulls `CH(B)` of state sets,
//! or the finite, non-convex set `{δ_b | b ∈ B}` produced by the first
//! projection rule.

use std::fmt;

use num::{One, Zero};
use rand::Rng;

use crate::credal::{ratio, Distribution, Interval, Rational, StateId, StateSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AffineTree {
    /// `{δ_s}`.
    State(StateId),
    /// `CH(B)`: every distribution supported inside `B`.
    Set(StateSet),
    /// `{δ_b | b ∈ B}`; only ever produced by the first projection rule.
    Finite(StateSet),
    Star(Vec<Branch>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub weight: Interval,
    pub child: AffineTree,
}

impl Branch {
    pub fn new(weight: Interval, child: AffineTree) -> Self {
        Self { weight, child }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeViolationKind {
    EmptySet,
    EmptyStar,
    InfeasibleWeights { lo_sum: Rational, hi_sum: Rational },
    StateOutOfRange(StateId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeViolation {
    /// Branch indices from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: TreeViolationKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeReport {
    pub violations: Vec<TreeViolation>,
}

impl TreeReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidTree(self))
        }
    }
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "at {:?}: ", v.path)?;
            match &v.kind {
                TreeViolationKind::EmptySet => f.write_str("empty state set")?,
                TreeViolationKind::EmptyStar => f.write_str("star without branches")?,
                TreeViolationKind::InfeasibleWeights { lo_sum, hi_sum } => write!(
                    f,
                    "infeasible weights (sum of lower bounds {lo_sum}, sum of upper bounds {hi_sum})"
                )?,
                TreeViolationKind::StateOutOfRange(s) => write!(f, "state {s} outside the state space")?,
            }
        }
        Ok(())
    }
}

/// A Dempster-Shafer mass assignment over focal sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassAssignment {
    focals: Vec<(StateSet, Rational)>,
}

impl MassAssignment {
    pub fn new(focals: Vec<(StateSet, Rational)>) -> Result<Self> {
        check_focal_sets(focals.iter().map(|(b, _)| b))?;
        if let Some((_, m)) = focals.iter().find(|(_, m)| *m < Rational::zero()) {
            return Err(Error::AffineVector(format!("negative mass {m}")));
        }
        let total: Rational = focals.iter().map(|(_, m)| m).sum();
        if !total.is_one() {
            return Err(Error::AffineVector(format!("masses sum to {total}")));
        }
        Ok(Self { focals })
    }

    pub fn focals(&self) -> &[(StateSet, Rational)] {
        &self.focals
    }

    /// `Bel(B) = Σ_{F ⊆ B} m(F)`.
    pub fn belief(&self, set: &StateSet) -> Rational {
        self.focals.iter().filter(|(f, _)| f.is_subset(set)).map(|(_, m)| m).sum()
    }
}

/// A mass assignment whose masses are intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMassAssignment {
    focals: Vec<(StateSet, Interval)>,
}

impl IntervalMassAssignment {
    pub fn new(focals: Vec<(StateSet, Interval)>) -> Result<Self> {
        check_focal_sets(focals.iter().map(|(b, _)| b))?;
        check_feasible(focals.iter().map(|(_, q)| q))?;
        Ok(Self { focals })
    }

    pub fn focals(&self) -> &[(StateSet, Interval)] {
        &self.focals
    }
}

fn check_focal_sets<'a>(sets: impl Iterator<Item = &'a StateSet>) -> Result<()> {
    let mut seen: Vec<&StateSet> = Vec::new();
    for set in sets {
        if set.is_empty() {
            return Err(Error::AffineVector("empty focal set".into()));
        }
        if seen.contains(&set) {
            return Err(Error::AffineVector(format!("duplicate focal set {set}")));
        }
        seen.push(set);
    }
    if seen.is_empty() {
        return Err(Error::AffineVector("no focal sets".into()));
    }
    Ok(())
}

/// Checks `Σ lo ≤ 1 ≤ Σ hi`, i.e. that the weight polytope is nonempty.
pub fn check_feasible<'a>(weights: impl Iterator<Item = &'a Interval>) -> Result<()> {
    let (lo_sum, hi_sum) = weight_sums(weights);
    if lo_sum > Rational::one() || hi_sum < Rational::one() {
        return Err(Error::InfeasibleWeights { lo_sum: lo_sum.to_string(), hi_sum: hi_sum.to_string() });
    }
    Ok(())
}

fn weight_sums<'a>(weights: impl Iterator<Item = &'a Interval>) -> (Rational, Rational) {
    let mut lo_sum = Rational::zero();
    let mut hi_sum = Rational::zero();
    for q in weights {
        lo_sum += q.lo();
        hi_sum += q.hi();
    }
    (lo_sum, hi_sum)
}

impl AffineTree {
    pub fn state(s: StateId) -> Self {
        AffineTree::State(s)
    }

    pub fn set(states: impl IntoIterator<Item = StateId>) -> Self {
        AffineTree::Set(states.into_iter().collect())
    }

    pub fn star(branches: Vec<(Interval, AffineTree)>) -> Self {
        AffineTree::Star(branches.into_iter().map(|(w, c)| Branch::new(w, c)).collect())
    }

    pub fn branches(&self) -> Option<&[Branch]> {
        match self {
            AffineTree::Star(bs) => Some(bs),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, AffineTree::Star(_))
    }

    /// States a leaf ranges over (`None` for stars).
    pub fn leaf_states(&self) -> Option<StateSet> {
        match self {
            AffineTree::State(s) => Some(StateSet::singleton(*s)),
            AffineTree::Set(b) | AffineTree::Finite(b) => Some(b.clone()),
            AffineTree::Star(_) => None,
        }
    }

    /// Structural validation; see [`AffineTree::validate_over`] to also check
    /// states against a state space.
    pub fn validate(&self) -> TreeReport {
        let mut report = TreeReport::default();
        self.collect_violations(None, &mut Vec::new(), &mut report);
        report
    }

    pub fn validate_over(&self, n_states: usize) -> TreeReport {
        let mut report = TreeReport::default();
        self.collect_violations(Some(n_states), &mut Vec::new(), &mut report);
        report
    }

    fn collect_violations(&self, n: Option<usize>, path: &mut Vec<usize>, report: &mut TreeReport) {
        let mut push = |kind| report.violations.push(TreeViolation { path: path.clone(), kind });
        match self {
            AffineTree::State(s) => {
                if n.is_some_and(|n| s.0 >= n) {
                    push(TreeViolationKind::StateOutOfRange(*s));
                }
            }
            AffineTree::Set(b) | AffineTree::Finite(b) => {
                if b.is_empty() {
                    push(TreeViolationKind::EmptySet);
                }
                if let Some(s) = n.and_then(|n| b.iter().find(|s| s.0 >= n)) {
                    push(TreeViolationKind::StateOutOfRange(s));
                }
            }
            AffineTree::Star(branches) => {
                if branches.is_empty() {
                    push(TreeViolationKind::EmptyStar);
                    return;
                }
                let (lo_sum, hi_sum) = weight_sums(branches.iter().map(|b| &b.weight));
                if lo_sum > Rational::one() || hi_sum < Rational::one() {
                    push(TreeViolationKind::InfeasibleWeights { lo_sum, hi_sum });
                }
                for (i, b) in branches.iter().enumerate() {
                    path.push(i);
                    b.child.collect_violations(n, path, report);
                    path.pop();
                }
            }
        }
    }

    /// One point-interval branch per state of positive mass.
    pub fn from_distribution(p: &Distribution) -> AffineTree {
        let branches = p
            .masses()
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| Branch::new(Interval::point(m.clone()).expect("mass in [0, 1]"), AffineTree::State(StateId(i))))
            .collect();
        AffineTree::Star(branches)
    }

    /// The credal set of a belief function: branch `m(B_i)` over `CH(B_i)`.
    pub fn from_belief(m: &MassAssignment) -> AffineTree {
        let branches = m
            .focals()
            .iter()
            .map(|(b, mass)| Branch::new(Interval::point(mass.clone()).expect("mass in [0, 1]"), AffineTree::Set(b.clone())))
            .collect();
        AffineTree::Star(branches)
    }

    pub fn from_ima(ima: &IntervalMassAssignment) -> AffineTree {
        let branches =
            ima.focals().iter().map(|(b, q)| Branch::new(q.clone(), AffineTree::Set(b.clone()))).collect();
        AffineTree::Star(branches)
    }

    /// Longest root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        match self {
            AffineTree::Star(bs) => 1 + bs.iter().map(|b| b.child.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            AffineTree::Star(bs) => bs.iter().map(|b| b.child.leaf_count()).sum(),
            _ => 1,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            AffineTree::Star(bs) => 1 + bs.iter().map(|b| b.child.node_count()).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn max_arity(&self) -> usize {
        match self {
            AffineTree::Star(bs) => bs.iter().map(|b| b.child.max_arity()).max().unwrap_or(0).max(bs.len()),
            _ => 0,
        }
    }

    /// All leaves are single states.
    pub fn is_standard(&self) -> bool {
        match self {
            AffineTree::State(_) => true,
            AffineTree::Star(bs) => bs.iter().all(|b| b.child.is_standard()),
            _ => false,
        }
    }

    pub fn has_finite_leaf(&self) -> bool {
        match self {
            AffineTree::Finite(_) => true,
            AffineTree::Star(bs) => bs.iter().any(|b| b.child.has_finite_leaf()),
            _ => false,
        }
    }

    /// Rebuilds the tree with every leaf replaced by `f(leaf, path)`.
    pub fn try_map_leaves<F>(&self, f: &mut F) -> Result<AffineTree>
    where
        F: FnMut(&AffineTree, &[usize]) -> Result<AffineTree>,
    {
        fn go<F>(t: &AffineTree, path: &mut Vec<usize>, f: &mut F) -> Result<AffineTree>
        where
            F: FnMut(&AffineTree, &[usize]) -> Result<AffineTree>,
        {
            match t {
                AffineTree::Star(bs) => {
                    let mut out = Vec::with_capacity(bs.len());
                    for (i, b) in bs.iter().enumerate() {
                        path.push(i);
                        out.push(Branch::new(b.weight.clone(), go(&b.child, path, f)?));
                        path.pop();
                    }
                    Ok(AffineTree::Star(out))
                }
                leaf => f(leaf, path),
            }
        }
        go(self, &mut Vec::new(), f)
    }

    /// Replaces every finite leaf by its convex hull.
    pub fn convex_hull_leaves(&self) -> AffineTree {
        self.try_map_leaves(&mut |leaf, _| {
            Ok(match leaf {
                AffineTree::Finite(b) => AffineTree::Set(b.clone()),
                other => other.clone(),
            })
        })
        .expect("infallible")
    }

    /// Replaces each root-to-leaf path by a single branch weighted with the
    /// product of the intervals along it. The result subsumes the input.
    pub fn flatten(&self) -> AffineTree {
        fn go(t: &AffineTree, acc: &Interval, out: &mut Vec<Branch>) {
            match t {
                AffineTree::Star(bs) => {
                    for b in bs {
                        go(&b.child, &acc.mul(&b.weight), out);
                    }
                }
                leaf => out.push(Branch::new(acc.clone(), leaf.clone())),
            }
        }
        let mut out = Vec::new();
        go(self, &Interval::one(), &mut out);
        AffineTree::Star(out)
    }

    /// Merges the branches at `indices` into one branch weighted by the
    /// (clamped) interval sum, whose child is the convex combination of the
    /// merged children. The merged branch takes the position of the smallest
    /// index.
    pub fn merge_branches(&self, indices: &[usize]) -> Result<AffineTree> {
        let AffineTree::Star(bs) = self else {
            return Err(Error::NotAStar);
        };
        let mut picked: Vec<usize> = indices.to_vec();
        picked.sort_unstable();
        picked.dedup();
        if picked.len() < 2 {
            return Err(Error::TooFewOperands { needed: 2, got: picked.len() });
        }
        if let Some(&index) = picked.iter().find(|&&i| i >= bs.len()) {
            return Err(Error::BranchIndex { index, arity: bs.len() });
        }
        let weight = picked.iter().skip(1).fold(bs[picked[0]].weight.clone(), |acc, &i| acc.add(&bs[i].weight));
        let child = conv_of(picked.iter().map(|&i| &bs[i].child));
        let mut out = Vec::with_capacity(bs.len() - picked.len() + 1);
        for (i, b) in bs.iter().enumerate() {
            if i == picked[0] {
                out.push(Branch::new(weight.clone(), child.clone()));
            } else if !picked.contains(&i) {
                out.push(b.clone());
            }
        }
        Ok(AffineTree::Star(out))
    }

    /// A star subsuming every input star: branch `i` carries the interval
    /// hull of the inputs' branch-`i` intervals over the convex combination of
    /// their branch-`i` children.
    pub fn merge_stars(stars: &[AffineTree]) -> Result<AffineTree> {
        if stars.len() < 2 {
            return Err(Error::TooFewOperands { needed: 2, got: stars.len() });
        }
        let mut all = Vec::with_capacity(stars.len());
        for s in stars {
            all.push(s.branches().ok_or(Error::NotAStar)?);
        }
        let arity = all[0].len();
        if let Some(other) = all.iter().find(|bs| bs.len() != arity) {
            return Err(Error::ArityMismatch(arity, other.len()));
        }
        let branches = (0..arity)
            .map(|i| {
                let weight = all.iter().skip(1).fold(all[0][i].weight.clone(), |acc, bs| acc.hull(&bs[i].weight));
                Branch::new(weight, conv_of(all.iter().map(|bs| &bs[i].child)))
            })
            .collect();
        Ok(AffineTree::Star(branches))
    }

    /// Expands every `CH(B)` leaf into a star of `[0, 1]` branches over the
    /// states of `B`. The denoted world is unchanged.
    pub fn standardize(&self) -> Result<AffineTree> {
        self.try_map_leaves(&mut |leaf, _| match leaf {
            AffineTree::Finite(_) => Err(Error::FiniteLeaf),
            AffineTree::Set(b) => Ok(standard_hull(b)),
            other => Ok(other.clone()),
        })
    }

    /// Sorts branches recursively by child, then interval. Worlds are
    /// insensitive to branch order, so this is a normal form for comparing
    /// trees structurally.
    pub fn canonical(&self) -> AffineTree {
        match self {
            AffineTree::Star(bs) => {
                let mut out: Vec<Branch> =
                    bs.iter().map(|b| Branch::new(b.weight.clone(), b.child.canonical())).collect();
                out.sort_by(|x, y| x.child.cmp(&y.child).then_with(|| x.weight.cmp(&y.weight)));
                AffineTree::Star(out)
            }
            leaf => leaf.clone(),
        }
    }

    /// Draws some member of the world (no particular sampling law).
    pub fn sample_member<R: Rng + ?Sized>(&self, n_states: usize, rng: &mut R) -> Distribution {
        match self {
            AffineTree::State(s) => Distribution::point(n_states, *s),
            AffineTree::Set(b) => sample_on_set(b, n_states, rng),
            AffineTree::Finite(b) => {
                let pick = b.iter().nth(rng.gen_range(0..b.len())).expect("nonempty");
                Distribution::point(n_states, pick)
            }
            AffineTree::Star(bs) => {
                let weights: Vec<Interval> = bs.iter().map(|b| b.weight.clone()).collect();
                let q = sample_affine_vector(&weights, rng);
                let children: Vec<Distribution> = bs.iter().map(|b| b.child.sample_member(n_states, rng)).collect();
                Distribution::mix(&q, &children).expect("sampled weights are affine")
            }
        }
    }
}

impl fmt::Display for AffineTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineTree::State(s) => write!(f, "{s}"),
            AffineTree::Set(b) => write!(f, "CH{b}"),
            AffineTree::Finite(b) => write!(f, "FIN{b}"),
            AffineTree::Star(bs) => {
                f.write_str("*(")?;
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{} {}", b.weight, b.child)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// `CH(B)` written with state leaves only.
pub fn standard_hull(b: &StateSet) -> AffineTree {
    if b.len() == 1 {
        return AffineTree::State(b.first().expect("nonempty"));
    }
    AffineTree::Star(b.iter().map(|s| Branch::new(Interval::unit(), AffineTree::State(s))).collect())
}

/// Convex combination `conv(w_1, .., w_k)` of child worlds. Identical
/// children collapse; set-like children use `conv(CH(B), CH(C)) = CH(B ∪ C)`;
/// anything else is wrapped in a star of `[0, 1]` branches.
pub fn conv_of<'a>(children: impl Iterator<Item = &'a AffineTree>) -> AffineTree {
    let mut distinct: Vec<&AffineTree> = Vec::new();
    for c in children {
        if !distinct.contains(&c) {
            distinct.push(c);
        }
    }
    if distinct.len() == 1 {
        return distinct[0].clone();
    }
    if distinct.iter().all(|c| c.is_leaf()) {
        let union = distinct
            .iter()
            .filter_map(|c| c.leaf_states())
            .fold(StateSet::new(), |acc, b| acc.union(&b));
        return AffineTree::Set(union);
    }
    AffineTree::Star(distinct.into_iter().map(|c| Branch::new(Interval::unit(), c.clone())).collect())
}

/// Draws `q` with `q_i ∈ [lo_i, hi_i]` and `Σ q_i = 1`. Each coordinate is
/// drawn inside its bounds, then the excess (or deficit) is removed in
/// proportion to each coordinate's room, which keeps every bound intact.
pub fn sample_affine_vector<R: Rng + ?Sized>(weights: &[Interval], rng: &mut R) -> Vec<Rational> {
    let mut q: Vec<Rational> = weights
        .iter()
        .map(|w| match rng.gen_range(0..4) {
            0 => w.lo().clone(),
            1 => w.hi().clone(),
            _ => {
                let den = rng.gen_range(1..=12);
                let k = rng.gen_range(0..=den);
                w.lo() + w.width() * ratio(k, den)
            }
        })
        .collect();
    let total: Rational = q.iter().sum();
    let one = Rational::one();
    if total > one {
        let excess = &total - &one;
        let room: Rational = q.iter().zip(weights).map(|(x, w)| x - w.lo()).sum();
        for (x, w) in q.iter_mut().zip(weights) {
            let share = (&*x - w.lo()) * &excess / &room;
            *x -= share;
        }
    } else if total < one {
        let deficit = &one - &total;
        let room: Rational = q.iter().zip(weights).map(|(x, w)| w.hi() - x).sum();
        for (x, w) in q.iter_mut().zip(weights) {
            let share = (w.hi() - &*x) * &deficit / &room;
            *x += share;
        }
    }
    debug_assert!(q.iter().sum::<Rational>().is_one());
    q
}

fn sample_on_set<R: Rng + ?Sized>(b: &StateSet, n_states: usize, rng: &mut R) -> Distribution {
    let mut raw: Vec<i64> = b.iter().map(|_| rng.gen_range(0..=4)).collect();
    if rng.gen_bool(0.25) {
        raw.iter_mut().for_each(|w| *w = 0);
    }
    if raw.iter().all(|&w| w == 0) {
        let k = rng.gen_range(0..raw.len());
        raw[k] = 1;
    }
    let total: i64 = raw.iter().sum();
    let mut mass = vec![Rational::zero(); n_states];
    for (s, w) in b.iter().zip(raw) {
        mass[s.0] = ratio(w, total);
    }
    Distribution::from_raw(mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const A: StateId = StateId(0);
    const B: StateId = StateId(1);
    const C: StateId = StateId(2);

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
    }

    fn pt(n: i64, d: i64) -> Interval {
        Interval::point(ratio(n, d)).unwrap()
    }

    fn ch(states: &[StateId]) -> AffineTree {
        AffineTree::set(states.iter().copied())
    }

    #[test]
    fn validate_examples() {
        let ok = AffineTree::star(vec![(pt(1, 2), AffineTree::State(A)), (pt(1, 2), AffineTree::State(B))]);
        assert!(ok.validate().is_ok());

        let short = AffineTree::star(vec![(iv((2, 10), (4, 10)), AffineTree::State(A))]);
        let report = short.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0].kind, TreeViolationKind::InfeasibleWeights { .. }));

        let empty = AffineTree::Set(StateSet::new());
        assert_eq!(empty.validate().violations[0].kind, TreeViolationKind::EmptySet);
    }

    #[test]
    fn validate_reports_nested_paths() {
        let bad = AffineTree::star(vec![
            (pt(1, 2), AffineTree::State(A)),
            (pt(1, 2), AffineTree::star(vec![(pt(1, 2), AffineTree::Set(StateSet::new()))])),
        ]);
        let report = bad.validate();
        let paths: Vec<Vec<usize>> = report.violations.iter().map(|v| v.path.clone()).collect();
        assert_eq!(paths, vec![vec![1], vec![1, 0]]);
        assert!(!AffineTree::State(StateId(5)).validate_over(3).is_ok());
    }

    #[test]
    fn from_distribution_examples() {
        let point = Distribution::point(3, A);
        assert_eq!(AffineTree::from_distribution(&point), AffineTree::star(vec![(pt(1, 1), AffineTree::State(A))]));

        let p = Distribution::new(vec![ratio(7, 10), ratio(3, 10), int(0)]).unwrap();
        assert_eq!(
            AffineTree::from_distribution(&p),
            AffineTree::star(vec![(pt(7, 10), AffineTree::State(A)), (pt(3, 10), AffineTree::State(B))])
        );

        let u = Distribution::uniform(&StateSet::all(3), 3);
        let t = AffineTree::from_distribution(&u);
        assert!(t.branches().unwrap().iter().all(|b| b.weight == pt(1, 3)));
        assert_eq!(t.leaf_count(), 3);
    }

    #[test]
    fn from_belief_examples() {
        let m = MassAssignment::new(vec![
            (StateSet::singleton(A), ratio(3, 10)),
            ([A, B].into_iter().collect(), ratio(7, 10)),
        ])
        .unwrap();
        assert_eq!(
            AffineTree::from_belief(&m),
            AffineTree::star(vec![(pt(3, 10), ch(&[A])), (pt(7, 10), ch(&[A, B]))])
        );

        let vacuous = MassAssignment::new(vec![(StateSet::all(3), int(1))]).unwrap();
        assert_eq!(AffineTree::from_belief(&vacuous), AffineTree::star(vec![(pt(1, 1), ch(&[A, B, C]))]));

        assert!(MassAssignment::new(vec![(StateSet::singleton(A), ratio(1, 2))]).is_err());
    }

    #[test]
    fn from_ima_examples() {
        let ima = IntervalMassAssignment::new(vec![
            (StateSet::singleton(A), iv((2, 10), (5, 10))),
            ([A, B].into_iter().collect(), iv((5, 10), (8, 10))),
        ])
        .unwrap();
        assert_eq!(
            AffineTree::from_ima(&ima),
            AffineTree::star(vec![(iv((2, 10), (5, 10)), ch(&[A])), (iv((5, 10), (8, 10)), ch(&[A, B]))])
        );

        let m = MassAssignment::new(vec![(StateSet::singleton(A), ratio(1, 4)), (StateSet::singleton(B), ratio(3, 4))])
            .unwrap();
        let point_ima = IntervalMassAssignment::new(
            m.focals().iter().map(|(b, q)| (b.clone(), Interval::point(q.clone()).unwrap())).collect(),
        )
        .unwrap();
        assert_eq!(AffineTree::from_ima(&point_ima), AffineTree::from_belief(&m));

        assert!(IntervalMassAssignment::new(vec![(StateSet::singleton(A), iv((1, 10), (2, 10)))]).is_err());
    }

    #[test]
    fn flatten_multiplies_paths() {
        let t = AffineTree::star(vec![
            (pt(1, 2), AffineTree::star(vec![(iv((3, 10), (7, 10)), ch(&[A])), (iv((3, 10), (7, 10)), ch(&[B]))])),
            (pt(1, 2), ch(&[C])),
        ]);
        let expected = AffineTree::star(vec![
            (iv((3, 20), (7, 20)), ch(&[A])),
            (iv((3, 20), (7, 20)), ch(&[B])),
            (pt(1, 2), ch(&[C])),
        ]);
        assert_eq!(t.flatten(), expected);
        assert_eq!(expected.flatten(), expected);
    }

    #[test]
    fn merge_branches_examples() {
        let s = AffineTree::star(vec![
            (iv((1, 5), (2, 5)), ch(&[A])),
            (iv((1, 5), (2, 5)), ch(&[B])),
            (iv((1, 5), (3, 5)), ch(&[C])),
        ]);
        assert_eq!(
            s.merge_branches(&[0, 1]).unwrap(),
            AffineTree::star(vec![(iv((2, 5), (4, 5)), ch(&[A, B])), (iv((1, 5), (3, 5)), ch(&[C]))])
        );
        assert_eq!(
            s.merge_branches(&[0, 1, 2]).unwrap(),
            AffineTree::star(vec![(iv((3, 5), (1, 1)), ch(&[A, B, C]))])
        );
        assert!(matches!(s.merge_branches(&[0, 3]), Err(Error::BranchIndex { index: 3, arity: 3 })));
        assert!(matches!(s.merge_branches(&[1]), Err(Error::TooFewOperands { .. })));
        assert!(matches!(ch(&[A]).merge_branches(&[0, 1]), Err(Error::NotAStar)));
    }

    #[test]
    fn merge_branches_wraps_non_set_children() {
        let inner = AffineTree::star(vec![(pt(1, 2), ch(&[A])), (pt(1, 2), ch(&[B]))]);
        let s = AffineTree::star(vec![(pt(1, 2), inner.clone()), (pt(1, 2), ch(&[C]))]);
        let merged = s.merge_branches(&[0, 1]).unwrap();
        assert_eq!(
            merged,
            AffineTree::star(vec![(pt(1, 1), AffineTree::star(vec![(Interval::unit(), inner), (Interval::unit(), ch(&[C]))]))])
        );
    }

    #[test]
    fn merge_stars_examples() {
        let s1 = AffineTree::star(vec![(pt(1, 2), ch(&[A])), (pt(1, 2), ch(&[B]))]);
        let s2 = AffineTree::star(vec![(pt(3, 10), ch(&[A])), (pt(7, 10), ch(&[C]))]);
        assert_eq!(
            AffineTree::merge_stars(&[s1.clone(), s2]).unwrap(),
            AffineTree::star(vec![(iv((3, 10), (1, 2)), ch(&[A])), (iv((1, 2), (7, 10)), ch(&[B, C]))])
        );
        assert_eq!(AffineTree::merge_stars(&[s1.clone(), s1.clone()]).unwrap(), s1);

        let s3 = AffineTree::star(vec![(pt(1, 1), ch(&[A]))]);
        assert!(matches!(AffineTree::merge_stars(&[s1.clone(), s3]), Err(Error::ArityMismatch(2, 1))));
        assert!(AffineTree::merge_stars(&[s1]).is_err());
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(
            ch(&[A, B]).standardize().unwrap(),
            AffineTree::star(vec![(Interval::unit(), AffineTree::State(A)), (Interval::unit(), AffineTree::State(B))])
        );
        assert_eq!(AffineTree::State(A).standardize().unwrap(), AffineTree::State(A));
        assert_eq!(ch(&[C]).standardize().unwrap(), AffineTree::State(C));

        let m = MassAssignment::new(vec![
            (StateSet::singleton(A), ratio(3, 10)),
            ([A, B].into_iter().collect(), ratio(7, 10)),
        ])
        .unwrap();
        let std = AffineTree::from_belief(&m).standardize().unwrap();
        assert!(std.is_standard());
        assert_eq!((std.depth(), std.leaf_count()), (2, 3));

        let finite = AffineTree::star(vec![(pt(1, 1), AffineTree::Finite([A, B].into_iter().collect()))]);
        assert!(matches!(finite.standardize(), Err(Error::FiniteLeaf)));
    }

    #[test]
    fn depth_and_leaf_count() {
        assert_eq!((AffineTree::State(A).depth(), AffineTree::State(A).leaf_count()), (0, 1));
        let s = AffineTree::star(vec![
            (pt(1, 3), AffineTree::State(A)),
            (pt(1, 3), AffineTree::State(B)),
            (pt(1, 3), AffineTree::State(C)),
        ]);
        assert_eq!((s.depth(), s.leaf_count()), (1, 3));
    }

    #[test]
    fn sampling_forced_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(AffineTree::State(A).sample_member(3, &mut rng), Distribution::point(3, A));
            let forced = AffineTree::star(vec![(pt(1, 1), AffineTree::State(A))]);
            assert_eq!(forced.sample_member(3, &mut rng), Distribution::point(3, A));
        }
    }

    #[test]
    fn sampled_affine_vectors_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let weights = vec![iv((1, 10), (1, 2)), iv((0, 1), (3, 10)), iv((1, 5), (4, 5))];
        for _ in 0..500 {
            let q = sample_affine_vector(&weights, &mut rng);
            assert_eq!(q.iter().sum::<Rational>(), int(1));
            for (x, w) in q.iter().zip(&weights) {
                assert!(w.contains(x), "{x} outside {w}");
            }
        }
    }

    #[test]
    fn canonical_form_ignores_branch_order() {
        let x = AffineTree::star(vec![(pt(1, 4), ch(&[B])), (pt(3, 4), ch(&[A]))]);
        let y = AffineTree::star(vec![(pt(3, 4), ch(&[A])), (pt(1, 4), ch(&[B]))]);
        assert_ne!(x, y);
        assert_eq!(x.canonical(), y.canonical());
    }
}
