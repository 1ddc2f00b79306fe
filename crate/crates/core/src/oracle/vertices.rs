//! Finite generating sets for affine-worlds and exact membership.
//!
//! For a star `Q ⊗ (w_1..w_n)` the map `(q, P_1..P_n) ↦ Σ q_i P_i` is affine
//! in `q` for fixed children and affine in each child separately, so every
//! world point is a convex combination of `Σ q_i v_i` with `q` a vertex of the
//! weight polytope and each `v_i` a generator of the child. Enumeration keeps
//! only extreme points at every step, which leaves the hull unchanged.

use std::collections::HashSet;
use std::rc::Rc;

use num::{One, Zero};

use super::simplex::LinearProgram;
use crate::credal::{Distribution, Interval, Rational, StateId, StateSet};
use crate::error::{Error, Result};
use crate::tree::{check_feasible, AffineTree};

/// Caps that keep enumeration at desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_states: usize,
    pub max_leaves: usize,
    /// Largest candidate set formed before pruning.
    pub max_candidates: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_states: 5, max_leaves: 512, max_candidates: 200_000 }
    }
}

/// A finite generating set of a world: its convex hull is the world (for
/// trees with finite leaves, the convex hull of the world).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    vertices: Vec<Distribution>,
    hull_only: bool,
}

impl VertexSet {
    pub fn new(vertices: Vec<Distribution>) -> Self {
        Self { vertices, hull_only: false }
    }

    pub fn vertices(&self) -> &[Distribution] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Set when the source tree had finite leaves, so only its hull is
    /// represented.
    pub fn hull_only(&self) -> bool {
        self.hull_only
    }
}

/// How a generator is reached: leaf states and the star weights chosen on
/// the way down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Leaf(StateId),
    /// Zero-weight branches carry no part.
    Mix { weights: Vec<Rational>, parts: Vec<Option<Rc<Witness>>> },
}

impl Witness {
    pub fn evaluate(&self, n_states: usize) -> Distribution {
        match self {
            Witness::Leaf(s) => Distribution::point(n_states, *s),
            Witness::Mix { weights, parts } => {
                let mut mass = vec![Rational::zero(); n_states];
                for (q, part) in weights.iter().zip(parts) {
                    if let Some(part) = part {
                        for (acc, m) in mass.iter_mut().zip(part.evaluate(n_states).masses()) {
                            *acc += q * m;
                        }
                    }
                }
                Distribution::new(mass).expect("witness weights are affine")
            }
        }
    }

    /// Whether this witness is a legal choice of weights and leaf points in
    /// `tree`.
    pub fn conforms_to(&self, tree: &AffineTree) -> bool {
        match (self, tree) {
            (Witness::Leaf(s), leaf) if leaf.is_leaf() => leaf.leaf_states().is_some_and(|b| b.contains(*s)),
            (Witness::Mix { weights, parts }, AffineTree::Star(bs)) => {
                weights.len() == bs.len()
                    && parts.len() == bs.len()
                    && weights.iter().sum::<Rational>().is_one()
                    && weights.iter().zip(bs).all(|(q, b)| b.weight.contains(q))
                    && parts.iter().zip(weights).zip(bs).all(|((part, q), b)| match part {
                        Some(w) => w.conforms_to(&b.child),
                        None => q.is_zero(),
                    })
            }
            _ => false,
        }
    }
}

/// All vertices of `{q : q_i ∈ Q_i, Σ q_i = 1}`. A vertex has at most one
/// coordinate strictly inside its bounds, so this walks lower/upper/free
/// patterns with one free coordinate, pruning partial sums that can no longer
/// reach 1.
pub fn delta_vertices(weights: &[Interval]) -> Result<Vec<Vec<Rational>>> {
    delta_vertices_capped(weights, usize::MAX)
}

/// As [`delta_vertices`], failing with a size error past `cap` vertices.
pub fn delta_vertices_capped(weights: &[Interval], cap: usize) -> Result<Vec<Vec<Rational>>> {
    check_feasible(weights.iter())?;
    let n = weights.len();
    let mut suffix_lo = vec![Rational::zero(); n + 1];
    let mut suffix_hi = vec![Rational::zero(); n + 1];
    for i in (0..n).rev() {
        suffix_lo[i] = &suffix_lo[i + 1] + weights[i].lo();
        suffix_hi[i] = &suffix_hi[i + 1] + weights[i].hi();
    }
    let mut walk =
        DeltaWalk { weights, suffix_lo, suffix_hi, current: vec![Rational::zero(); n], out: Vec::new(), cap };
    walk.visit(0, Rational::zero(), None);
    if walk.out.len() > cap {
        return Err(Error::SizeLimit(format!("more than {cap} weight vertices")));
    }
    Ok(walk.out)
}

struct DeltaWalk<'a> {
    weights: &'a [Interval],
    suffix_lo: Vec<Rational>,
    suffix_hi: Vec<Rational>,
    current: Vec<Rational>,
    out: Vec<Vec<Rational>>,
    cap: usize,
}

impl DeltaWalk<'_> {
    fn visit(&mut self, i: usize, sum: Rational, free: Option<usize>) {
        if self.out.len() > self.cap {
            return;
        }
        let one = Rational::one();
        let (free_lo, free_hi) = match free {
            Some(f) => (self.weights[f].lo().clone(), self.weights[f].hi().clone()),
            None => (Rational::zero(), Rational::zero()),
        };
        if &sum + &self.suffix_lo[i] + &free_lo > one || &sum + &self.suffix_hi[i] + &free_hi < one {
            return;
        }
        if i == self.weights.len() {
            match free {
                None => {
                    if sum == one {
                        self.out.push(self.current.clone());
                    }
                }
                Some(f) => {
                    let value = &one - &sum;
                    if self.weights[f].lo() < &value && &value < self.weights[f].hi() {
                        let mut q = self.current.clone();
                        q[f] = value;
                        self.out.push(q);
                    }
                }
            }
            return;
        }
        let w = &self.weights[i];
        let (lo, hi) = (w.lo().clone(), w.hi().clone());
        self.current[i] = lo.clone();
        self.visit(i + 1, &sum + &lo, free);
        if lo != hi {
            self.current[i] = hi.clone();
            self.visit(i + 1, &sum + &hi, free);
            if free.is_none() {
                self.current[i] = Rational::zero();
                self.visit(i + 1, sum, Some(i));
            }
        }
        self.current[i] = Rational::zero();
    }
}

/// Extreme generators of the world of `tree` over `n_states` states.
pub fn world_vertices(tree: &AffineTree, n_states: usize) -> Result<VertexSet> {
    world_vertices_with(tree, n_states, &OracleLimits::default())
}

pub fn world_vertices_with(tree: &AffineTree, n_states: usize, limits: &OracleLimits) -> Result<VertexSet> {
    let generators = witnessed_vertices_with(tree, n_states, limits)?;
    Ok(VertexSet {
        vertices: generators.into_iter().map(|(v, _)| Distribution::new(v).expect("generator")).collect(),
        hull_only: tree.has_finite_leaf(),
    })
}

/// Generators together with the weight/leaf choices that produce them.
pub fn witnessed_vertices(tree: &AffineTree, n_states: usize) -> Result<Vec<(Distribution, Rc<Witness>)>> {
    Ok(witnessed_vertices_with(tree, n_states, &OracleLimits::default())?
        .into_iter()
        .map(|(v, w)| (Distribution::new(v).expect("generator"), w))
        .collect())
}

type Generator = (Vec<Rational>, Rc<Witness>);
/// A partial sum and the child choices made so far.
type Partial = (Vec<Rational>, Vec<Option<Rc<Witness>>>);

fn witnessed_vertices_with(tree: &AffineTree, n_states: usize, limits: &OracleLimits) -> Result<Vec<Generator>> {
    if n_states > limits.max_states {
        return Err(Error::SizeLimit(format!("{n_states} states (limit {})", limits.max_states)));
    }
    let leaves = tree.leaf_count();
    if leaves > limits.max_leaves {
        return Err(Error::SizeLimit(format!("{leaves} leaves (limit {})", limits.max_leaves)));
    }
    tree.validate_over(n_states).into_result()?;
    generators(tree, n_states, limits)
}

fn generators(tree: &AffineTree, n: usize, limits: &OracleLimits) -> Result<Vec<Generator>> {
    match tree {
        AffineTree::State(s) => Ok(vec![point_generator(n, *s)]),
        AffineTree::Set(b) | AffineTree::Finite(b) => Ok(b.iter().map(|s| point_generator(n, s)).collect()),
        AffineTree::Star(bs) => {
            let children: Vec<Vec<Generator>> =
                bs.iter().map(|b| generators(&b.child, n, limits)).collect::<Result<_>>()?;
            let weights: Vec<Interval> = bs.iter().map(|b| b.weight.clone()).collect();
            let mut all: Vec<Generator> = Vec::new();
            for q in delta_vertices_capped(&weights, limits.max_candidates)? {
                let mut partial: Vec<Partial> =
                    vec![(vec![Rational::zero(); n], Vec::with_capacity(bs.len()))];
                for (qi, child) in q.iter().zip(&children) {
                    if qi.is_zero() {
                        partial.iter_mut().for_each(|(_, parts)| parts.push(None));
                        continue;
                    }
                    let size = partial.len() * child.len();
                    if size > limits.max_candidates {
                        return Err(Error::SizeLimit(format!("{size} candidate generators")));
                    }
                    let mut next = Vec::with_capacity(size);
                    for (point, parts) in &partial {
                        for (v, w) in child {
                            let sum: Vec<Rational> = point.iter().zip(v).map(|(p, x)| p + qi * x).collect();
                            let mut parts = parts.clone();
                            parts.push(Some(w.clone()));
                            next.push((sum, parts));
                        }
                    }
                    partial = prune(next, |(p, _)| p);
                }
                all.extend(partial.into_iter().map(|(point, parts)| {
                    (point, Rc::new(Witness::Mix { weights: q.clone(), parts }))
                }));
            }
            Ok(prune(all, |(p, _)| p))
        }
    }
}

fn point_generator(n: usize, s: StateId) -> Generator {
    (Distribution::point(n, s).into_masses(), Rc::new(Witness::Leaf(s)))
}

/// Drops duplicates, then every point lying in the hull of the others.
fn prune<T>(items: Vec<T>, key: impl Fn(&T) -> &Vec<Rational>) -> Vec<T> {
    let mut seen: HashSet<Vec<Rational>> = HashSet::with_capacity(items.len());
    let mut items: Vec<T> = items.into_iter().filter(|t| seen.insert(key(t).clone())).collect();
    if items.len() <= 2 {
        return items;
    }
    let dim = key(&items[0]).len();
    let mut extreme = vec![false; items.len()];
    for dir in probe_directions(dim) {
        if let Some(i) = unique_maximizer(&items, &key, dir) {
            extreme[i] = true;
        }
    }
    let mut i = 0;
    while i < items.len() {
        if !extreme[i] {
            let known: Vec<&[Rational]> =
                items.iter().zip(&extreme).filter(|(_, &e)| e).map(|(t, _)| key(t).as_slice()).collect();
            let redundant = in_hull(key(&items[i]), &known) || {
                let others: Vec<&[Rational]> =
                    items.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, t)| key(t).as_slice()).collect();
                in_hull(key(&items[i]), &others)
            };
            if redundant {
                items.remove(i);
                extreme.remove(i);
                continue;
            }
            extreme[i] = true;
        }
        i += 1;
    }
    items
}

/// Integer directions with entries in `{-1, 0, 1, 2}`, excluding zero.
fn probe_directions(dim: usize) -> impl Iterator<Item = Vec<i64>> {
    const DIGITS: [i64; 4] = [-1, 0, 1, 2];
    let total = 4usize.pow(dim as u32);
    (1..total).map(move |mut code| {
        let mut dir = Vec::with_capacity(dim);
        for _ in 0..dim {
            dir.push(DIGITS[code % 4]);
            code /= 4;
        }
        dir
    })
}

/// The only point maximizing `dir · x`, if the maximum is attained once.
/// Such a point is a vertex of the hull.
fn unique_maximizer<T>(items: &[T], key: &impl Fn(&T) -> &Vec<Rational>, dir: Vec<i64>) -> Option<usize> {
    let mut best: Option<(Rational, usize, bool)> = None;
    for (i, t) in items.iter().enumerate() {
        let value: Rational = key(t)
            .iter()
            .zip(&dir)
            .filter(|(_, &d)| d != 0)
            .map(|(x, &d)| x * Rational::from_integer(d.into()))
            .sum();
        best = match best {
            None => Some((value, i, true)),
            Some((b, j, unique)) => match value.cmp(&b) {
                std::cmp::Ordering::Greater => Some((value, i, true)),
                std::cmp::Ordering::Equal => Some((b, j, false)),
                std::cmp::Ordering::Less => Some((b, j, unique)),
            },
        };
    }
    best.and_then(|(_, i, unique)| unique.then_some(i))
}

/// Exact test of `x ∈ conv(points)`, where `x` and every point are
/// distributions (so `Σ λ = 1` is implied by the coordinate rows).
fn in_hull(x: &[Rational], points: &[&[Rational]]) -> bool {
    if points.contains(&x) {
        return true;
    }
    // A generator with mass where x has none cannot take part.
    let usable: Vec<&[Rational]> = points
        .iter()
        .copied()
        .filter(|p| p.iter().zip(x).all(|(pv, xv)| !(xv.is_zero() && !pv.is_zero())))
        .collect();
    if usable.is_empty() {
        return false;
    }
    let mut lp = LinearProgram::new(usable.len());
    for (s, xs) in x.iter().enumerate() {
        if xs.is_zero() {
            continue;
        }
        lp.add_equality(usable.iter().map(|p| p[s].clone()).collect(), xs.clone());
    }
    lp.is_feasible()
}

/// `x ∈ conv(vs)`, decided by exact phase-one simplex.
pub fn member(x: &Distribution, vs: &VertexSet) -> bool {
    let points: Vec<&[Rational]> = vs.vertices.iter().map(|v| v.masses()).collect();
    in_hull(x.masses(), &points)
}

/// `world(sup) ⊇ world(sub)`: every generator of `sub` lies in the hull of
/// the generators of `sup`. Finite leaves are compared through their hulls.
pub fn subsumes_exact(sup: &AffineTree, sub: &AffineTree, n_states: usize) -> Result<bool> {
    let sup_vs = world_vertices(sup, n_states)?;
    let sub_vs = world_vertices(sub, n_states)?;
    Ok(sub_vs.vertices().iter().all(|v| member(v, &sup_vs)))
}

/// Same as [`subsumes_exact`] against a precomputed generator set of `sup`.
pub fn subsumes_vertices(sup: &VertexSet, sub: &VertexSet) -> bool {
    sub.vertices().iter().all(|v| member(v, sup))
}

/// Worlds `B ⊆ Ω` of `CH(B)` as vertex sets, used by the belief checks.
pub fn hull_of_set(b: &StateSet, n_states: usize) -> VertexSet {
    VertexSet::new(b.iter().map(|s| Distribution::point(n_states, s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal::{int, ratio};

    const A: StateId = StateId(0);
    const B: StateId = StateId(1);
    const C: StateId = StateId(2);

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
    }

    fn q(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| ratio(n, d)).collect()
    }

    #[test]
    fn delta_vertices_examples() {
        let mut simplex = delta_vertices(&[Interval::unit(), Interval::unit()]).unwrap();
        simplex.sort();
        assert_eq!(simplex, vec![q(&[(0, 1), (1, 1)]), q(&[(1, 1), (0, 1)])]);

        let mut box_slice = delta_vertices(&[iv((2, 10), (6, 10)), iv((4, 10), (8, 10))]).unwrap();
        box_slice.sort();
        assert_eq!(box_slice, vec![q(&[(1, 5), (4, 5)]), q(&[(3, 5), (2, 5)])]);

        let third = Interval::point(ratio(1, 3)).unwrap();
        assert_eq!(delta_vertices(&[third.clone(), third.clone(), third]).unwrap(), vec![q(&[(1, 3), (1, 3), (1, 3)])]);

        assert!(delta_vertices(&[iv((2, 10), (4, 10))]).is_err());
    }

    #[test]
    fn delta_vertices_are_feasible_and_distinct() {
        let weights = vec![iv((0, 1), (1, 2)), iv((1, 10), (1, 2)), iv((0, 1), (1, 3)), iv((1, 5), (1, 1))];
        let vs = delta_vertices(&weights).unwrap();
        let unique: HashSet<_> = vs.iter().cloned().collect();
        assert_eq!(unique.len(), vs.len());
        for v in &vs {
            assert_eq!(v.iter().sum::<Rational>(), int(1));
            assert!(v.iter().zip(&weights).all(|(x, w)| w.contains(x)));
            let interior = v.iter().zip(&weights).filter(|(x, w)| w.lo() < *x && *x < w.hi()).count();
            assert!(interior <= 1);
        }
    }

    #[test]
    fn set_leaf_vertices_and_membership() {
        let vs = world_vertices(&AffineTree::set([A, B]), 3).unwrap();
        assert_eq!(vs.vertices(), &[Distribution::point(3, A), Distribution::point(3, B)]);
        let mid = Distribution::new(vec![ratio(1, 2), ratio(1, 2), int(0)]).unwrap();
        assert!(member(&mid, &vs));
        assert!(!member(&Distribution::point(3, C), &vs));
    }

    #[test]
    fn point_world_has_one_vertex() {
        let p = Distribution::new(vec![ratio(1, 5), ratio(3, 10), ratio(1, 2)]).unwrap();
        let vs = world_vertices(&AffineTree::from_distribution(&p), 3).unwrap();
        assert_eq!(vs.vertices(), &[p]);
    }

    #[test]
    fn projection_fixture_world_has_seven_vertices() {
        // Star([[3/5,4/5] CH{b,c}, [1/5,2/5] CH{a,b}]) over {a,b,c}.
        let t = AffineTree::star(vec![(iv((6, 10), (8, 10)), AffineTree::set([B, C])), (iv((2, 10), (4, 10)), AffineTree::set([A, B]))]);
        let raw = {
            // Unpruned product: 2 weight vertices x 2 x 2 leaf choices.
            let mut pts: HashSet<Vec<Rational>> = HashSet::new();
            for w in delta_vertices(&[iv((6, 10), (8, 10)), iv((2, 10), (4, 10))]).unwrap() {
                for x in [B, C] {
                    for y in [A, B] {
                        let mut m = vec![int(0); 3];
                        m[x.0] += &w[0];
                        m[y.0] += &w[1];
                        pts.insert(m);
                    }
                }
            }
            pts
        };
        assert_eq!(raw.len(), 7);
        let vs = world_vertices(&t, 3).unwrap();
        for v in vs.vertices() {
            assert!(raw.contains(v.masses()));
        }
        for p in &raw {
            assert!(member(&Distribution::new(p.clone()).unwrap(), &vs));
        }
        let f = [int(0), int(10), int(4)];
        let min = raw.iter().map(|p| p.iter().zip(&f).map(|(a, b)| a * b).sum::<Rational>()).min().unwrap();
        assert_eq!(min, ratio(12, 5));
    }

    #[test]
    fn subsumption_examples() {
        let t = AffineTree::star(vec![(iv((1, 5), (3, 5)), AffineTree::set([A])), (iv((2, 5), (4, 5)), AffineTree::set([B, C]))]);
        assert!(subsumes_exact(&AffineTree::Set(StateSet::all(3)), &t, 3).unwrap());
        assert!(subsumes_exact(&t, &t, 3).unwrap());
        assert!(!subsumes_exact(&t, &AffineTree::Set(StateSet::all(3)), 3).unwrap());
    }

    #[test]
    fn witnesses_reconstruct_their_vertices() {
        let t = AffineTree::star(vec![
            (iv((1, 5), (3, 5)), AffineTree::star(vec![(Interval::unit(), AffineTree::State(A)), (iv((1, 2), (1, 1)), AffineTree::set([B, C]))])),
            (iv((2, 5), (4, 5)), AffineTree::set([B, C])),
        ]);
        for (v, w) in witnessed_vertices(&t, 3).unwrap() {
            assert!(w.conforms_to(&t));
            assert_eq!(w.evaluate(3), v);
        }
    }

    #[test]
    fn size_limits_are_enforced() {
        let err = world_vertices(&AffineTree::Set(StateSet::all(6)), 6);
        assert!(matches!(err, Err(Error::SizeLimit(_))));
    }
}
