//! Primitive and abstract actions.
//!
//! A primitive action is a list of branches `⟨C_i, p_i, e_i⟩`: in a state
//! `b ∈ C_i` it moves to `e_i(b)` with probability `p_i`. Abstract actions
//! replace `p_i` by an interval and `e_i` by a set-valued effect; their
//! meaning is the union over all primitive instantiations.

use std::fmt;

use num::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::credal::{ratio, Distribution, Interval, Rational, StateId, StateSet};
use crate::error::{Error, Result};
use crate::oracle::simplex::{LinearProgram, LpOutcome};

/// `e : Ω → Ω`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimitiveEffect(Vec<StateId>);

impl PrimitiveEffect {
    pub fn new(map: Vec<StateId>) -> Self {
        Self(map)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).map(StateId).collect())
    }

    pub fn constant(n: usize, target: StateId) -> Self {
        Self(vec![target; n])
    }

    pub fn apply(&self, s: StateId) -> StateId {
        self.0[s.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn targets(&self) -> &[StateId] {
        &self.0
    }
}

/// `E : Ω → 2^Ω \ {∅}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractEffect(Vec<StateSet>);

impl AbstractEffect {
    pub fn new(map: Vec<StateSet>) -> Self {
        Self(map)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).map(|s| StateSet::singleton(StateId(s))).collect())
    }

    /// Every state may go anywhere.
    pub fn vacuous(n: usize) -> Self {
        Self(vec![StateSet::all(n); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, s: StateId) -> &StateSet {
        &self.0[s.0]
    }

    pub fn images(&self) -> &[StateSet] {
        &self.0
    }

    /// `E(B) = ∪_{b ∈ B} E(b)`.
    pub fn image_of_set(&self, b: &StateSet) -> StateSet {
        b.iter().fold(StateSet::new(), |acc, s| acc.union(self.image(s)))
    }

    /// `e ∈ E`: `e(s) ∈ E(s)` for every state.
    pub fn is_instantiated_by(&self, e: &PrimitiveEffect) -> bool {
        self.len() == e.len() && self.0.iter().zip(e.targets()).all(|(img, t)| img.contains(*t))
    }

    pub fn is_deterministic(&self) -> bool {
        self.0.iter().all(|img| img.len() == 1)
    }
}

impl From<&PrimitiveEffect> for AbstractEffect {
    fn from(e: &PrimitiveEffect) -> Self {
        Self(e.targets().iter().map(|&t| StateSet::singleton(t)).collect())
    }
}

/// `(E_1 ∪ E_2)(s) = E_1(s) ∪ E_2(s)`.
pub fn effect_union(e1: &AbstractEffect, e2: &AbstractEffect) -> AbstractEffect {
    AbstractEffect(e1.0.iter().zip(&e2.0).map(|(a, b)| a.union(b)).collect())
}

/// `(E_2 ∘ E_1)(s) = ∪_{t ∈ E_1(s)} E_2(t)`: apply `first`, then `second`.
pub fn effect_compose(first: &AbstractEffect, second: &AbstractEffect) -> AbstractEffect {
    AbstractEffect(first.0.iter().map(|img| second.image_of_set(img)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimitiveBranch {
    pub condition: StateSet,
    pub prob: Rational,
    pub effect: PrimitiveEffect,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractBranch {
    pub condition: StateSet,
    pub prob: Interval,
    pub effect: AbstractEffect,
}

impl AbstractBranch {
    pub fn new(condition: StateSet, prob: Interval, effect: AbstractEffect) -> Self {
        Self { condition, prob, effect }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionViolation {
    NoBranches,
    /// An effect is not a total map over the state space.
    EffectArity { branch: usize, len: usize },
    StateOutOfRange { branch: usize, state: StateId },
    EmptyImage { branch: usize, state: StateId },
    ProbabilityOutOfRange { branch: usize, prob: Rational },
    /// No condition contains this state.
    Uncovered { state: StateId },
    /// The branch probabilities applying here do not
    /// sum to one.
    SumNotOne { state: StateId, sum: Rational },
    /// Interval bounds applying to this state cannot sum to one.
    InfeasibleAtState { state: StateId, lo_sum: Rational, hi_sum: Rational },
    /// No joint choice of probabilities sums to one in every state.
    Infeasible,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionReport {
    pub violations: Vec<ActionViolation>,
}

impl ActionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidAction(self))
        }
    }
}

impl ActionViolation {
    /// Renders the violation with `name` giving each state's label.
    pub fn describe(&self, name: &dyn Fn(StateId) -> String) -> String {
        match self {
            ActionViolation::NoBranches => "action has no branches".into(),
            ActionViolation::EffectArity { branch, len } => {
                format!("branch {branch}: effect covers {len} states, not the whole state space")
            }
            ActionViolation::StateOutOfRange { branch, state } => format!("branch {branch}: unknown state {state}"),
            ActionViolation::EmptyImage { branch, state } => {
                format!("branch {branch}: empty effect image for {}", name(*state))
            }
            ActionViolation::ProbabilityOutOfRange { branch, prob } => {
                format!("branch {branch}: probability {prob} outside [0, 1]")
            }
            ActionViolation::Uncovered { state } => format!("exhaustiveness: no condition covers {}", name(*state)),
            ActionViolation::SumNotOne { state, sum } => {
                format!("sum rule: probabilities applying to {} sum to {sum}, not 1", name(*state))
            }
            ActionViolation::InfeasibleAtState { state, lo_sum, hi_sum } => format!(
                "feasibility: intervals applying to {} span [{lo_sum}, {hi_sum}], which excludes 1",
                name(*state)
            ),
            ActionViolation::Infeasible => "feasibility: no choice of probabilities sums to 1 in every state".into(),
        }
    }
}

impl fmt::Display for ActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(&|s| s.to_string()))
    }
}

impl ActionReport {
    pub fn describe(&self, name: &dyn Fn(StateId) -> String) -> String {
        if self.violations.is_empty() {
            return "ok".into();
        }
        self.violations.iter().map(|v| v.describe(name)).collect::<Vec<_>>().join("; ")
    }
}

impl fmt::Display for ActionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(&|s| s.to_string()))
    }
}

fn check_structure<'a>(
    n: usize,
    branches: impl Iterator<Item = (&'a StateSet, usize, Box<dyn Iterator<Item = (StateId, bool)> + 'a>)>,
    report: &mut ActionReport,
) -> StateSet {
    let mut covered = StateSet::new();
    let mut any = false;
    for (i, (condition, effect_len, targets)) in branches.enumerate() {
        any = true;
        if let Some(state) = condition.iter().find(|s| s.0 >= n) {
            report.violations.push(ActionViolation::StateOutOfRange { branch: i, state });
        }
        if effect_len != n {
            report.violations.push(ActionViolation::EffectArity { branch: i, len: effect_len });
        }
        for (state, nonempty_in_range) in targets {
            if !nonempty_in_range {
                report.violations.push(ActionViolation::EmptyImage { branch: i, state });
            }
        }
        covered = covered.union(condition);
    }
    if !any {
        report.violations.push(ActionViolation::NoBranches);
    }
    for s in (0..n).map(StateId) {
        if !covered.contains(s) {
            report.violations.push(ActionViolation::Uncovered { state: s });
        }
    }
    covered
}

/// Partition of the state space into classes of states satisfied by exactly
/// the same conditions, ordered by their first state.
fn signature_classes(conditions: &[&StateSet], n: usize) -> Vec<StateSet> {
    let mut classes: Vec<(Vec<bool>, StateSet)> = Vec::new();
    for s in (0..n).map(StateId) {
        let sig: Vec<bool> = conditions.iter().map(|c| c.contains(s)).collect();
        match classes.iter_mut().find(|(k, _)| *k == sig) {
            Some((_, class)) => {
                class.insert(s);
            }
            None => classes.push((sig, StateSet::singleton(s))),
        }
    }
    classes.into_iter().map(|(_, c)| c).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveAction {
    n_states: usize,
    branches: Vec<PrimitiveBranch>,
}

impl PrimitiveAction {
    /// Builds without validating; see [`PrimitiveAction::validate`].
    pub fn new(n_states: usize, branches: Vec<PrimitiveBranch>) -> Self {
        Self { n_states, branches }
    }

    pub fn identity(n_states: usize) -> Self {
        Self::new(
            n_states,
            vec![PrimitiveBranch {
                condition: StateSet::all(n_states),
                prob: Rational::one(),
                effect: PrimitiveEffect::identity(n_states),
            }],
        )
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn branches(&self) -> &[PrimitiveBranch] {
        &self.branches
    }

    /// Exhaustiveness and `Σ_{i : b ∈ C_i} p_i = 1` for all `b`.
    pub fn validate(&self) -> ActionReport {
        let n = self.n_states;
        let mut report = ActionReport::default();
        let covered = check_structure(
            n,
            self.branches.iter().map(|b| {
                let targets: Box<dyn Iterator<Item = (StateId, bool)>> =
                    Box::new(b.effect.targets().iter().enumerate().map(move |(s, t)| (StateId(s), t.0 < n)));
                (&b.condition, b.effect.len(), targets)
            }),
            &mut report,
        );
        for (i, b) in self.branches.iter().enumerate() {
            if b.prob.is_negative() || b.prob > Rational::one() {
                report.violations.push(ActionViolation::ProbabilityOutOfRange { branch: i, prob: b.prob.clone() });
            }
        }
        for s in covered.iter().filter(|s| s.0 < n) {
            let sum: Rational = self.branches.iter().filter(|b| b.condition.contains(s)).map(|b| &b.prob).sum();
            if !sum.is_one() {
                report.violations.push(ActionViolation::SumNotOne { state: s, sum });
            }
        }
        report
    }

    /// `λ(b)`: `P_b(a) = Σ_{i : b ∈ C_i, e_i(b) = a} p_i`.
    pub fn apply_state(&self, b: StateId) -> Result<Distribution> {
        let mut mass = vec![Rational::zero(); self.n_states];
        for br in self.branches.iter().filter(|br| br.condition.contains(b)) {
            mass[br.effect.apply(b).0] += &br.prob;
        }
        Distribution::new(mass)
    }

    /// `λ(P) = Σ_b P(b) · λ(b)`.
    pub fn apply_dist(&self, p: &Distribution) -> Result<Distribution> {
        let mut mass = vec![Rational::zero(); self.n_states];
        for (b, pb) in p.masses().iter().enumerate() {
            if pb.is_zero() {
                continue;
            }
            for (acc, m) in mass.iter_mut().zip(self.apply_state(StateId(b))?.masses()) {
                *acc += pb * m;
            }
        }
        Distribution::new(mass)
    }

    /// Rewrites the branches over mutually exclusive conditions: one branch
    /// per (signature class, original branch covering it).
    pub fn normalize_conditions(&self) -> PrimitiveAction {
        let conditions: Vec<&StateSet> = self.branches.iter().map(|b| &b.condition).collect();
        let mut out = Vec::new();
        for class in signature_classes(&conditions, self.n_states) {
            let rep = class.first().expect("classes are nonempty");
            for b in self.branches.iter().filter(|b| b.condition.contains(rep)) {
                out.push(PrimitiveBranch { condition: class.clone(), prob: b.prob.clone(), effect: b.effect.clone() });
            }
        }
        PrimitiveAction::new(self.n_states, out)
    }

    /// The abstract action whose only instantiation is `self`.
    pub fn to_abstract(&self) -> Result<AbstractAction> {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(AbstractBranch::new(b.condition.clone(), Interval::point(b.prob.clone())?, AbstractEffect::from(&b.effect)))
            })
            .collect::<Result<_>>()?;
        Ok(AbstractAction::new(self.n_states, branches))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractAction {
    n_states: usize,
    branches: Vec<AbstractBranch>,
}

impl AbstractAction {
    /// Builds without validating; see [`AbstractAction::validate`].
    pub fn new(n_states: usize, branches: Vec<AbstractBranch>) -> Self {
        Self { n_states, branches }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn branches(&self) -> &[AbstractBranch] {
        &self.branches
    }

    pub fn into_branches(self) -> Vec<AbstractBranch> {
        self.branches
    }

    /// Exhaustive conditions, well-formed effects, and at least one
    /// instantiation (checked by exact linear feasibility).
    pub fn validate(&self) -> ActionReport {
        let n = self.n_states;
        let mut report = ActionReport::default();
        check_structure(
            n,
            self.branches.iter().map(|b| {
                let targets: Box<dyn Iterator<Item = (StateId, bool)>> = Box::new(
                    b.effect
                        .images()
                        .iter()
                        .enumerate()
                        .map(move |(s, img)| (StateId(s), !img.is_empty() && img.iter().all(|t| t.0 < n))),
                );
                (&b.condition, b.effect.len(), targets)
            }),
            &mut report,
        );
        if !report.is_ok() {
            return report;
        }
        for s in (0..n).map(StateId) {
            let (mut lo_sum, mut hi_sum) = (Rational::zero(), Rational::zero());
            for b in self.branches.iter().filter(|b| b.condition.contains(s)) {
                lo_sum += b.prob.lo();
                hi_sum += b.prob.hi();
            }
            if lo_sum > Rational::one() || hi_sum < Rational::one() {
                report.violations.push(ActionViolation::InfeasibleAtState { state: s, lo_sum, hi_sum });
            }
        }
        if report.is_ok() && !self.probability_polytope().is_feasible() {
            report.violations.push(ActionViolation::Infeasible);
        }
        report
    }

    pub fn is_instantiable(&self) -> bool {
        self.probability_polytope().is_feasible()
    }

    /// `{p : p_i ∈ P_i, Σ_{i : b ∈ C_i} p_i = 1 ∀b}` in standard form over
    /// `x_i = p_i - lo_i` followed by one slack per branch.
    fn probability_polytope(&self) -> LinearProgram {
        let k = self.branches.len();
        let mut lp = LinearProgram::new(2 * k);
        for (i, b) in self.branches.iter().enumerate() {
            let mut row = vec![Rational::zero(); 2 * k];
            row[i] = Rational::one();
            row[k + i] = Rational::one();
            lp.add_equality(row, b.prob.width());
        }
        let conditions: Vec<&StateSet> = self.branches.iter().map(|b| &b.condition).collect();
        for class in signature_classes(&conditions, self.n_states) {
            let rep = class.first().expect("nonempty");
            let mut row = vec![Rational::zero(); 2 * k];
            let mut rhs = Rational::one();
            for (i, b) in self.branches.iter().enumerate() {
                if b.condition.contains(rep) {
                    row[i] = Rational::one();
                    rhs -= b.prob.lo();
                }
            }
            lp.add_equality(row, rhs);
        }
        lp
    }

    /// Some vertex of the feasible probability polytope, selected by a random
    /// linear objective.
    fn random_probability_vertex<R: Rng + ?Sized>(&self, lp: &LinearProgram, rng: &mut R) -> Result<Vec<Rational>> {
        let k = self.branches.len();
        let mut cost: Vec<Rational> = (0..k).map(|_| Rational::from_integer(rng.gen_range(-5i64..=5).into())).collect();
        cost.extend((0..k).map(|_| Rational::zero()));
        match lp.minimize(&cost) {
            LpOutcome::Optimal(x) => Ok(self.branches.iter().zip(x).map(|(b, xi)| b.prob.lo() + xi).collect()),
            LpOutcome::Infeasible => Err(Error::Uninstantiable),
            LpOutcome::Unbounded => unreachable!("the probability polytope is bounded"),
        }
    }

    /// A random primitive instantiation: probabilities are a random vertex or
    /// a random convex mix of vertices of the feasible polytope; each effect
    /// target is drawn uniformly from its image.
    pub fn sample_instantiation<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PrimitiveAction> {
        let lp = self.probability_polytope();
        let picks = rng.gen_range(1..=3);
        let vertices: Vec<Vec<Rational>> =
            (0..picks).map(|_| self.random_probability_vertex(&lp, rng)).collect::<Result<_>>()?;
        let raw: Vec<i64> = (0..picks).map(|_| rng.gen_range(1..=4)).collect();
        let total: i64 = raw.iter().sum();
        let probs: Vec<Rational> = (0..self.branches.len())
            .map(|i| vertices.iter().zip(&raw).map(|(v, &w)| &v[i] * ratio(w, total)).sum())
            .collect();
        let branches = self
            .branches
            .iter()
            .zip(probs)
            .map(|(b, prob)| {
                let targets = b
                    .effect
                    .images()
                    .iter()
                    .map(|img| {
                        let options: Vec<StateId> = img.iter().collect();
                        *options.choose(rng).expect("images are nonempty")
                    })
                    .collect();
                PrimitiveBranch { condition: b.condition.clone(), prob, effect: PrimitiveEffect::new(targets) }
            })
            .collect();
        Ok(PrimitiveAction::new(self.n_states, branches))
    }

    /// Same rewriting as [`PrimitiveAction::normalize_conditions`].
    pub fn normalize_conditions(&self) -> AbstractAction {
        let conditions: Vec<&StateSet> = self.branches.iter().map(|b| &b.condition).collect();
        let mut out = Vec::new();
        for class in signature_classes(&conditions, self.n_states) {
            let rep = class.first().expect("classes are nonempty");
            for b in self.branches.iter().filter(|b| b.condition.contains(rep)) {
                out.push(AbstractBranch::new(class.clone(), b.prob.clone(), b.effect.clone()));
            }
        }
        AbstractAction::new(self.n_states, out)
    }

    pub fn is_primitive(&self) -> bool {
        self.branches.iter().all(|b| b.prob.is_point() && b.effect.is_deterministic())
    }

    /// The primitive action this denotes when every probability is a point
    /// and every effect is deterministic.
    pub fn as_primitive(&self) -> Option<PrimitiveAction> {
        if !self.is_primitive() {
            return None;
        }
        let branches = self
            .branches
            .iter()
            .map(|b| PrimitiveBranch {
                condition: b.condition.clone(),
                prob: b.prob.lo().clone(),
                effect: PrimitiveEffect::new(b.effect.images().iter().map(|img| img.first().expect("nonempty")).collect()),
            })
            .collect();
        Some(PrimitiveAction::new(self.n_states, branches))
    }
}

pub fn effect_instantiates(e: &PrimitiveEffect, abstract_effect: &AbstractEffect) -> bool {
    abstract_effect.is_instantiated_by(e)
}

/// `λ ∈ Λ`: same conditions branchwise, `p_i ∈ P_i`, `e_i ∈ E_i`, and `λ`
/// itself sums to one in every state.
pub fn action_instantiates(lambda: &PrimitiveAction, big_lambda: &AbstractAction) -> bool {
    lambda.n_states() == big_lambda.n_states()
        && lambda.branches().len() == big_lambda.branches().len()
        && lambda.branches().iter().zip(big_lambda.branches()).all(|(p, a)| {
            p.condition == a.condition && a.prob.contains(&p.prob) && a.effect.is_instantiated_by(&p.effect)
        })
        && lambda.validate().is_ok()
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

    fn set(states: &[StateId]) -> StateSet {
        states.iter().copied().collect()
    }

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
    }

    fn pbranch(condition: StateSet, p: Rational, effect: PrimitiveEffect) -> PrimitiveBranch {
        PrimitiveBranch { condition, prob: p, effect }
    }

    /// `{⟨Ω, 7/10, const a⟩, ⟨Ω, 3/10, id⟩}` over `{a, b}`.
    fn seventy_thirty() -> PrimitiveAction {
        PrimitiveAction::new(
            2,
            vec![
                pbranch(StateSet::all(2), ratio(7, 10), PrimitiveEffect::constant(2, A)),
                pbranch(StateSet::all(2), ratio(3, 10), PrimitiveEffect::identity(2)),
            ],
        )
    }

    /// The abstract action used throughout the projection examples.
    fn lambda_x() -> AbstractAction {
        let e1 = AbstractEffect::new(vec![set(&[B]), set(&[B, C]), set(&[C])]);
        AbstractAction::new(
            3,
            vec![
                AbstractBranch::new(StateSet::all(3), iv((6, 10), (8, 10)), e1),
                AbstractBranch::new(StateSet::all(3), iv((2, 10), (4, 10)), AbstractEffect::identity(3)),
            ],
        )
    }

    #[test]
    fn validate_primitive_examples() {
        assert!(seventy_thirty().validate().is_ok());

        let over = PrimitiveAction::new(
            2,
            vec![
                pbranch(StateSet::all(2), ratio(7, 10), PrimitiveEffect::constant(2, A)),
                pbranch(StateSet::all(2), ratio(4, 10), PrimitiveEffect::identity(2)),
            ],
        );
        let report = over.validate();
        assert_eq!(
            report.violations,
            vec![
                ActionViolation::SumNotOne { state: A, sum: ratio(11, 10) },
                ActionViolation::SumNotOne { state: B, sum: ratio(11, 10) }
            ]
        );

        let partial = PrimitiveAction::new(2, vec![pbranch(set(&[A]), int(1), PrimitiveEffect::identity(2))]);
        assert_eq!(partial.validate().violations, vec![ActionViolation::Uncovered { state: B }]);
    }

    #[test]
    fn apply_primitive_state_examples() {
        let lambda = seventy_thirty();
        assert_eq!(lambda.apply_state(B).unwrap().masses(), &[ratio(7, 10), ratio(3, 10)]);
        assert_eq!(lambda.apply_state(A).unwrap(), Distribution::point(2, A));
        let id = PrimitiveAction::identity(3);
        for s in [A, B, C] {
            assert_eq!(id.apply_state(s).unwrap(), Distribution::point(3, s));
        }
    }

    #[test]
    fn apply_primitive_dist_examples() {
        let lambda = seventy_thirty();
        let half = Distribution::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(lambda.apply_dist(&half).unwrap().masses(), &[ratio(17, 20), ratio(3, 20)]);
        assert_eq!(lambda.apply_dist(&Distribution::point(2, B)).unwrap(), lambda.apply_state(B).unwrap());
        assert_eq!(PrimitiveAction::identity(2).apply_dist(&half).unwrap(), half);
    }

    #[test]
    fn normalize_conditions_example() {
        let e1 = PrimitiveEffect::constant(2, A);
        let e2 = PrimitiveEffect::identity(2);
        let lambda = PrimitiveAction::new(
            2,
            vec![pbranch(set(&[A]), ratio(1, 2), e1.clone()), pbranch(StateSet::all(2), ratio(1, 2), e2.clone())],
        );
        let norm = lambda.normalize_conditions();
        let shape: Vec<(StateSet, PrimitiveEffect)> =
            norm.branches().iter().map(|b| (b.condition.clone(), b.effect.clone())).collect();
        assert_eq!(shape, vec![(set(&[A]), e1), (set(&[A]), e2.clone()), (set(&[B]), e2)]);
    }

    #[test]
    fn normalize_conditions_fixed_point() {
        let lambda = PrimitiveAction::new(
            3,
            vec![
                pbranch(set(&[A]), int(1), PrimitiveEffect::identity(3)),
                pbranch(set(&[B, C]), int(1), PrimitiveEffect::constant(3, A)),
            ],
        );
        assert_eq!(lambda.normalize_conditions(), lambda);
    }

    #[test]
    fn effect_instantiation_examples() {
        assert!(effect_instantiates(&PrimitiveEffect::identity(3), &AbstractEffect::identity(3)));
        let e = PrimitiveEffect::new(vec![B, B, C]);
        let big = AbstractEffect::new(vec![set(&[C]), set(&[B]), set(&[C])]);
        assert!(!effect_instantiates(&e, &big));
        assert!(effect_instantiates(&e, &AbstractEffect::vacuous(3)));
    }

    fn instance(p1: Rational, p2: Rational) -> PrimitiveAction {
        PrimitiveAction::new(
            3,
            vec![
                pbranch(StateSet::all(3), p1, PrimitiveEffect::new(vec![B, C, C])),
                pbranch(StateSet::all(3), p2, PrimitiveEffect::identity(3)),
            ],
        )
    }

    #[test]
    fn action_instantiation_examples() {
        let big = lambda_x();
        assert!(action_instantiates(&instance(ratio(7, 10), ratio(3, 10)), &big));
        assert!(!action_instantiates(&instance(ratio(9, 10), ratio(1, 10)), &big));
        assert!(!action_instantiates(&instance(ratio(6, 10), ratio(3, 10)), &big));
    }

    #[test]
    fn validate_abstract_examples() {
        assert!(lambda_x().validate().is_ok());

        let starved = AbstractAction::new(
            3,
            vec![
                AbstractBranch::new(set(&[A, B]), Interval::one(), AbstractEffect::identity(3)),
                AbstractBranch::new(set(&[C]), iv((2, 10), (4, 10)), AbstractEffect::identity(3)),
            ],
        );
        let report = starved.validate();
        assert!(matches!(
            report.violations.as_slice(),
            [ActionViolation::InfeasibleAtState { state: C, .. }]
        ));
        assert!(matches!(starved.sample_instantiation(&mut ChaCha8Rng::seed_from_u64(0)), Err(Error::Uninstantiable)));
    }

    #[test]
    fn validate_abstract_detects_joint_infeasibility() {
        // Each state alone can reach 1, but p1 + p2 = 1 and p1 + p3 = 1 with
        // p2 ∈ [0, 1/5], p3 ∈ [4/5, 1] force p1 ≥ 4/5 and p1 ≤ 1/5.
        let with_third = |third: Interval| {
            AbstractAction::new(
                2,
                vec![
                    AbstractBranch::new(StateSet::all(2), Interval::unit(), AbstractEffect::identity(2)),
                    AbstractBranch::new(set(&[A]), iv((0, 1), (1, 5)), AbstractEffect::identity(2)),
                    AbstractBranch::new(set(&[B]), third, AbstractEffect::identity(2)),
                ],
            )
        };
        assert!(with_third(Interval::unit()).validate().is_ok());
        assert_eq!(with_third(iv((4, 5), (1, 1))).validate().violations, vec![ActionViolation::Infeasible]);
    }

    #[test]
    fn point_instantiation_is_unique() {
        let lambda = seventy_thirty().to_abstract().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            assert_eq!(lambda.sample_instantiation(&mut rng).unwrap(), seventy_thirty());
        }
        assert_eq!(lambda.as_primitive().unwrap(), seventy_thirty());
    }

    #[test]
    fn sampled_instantiations_instantiate() {
        let big = lambda_x();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let lambda = big.sample_instantiation(&mut rng).unwrap();
            assert!(action_instantiates(&lambda, &big));
        }
    }

    #[test]
    fn effect_algebra_examples() {
        let e1 = AbstractEffect::new(vec![set(&[B]), set(&[B]), set(&[C])]);
        let e2 = AbstractEffect::new(vec![set(&[C]), set(&[B]), set(&[C])]);
        assert_eq!(effect_union(&e1, &e2).image(A), &set(&[B, C]));

        let first = AbstractEffect::new(vec![set(&[B, C]), set(&[B]), set(&[C])]);
        let second = AbstractEffect::new(vec![set(&[A]), set(&[A]), set(&[C])]);
        assert_eq!(effect_compose(&first, &second).image(A), &set(&[A, C]));

        let id = AbstractEffect::identity(3);
        assert_eq!(effect_compose(&first, &id), first);
        assert_eq!(effect_compose(&id, &first), first);
    }
}
