//! Seeded property suite checking the library against the oracle.
//!
//! Each property draws a fresh fixture per case from a generator seeded by
//! `(seed, property, case)`, so cases are independent and may run in any
//! order. Failing cases are re-run with one size bound halved at a time,
//! keeping each step that still fails, and the last failing fixture is
//! reported.

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::gen::{self, ConditionShape, GenConfig};
use super::vertices::{member, witnessed_vertices, world_vertices, VertexSet};
use super::{sampled_action_image, subsumes_exact};
use crate::abstraction::{inter_abstract, intra_abstract, seq_abstract, straddles};
use crate::action::{AbstractAction, PrimitiveAction};
use crate::codec::{action_to_json, distribution_to_json, tree_to_json, utility_to_json};
use crate::credal::{ratio, Distribution, Rational, StateId, StateSet, StateSpace};
use crate::error::Result;
use crate::projection::{pr1, pr2, pr3};
use crate::tree::{AffineTree, Branch};
use crate::valuation::eui;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Lemmas,
    Theorems,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Lemmas,
    Theorems,
    All,
}

impl Selection {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "lemmas" => Some(Selection::Lemmas),
            "theorems" => Some(Selection::Theorems),
            "all" => Some(Selection::All),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Selection::Lemmas => "lemmas",
            Selection::Theorems => "theorems",
            Selection::All => "all",
        }
    }

    fn includes(self, g: Group) -> bool {
        matches!((self, g), (Selection::All, _) | (Selection::Lemmas, Group::Lemmas) | (Selection::Theorems, Group::Theorems))
    }
}

pub type FlattenFn = fn(&AffineTree) -> AffineTree;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Cases per property; `None` uses each property's default count.
    pub cases: Option<usize>,
    pub gen: GenConfig,
    pub selection: Selection,
    /// Flatten implementation under test.
    pub flatten: FlattenFn,
    pub shrink: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            cases: None,
            gen: GenConfig::default(),
            selection: Selection::All,
            flatten: AffineTree::flatten,
            shrink: true,
        }
    }
}

struct Ctx {
    gen: GenConfig,
    flatten: FlattenFn,
}

enum Outcome {
    Pass,
    Fail { message: String, fixture: Value },
}

type Check = fn(&mut ChaCha8Rng, &Ctx) -> Outcome;

pub struct Property {
    pub name: &'static str,
    pub group: Group,
    pub default_cases: usize,
    check: Check,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Shrunk {
    pub max_depth: usize,
    pub max_arity: usize,
    pub max_branches: usize,
    pub message: String,
    pub fixture: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub message: String,
    pub fixture: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<Shrunk>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub group: Group,
    pub cases: usize,
    pub passed: bool,
    pub failed: usize,
    /// The first few failures, in case order.
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

const REPORTED_FAILURES: usize = 5;

pub fn properties() -> Vec<Property> {
    let p = |name, group, default_cases, check| Property { name, group, default_cases, check };
    vec![
        p("enlargement_subsumes", Group::Lemmas, 200, enlargement_subsumes as Check),
        p("merge_stars_subsumes", Group::Lemmas, 200, merge_stars_subsumes),
        p("merge_branches_subsumes", Group::Lemmas, 200, merge_branches_subsumes),
        p("flatten_subsumes", Group::Lemmas, 200, flatten_subsumes),
        p("worlds_are_convex", Group::Lemmas, 500, worlds_are_convex),
        p("subsumption_is_preorder", Group::Lemmas, 100, subsumption_is_preorder),
        p("vertices_are_reachable", Group::Lemmas, 100, vertices_are_reachable),
        p("action_semi_invariance", Group::Lemmas, 200, action_semi_invariance),
        p("belief_functions_are_stars", Group::Theorems, 100, belief_functions_are_stars),
        p("eui_matches_oracle", Group::Theorems, 200, eui_matches_oracle),
        p("eui_monotone", Group::Theorems, 100, eui_monotone),
        p("projection_chain", Group::Theorems, 300, projection_chain),
        p("pr1_hull_is_pr2", Group::Theorems, 100, pr1_hull_is_pr2),
        p("normalization_preserves_semantics", Group::Theorems, 100, normalization_preserves_semantics),
        p("primitive_sum_rule", Group::Theorems, 200, primitive_sum_rule),
        p("intra_abstraction_sound", Group::Theorems, 100, intra_abstraction_sound),
        p("inter_abstraction_sound", Group::Theorems, 100, inter_abstraction_sound),
        p("seq_abstraction_sound", Group::Theorems, 100, seq_abstraction_sound),
        p("growth_laws", Group::Theorems, 100, growth_laws),
    ]
}

fn case_rng(seed: u64, property: usize, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((property as u64) << 32) | case as u64);
    rng
}

fn run_case(check: Check, seed: u64, property: usize, case: usize, ctx: &Ctx) -> Outcome {
    check(&mut case_rng(seed, property, case), ctx)
}

fn shrink(check: Check, seed: u64, property: usize, case: usize, config: &SuiteConfig) -> Option<Shrunk> {
    let mut best = None;
    let mut cfg = config.gen;
    'outer: loop {
        for next in cfg.shrink_steps() {
            let ctx = Ctx { gen: next, flatten: config.flatten };
            if let Outcome::Fail { message, fixture } = run_case(check, seed, property, case, &ctx) {
                best = Some(Shrunk {
                    max_depth: next.max_depth,
                    max_arity: next.max_arity,
                    max_branches: next.max_branches,
                    message,
                    fixture,
                });
                cfg = next;
                continue 'outer;
            }
        }
        return best;
    }
}

/// Runs one property by name; `None` if no property has that name.
pub fn run_property(name: &str, config: &SuiteConfig) -> Option<PropertyReport> {
    let props = properties();
    let index = props.iter().position(|p| p.name == name)?;
    Some(run_indexed(index, &props[index], config))
}

fn run_indexed(index: usize, prop: &Property, config: &SuiteConfig) -> PropertyReport {
    let cases = config.cases.unwrap_or(prop.default_cases);
    let ctx = Ctx { gen: config.gen, flatten: config.flatten };
    let outcomes: Vec<Outcome> =
        (0..cases).into_par_iter().map(|case| run_case(prop.check, config.seed, index, case, &ctx)).collect();
    let mut failed = 0;
    let mut failures = Vec::new();
    for (case, outcome) in outcomes.into_iter().enumerate() {
        if let Outcome::Fail { message, fixture } = outcome {
            failed += 1;
            if failures.len() < REPORTED_FAILURES {
                let shrunk = if config.shrink { shrink(prop.check, config.seed, index, case, config) } else { None };
                failures.push(Failure { case, message, fixture, shrunk });
            }
        }
    }
    PropertyReport { name: prop.name.to_string(), group: prop.group, cases, passed: failed == 0, failed, failures }
}

/// Runs every selected property.
pub fn run_property_suite(config: &SuiteConfig) -> SuiteReport {
    let props = properties();
    let reports: Vec<PropertyReport> = props
        .iter()
        .enumerate()
        .filter(|(_, p)| config.selection.includes(p.group))
        .map(|(i, p)| run_indexed(i, p, config))
        .collect();
    SuiteReport {
        suite: config.selection.name().to_string(),
        seed: config.seed,
        passed: reports.iter().all(|r| r.passed),
        properties: reports,
    }
}

// Fixture helpers.

struct Fixture {
    space: StateSpace,
    fields: serde_json::Map<String, Value>,
}

impl Fixture {
    fn new(n: usize) -> Self {
        let mut fields = serde_json::Map::new();
        fields.insert("states".into(), json!(n));
        Self { space: StateSpace::anonymous(n).expect("n > 0"), fields }
    }

    fn tree(mut self, key: &str, t: &AffineTree) -> Self {
        self.fields.insert(key.into(), tree_to_json(t, &self.space));
        self
    }

    fn action(mut self, key: &str, a: &AbstractAction) -> Self {
        self.fields.insert(key.into(), action_to_json(a, &self.space));
        self
    }

    fn primitive(self, key: &str, a: &PrimitiveAction) -> Self {
        match a.to_abstract() {
            Ok(abs) => self.action(key, &abs),
            Err(_) => self.value(key, json!(format!("{a:?}"))),
        }
    }

    fn dist(mut self, key: &str, p: &Distribution) -> Self {
        self.fields.insert(key.into(), distribution_to_json(p, &self.space));
        self
    }

    fn value(mut self, key: &str, v: Value) -> Self {
        self.fields.insert(key.into(), v);
        self
    }

    fn verdict(self, result: Result<Option<String>>) -> Outcome {
        match result {
            Ok(None) => Outcome::Pass,
            Ok(Some(message)) => Outcome::Fail { message, fixture: Value::Object(self.fields) },
            Err(e) => Outcome::Fail { message: format!("error: {e}"), fixture: Value::Object(self.fields) },
        }
    }
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(message)
}

fn subsumes(sup: &AffineTree, sub: &AffineTree, n: usize, what: &str) -> Result<Option<String>> {
    Ok(require(subsumes_exact(sup, sub, n)?, || format!("{what}: subsumption fails")))
}

fn first_outside(points: &[Distribution], vs: &VertexSet) -> Option<Distribution> {
    points.iter().find(|p| !member(p, vs)).cloned()
}

/// Widens some leaves and some branch intervals.
fn enlarge<R: Rng + ?Sized>(t: &AffineTree, n: usize, rng: &mut R) -> AffineTree {
    match t {
        AffineTree::Star(bs) => AffineTree::Star(
            bs.iter()
                .map(|b| {
                    let weight = if rng.gen_bool(0.5) {
                        b.weight.hull(&gen::interval_around(b.weight.lo(), rng))
                    } else {
                        b.weight.clone()
                    };
                    Branch::new(weight, enlarge(&b.child, n, rng))
                })
                .collect(),
        ),
        leaf => {
            if rng.gen_bool(0.5) {
                let b = leaf.leaf_states().expect("leaf");
                AffineTree::Set(b.union(&gen::subset(n, n, rng)))
            } else {
                leaf.clone()
            }
        }
    }
}

fn star_with_arity<R: Rng + ?Sized>(n: usize, k: usize, cfg: &GenConfig, rng: &mut R) -> AffineTree {
    let child_cfg = GenConfig { max_depth: cfg.max_depth.saturating_sub(1), ..*cfg };
    let ws = gen::weights(k, rng);
    AffineTree::Star(ws.into_iter().map(|w| Branch::new(w, gen::tree(n, &child_cfg, false, rng))).collect())
}

/// A smaller world for checks that project through two actions.
fn small_world<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, rng: &mut R) -> AffineTree {
    let small = GenConfig { max_depth: cfg.max_depth.min(2), max_arity: cfg.max_arity.min(2), ..*cfg };
    gen::tree(n, &small, true, rng)
}

// Properties.

fn enlargement_subsumes(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let big = enlarge(&t, n, rng);
    Fixture::new(n).tree("tree", &t).tree("enlarged", &big).verdict(subsumes(&big, &t, n, "enlarged vs original"))
}

fn merge_stars_subsumes(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let k = rng.gen_range(1..=ctx.gen.max_arity.max(1));
    let count = rng.gen_range(2..=3);
    let stars: Vec<AffineTree> = (0..count).map(|_| star_with_arity(n, k, &ctx.gen, rng)).collect();
    let mut fx = Fixture::new(n);
    for (i, s) in stars.iter().enumerate() {
        fx = fx.tree(&format!("star{i}"), s);
    }
    let result = (|| {
        let merged = AffineTree::merge_stars(&stars)?;
        for (i, s) in stars.iter().enumerate() {
            if let Some(m) = subsumes(&merged, s, n, &format!("merged vs star{i}"))? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    })();
    fx.verdict(result)
}

fn merge_branches_subsumes(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let k = rng.gen_range(2..=ctx.gen.max_arity.max(2));
    let t = star_with_arity(n, k, &ctx.gen, rng);
    let mut idx: Vec<usize> = (0..k).collect();
    idx.shuffle(rng);
    idx.truncate(rng.gen_range(2..=k));
    idx.sort_unstable();
    let fx = Fixture::new(n).tree("tree", &t).value("indices", json!(idx));
    let result = t.merge_branches(&idx).and_then(|merged| subsumes(&merged, &t, n, "merged vs original"));
    fx.verdict(result)
}

fn flatten_subsumes(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let flat = (ctx.flatten)(&t);
    Fixture::new(n).tree("tree", &t).tree("flattened", &flat).verdict(subsumes(&flat, &t, n, "flattened vs original"))
}

fn worlds_are_convex(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let p1 = t.sample_member(n, rng);
    let p2 = t.sample_member(n, rng);
    let den = rng.gen_range(1..=12);
    let alpha = ratio(rng.gen_range(0..=den), den);
    let fx = Fixture::new(n).tree("tree", &t).dist("p1", &p1).dist("p2", &p2).value("alpha", json!(alpha.to_string()));
    let result = (|| {
        let x = Distribution::mix(&[alpha.clone(), Rational::one() - &alpha], &[p1.clone(), p2.clone()])?;
        let vs = world_vertices(&t, n)?;
        Ok(require(member(&x, &vs), || "mixture of two members is not a member".into()))
    })();
    fx.verdict(result)
}

fn subsumption_is_preorder(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let mid = enlarge(&t, n, rng);
    let top = enlarge(&mid, n, rng);
    let fx = Fixture::new(n).tree("tree", &t).tree("middle", &mid).tree("top", &top);
    let result = (|| {
        for (name, x) in [("tree", &t), ("middle", &mid), ("top", &top)] {
            if !subsumes_exact(x, x, n)? {
                return Ok(Some(format!("{name} does not subsume itself")));
            }
        }
        if subsumes_exact(&mid, &t, n)? && subsumes_exact(&top, &mid, n)? && !subsumes_exact(&top, &t, n)? {
            return Ok(Some("transitivity fails".into()));
        }
        Ok(None)
    })();
    fx.verdict(result)
}

fn vertices_are_reachable(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let fx = Fixture::new(n).tree("tree", &t);
    let result = (|| {
        let witnessed = witnessed_vertices(&t, n)?;
        for (v, w) in &witnessed {
            if !w.conforms_to(&t) {
                return Ok(Some(format!("witness for {v:?} is not a legal choice")));
            }
            if w.evaluate(n) != *v {
                return Ok(Some(format!("witness does not evaluate to {v:?}")));
            }
        }
        let vs = VertexSet::new(witnessed.into_iter().map(|(v, _)| v).collect());
        let samples: Vec<Distribution> = (0..5).map(|_| t.sample_member(n, rng)).collect();
        Ok(first_outside(&samples, &vs).map(|p| format!("sampled member {p:?} outside the vertex hull")))
    })();
    fx.verdict(result)
}

fn action_semi_invariance(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let star = gen::star(n, &GenConfig { max_depth: ctx.gen.max_depth.min(2), ..ctx.gen }, false, rng);
    let action = gen::abstract_action(n, &ctx.gen, rng);
    let fx = Fixture::new(n).tree("star", &star).action("action", &action);
    let result = (|| {
        let bs = star.branches().expect("star");
        let image = AffineTree::Star(
            bs.iter().map(|b| Ok(Branch::new(b.weight.clone(), pr3(&action, &b.child)?))).collect::<Result<_>>()?,
        );
        let vs = world_vertices(&image, n)?;
        let points = sampled_action_image(&action, &star, 5, rng)?;
        Ok(first_outside(&points, &vs).map(|p| format!("image point {p:?} outside the projected star")))
    })();
    fx.verdict(result)
}

/// All distributions on the grid with denominator `den`.
fn grid(n: usize, den: i64) -> Vec<Distribution> {
    fn go(n: usize, left: i64, den: i64, prefix: &mut Vec<i64>, out: &mut Vec<Distribution>) {
        if prefix.len() == n - 1 {
            let mass = prefix.iter().chain(std::iter::once(&left)).map(|&k| ratio(k, den)).collect();
            out.push(Distribution::new(mass).expect("grid point"));
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            go(n, left - k, den, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, den, den, &mut Vec::new(), &mut out);
    out
}

fn nonempty_subsets(n: usize) -> Vec<StateSet> {
    (1u32..(1 << n)).map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(StateId).collect()).collect()
}

fn belief_functions_are_stars(rng: &mut ChaCha8Rng, _ctx: &Ctx) -> Outcome {
    let n = 3;
    let m = gen::mass_assignment(n, 3, rng);
    let t = AffineTree::from_belief(&m);
    let den = rng.gen_range(3..=8);
    let fx = Fixture::new(n).tree("belief_star", &t).value("grid", json!(den));
    let result = (|| {
        let subsets = nonempty_subsets(n);
        let consistent = |p: &Distribution| subsets.iter().all(|b| m.belief(b) <= p.probability_of(b));
        for _ in 0..10 {
            let p = t.sample_member(n, rng);
            if !consistent(&p) {
                return Ok(Some(format!("member {p:?} violates a belief lower bound")));
            }
        }
        let vs = world_vertices(&t, n)?;
        for p in grid(n, den) {
            if consistent(&p) != member(&p, &vs) {
                return Ok(Some(format!("grid point {p:?}: consistency and membership disagree")));
            }
        }
        Ok(None)
    })();
    fx.verdict(result)
}

fn eui_matches_oracle(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let f = gen::utility(n, rng);
    let fx = Fixture::new(n).tree("tree", &t).value("utility", utility_to_json(&f, &StateSpace::anonymous(n).expect("n")));
    let result = (|| {
        let got = eui(&t, &f)?.interval;
        let vs = world_vertices(&t, n)?;
        let values: Vec<Rational> = vs.vertices().iter().map(|v| f.expectation(v)).collect();
        let lo = values.iter().min().expect("nonempty").clone();
        let hi = values.iter().max().expect("nonempty").clone();
        Ok(require(got.lo == lo && got.hi == hi, || format!("greedy gives {got}, oracle gives [{lo}, {hi}]")))
    })();
    fx.verdict(result)
}

fn eui_monotone(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let t = gen::tree(n, &ctx.gen, false, rng);
    let big = enlarge(&t, n, rng);
    let f = gen::utility(n, rng);
    let fx = Fixture::new(n).tree("tree", &t).tree("enlarged", &big);
    let result = (|| {
        if !subsumes_exact(&big, &t, n)? {
            return Ok(Some("enlarged tree does not subsume original".into()));
        }
        let (outer, inner) = (eui(&big, &f)?.interval, eui(&t, &f)?.interval);
        Ok(require(outer.contains_interval(&inner), || format!("{outer} does not contain {inner}")))
    })();
    fx.verdict(result)
}

fn projection_chain(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let w = gen::tree(n, &ctx.gen, true, rng);
    let action = gen::abstract_action(n, &ctx.gen, rng);
    let fx = Fixture::new(n).tree("world", &w).action("action", &action);
    let result = (|| {
        let second = pr2(&action, &w)?;
        let third = pr3(&action, &w)?;
        if let Some(m) = subsumes(&third, &second, n, "third rule vs second rule")? {
            return Ok(Some(m));
        }
        let vs = world_vertices(&second, n)?;
        let first = pr1(&action, &w)?;
        let samples: Vec<Distribution> = (0..5).map(|_| first.tree().sample_member(n, rng)).collect();
        if let Some(p) = first_outside(&samples, &vs) {
            return Ok(Some(format!("first-rule point {p:?} outside the second-rule world")));
        }
        let image = sampled_action_image(&action, &w, 5, rng)?;
        Ok(first_outside(&image, &vs).map(|p| format!("image point {p:?} outside the second-rule world")))
    })();
    fx.verdict(result)
}

fn pr1_hull_is_pr2(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let w = gen::tree(n, &ctx.gen, true, rng);
    let action = gen::abstract_action(n, &ctx.gen, rng);
    let fx = Fixture::new(n).tree("world", &w).action("action", &action);
    let result = (|| {
        let lifted = pr1(&action, &w)?.hull().standardize()?;
        let second = pr2(&action, &w)?.standardize()?;
        Ok(require(lifted == second, || "hull of the first rule differs from the second rule".into()))
    })();
    fx.verdict(result)
}

fn normalization_preserves_semantics(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let w = gen::tree(n, &GenConfig { max_depth: ctx.gen.max_depth.min(2), ..ctx.gen }, true, rng);
    let action = gen::abstract_action(n, &ctx.gen, rng);
    let lambda = gen::primitive_action(n, &ctx.gen, rng);
    let fx = Fixture::new(n).tree("world", &w).action("action", &action).primitive("primitive", &lambda);
    let result = (|| {
        let norm = action.normalize_conditions();
        for (rule, a, b) in [("second", pr2(&action, &w)?, pr2(&norm, &w)?), ("third", pr3(&action, &w)?, pr3(&norm, &w)?)] {
            if !subsumes_exact(&a, &b, n)? || !subsumes_exact(&b, &a, n)? {
                return Ok(Some(format!("{rule} rule: normalized action projects to a different world")));
            }
        }
        let lambda_norm = lambda.normalize_conditions();
        for s in (0..n).map(StateId) {
            if lambda.apply_state(s)? != lambda_norm.apply_state(s)? {
                return Ok(Some(format!("normalized primitive action differs at {s}")));
            }
        }
        Ok(None)
    })();
    fx.verdict(result)
}

/// Recomputes `λ(P)` straight from the definition.
fn apply_by_definition(lambda: &PrimitiveAction, p: &Distribution) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); lambda.n_states()];
    for b in 0..lambda.n_states() {
        for br in lambda.branches() {
            if br.condition.contains(StateId(b)) {
                out[br.effect.apply(StateId(b)).0] += p.mass(StateId(b)) * &br.prob;
            }
        }
    }
    out
}

fn primitive_sum_rule(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let mut lambda = gen::primitive_action(n, &ctx.gen, rng);
    if rng.gen_bool(0.5) {
        let mut branches = lambda.branches().to_vec();
        let i = rng.gen_range(0..branches.len());
        let delta = ratio(1, 10);
        branches[i].prob = if branches[i].prob >= delta { &branches[i].prob - &delta } else { &branches[i].prob + &delta };
        lambda = PrimitiveAction::new(n, branches);
    }
    let p = Distribution::new(gen::affine_vector(n, rng)).expect("affine");
    let fx = Fixture::new(n).primitive("action", &lambda).dist("p", &p);
    let result = (|| {
        let sums_to_one = (0..n).map(StateId).all(|s| {
            let sum: Rational = lambda.branches().iter().filter(|b| b.condition.contains(s)).map(|b| &b.prob).sum();
            sum.is_one()
        });
        if lambda.validate().is_ok() != sums_to_one {
            return Ok(Some(format!("validation says {}, per-state sums say {sums_to_one}", lambda.validate().is_ok())));
        }
        if sums_to_one {
            let got = lambda.apply_dist(&p)?;
            let expected = apply_by_definition(&lambda, &p);
            if got.masses() != expected.as_slice() {
                return Ok(Some(format!("apply gives {got:?}, definition gives {expected:?}")));
            }
        }
        Ok(None)
    })();
    fx.verdict(result)
}

fn intra_abstraction_sound(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let (action, groups, abstracted) = loop {
        let action = gen::abstract_action(n, &ctx.gen, rng);
        let groups = gen::branch_groups(action.branches().len(), rng);
        if let Ok(out) = intra_abstract(&action, &groups) {
            break (action, groups, out);
        }
    };
    let w = gen::tree(n, &ctx.gen, true, rng);
    let fx = Fixture::new(n).tree("world", &w).action("action", &action).value("groups", json!(groups)).action("abstracted", &abstracted);
    let result = (|| subsumes(&pr2(&abstracted, &w)?, &pr2(&action, &w)?, n, "abstract vs concrete"))();
    fx.verdict(result)
}

fn inter_abstraction_sound(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let base = gen::abstract_action(n, &ctx.gen, rng);
    let count = rng.gen_range(2..=3);
    let actions: Vec<AbstractAction> = (0..count).map(|_| gen::sibling_action(&base, rng)).collect();
    let w = gen::tree(n, &ctx.gen, true, rng);
    let mut fx = Fixture::new(n).tree("world", &w);
    for (i, a) in actions.iter().enumerate() {
        fx = fx.action(&format!("action{i}"), a);
    }
    let result = (|| {
        let abstracted = inter_abstract(&actions)?;
        let sup = pr2(&abstracted, &w)?;
        for (i, a) in actions.iter().enumerate() {
            if let Some(m) = subsumes(&sup, &pr2(a, &w)?, n, &format!("abstract vs action{i}"))? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    })();
    fx.verdict(result)
}

/// A pair whose first-step images never straddle a second-step condition.
fn composable_pair<R: Rng + ?Sized>(n: usize, cfg: &GenConfig, rng: &mut R) -> (AbstractAction, AbstractAction) {
    loop {
        let (first, second) = match rng.gen_range(0..3) {
            0 => (
                gen::abstract_action(n, cfg, rng),
                gen::abstract_action_with(n, cfg, ConditionShape::Unconditional, rng.gen_range(1..=n.min(3)), rng),
            ),
            1 => (
                gen::abstract_action_with(n, cfg, gen::shape(rng), 1, rng),
                gen::abstract_action(n, cfg, rng),
            ),
            _ => (gen::abstract_action(n, cfg, rng), gen::abstract_action(n, cfg, rng)),
        };
        if straddles(&first, &second).is_empty() && seq_abstract(&first, &second).is_ok() {
            return (first, second);
        }
    }
}

fn seq_abstraction_sound(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let (first, second) = composable_pair(n, &ctx.gen, rng);
    let w = small_world(n, &ctx.gen, rng);
    let fx = Fixture::new(n).tree("world", &w).action("first", &first).action("second", &second);
    let result = (|| {
        let composed = seq_abstract(&first, &second)?;
        let chain = pr2(&second, &pr2(&first, &w)?.standardize()?)?;
        subsumes(&pr2(&composed, &w)?, &chain, n, "composed vs two-step chain")
    })();
    fx.verdict(result)
}

fn growth_laws(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Outcome {
    let n = gen::state_count(&ctx.gen, rng);
    let w = gen::tree(n, &ctx.gen, true, rng);
    let branches = rng.gen_range(1..=ctx.gen.max_branches.max(1));
    let k = rng.gen_range(2..=n.min(3));
    let uniform = gen::uniform_image_action(n, branches, k, rng);
    let mixed_world = gen::tree(n, &ctx.gen, false, rng);
    let action = gen::abstract_action(n, &ctx.gen, rng);
    let fx = Fixture::new(n)
        .tree("world", &w)
        .action("uniform_action", &uniform)
        .tree("mixed_world", &mixed_world)
        .action("action", &action);
    let result = (|| {
        let second = pr2(&uniform, &w)?.standardize()?;
        let (d, l) = (w.depth(), w.leaf_count());
        if second.depth() != d + 2 || second.leaf_count() != branches * k * l {
            return Ok(Some(format!(
                "second rule: depth {} leaves {}, expected {} and {}",
                second.depth(),
                second.leaf_count(),
                d + 2,
                branches * k * l
            )));
        }
        let third = pr3(&action, &mixed_world)?;
        let (d, l) = (mixed_world.depth(), mixed_world.leaf_count());
        let bound = action.branches().len() * l;
        Ok(require(third.depth() == d + 1 && third.leaf_count() <= bound, || {
            format!("third rule: depth {} leaves {}, expected {} and at most {bound}", third.depth(), third.leaf_count(), d + 1)
        }))
    })();
    fx.verdict(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let props = properties();
        for (i, p) in props.iter().enumerate() {
            assert!(props[i + 1..].iter().all(|q| q.name != p.name));
        }
    }

    #[test]
    fn zero_cases_is_vacuous() {
        let report = run_property_suite(&SuiteConfig { cases: Some(0), ..SuiteConfig::default() });
        assert!(report.passed);
        assert!(report.properties.iter().all(|p| p.cases == 0));
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid(3, 4).len(), 15);
        assert_eq!(nonempty_subsets(3).len(), 7);
    }
}
