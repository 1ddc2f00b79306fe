//! JSON encoding of trees, actions and utilities over a named state space.
//!
//! Rationals are written as `"p/q"` strings (integers as `"p"`) and read
//! from JSON numbers or strings without rounding. Object keys come out in
//! sorted order, so emission is canonical.

use serde_json::{json, Map, Value};

use crate::action::{AbstractAction, AbstractBranch, AbstractEffect};
use crate::credal::{format_rational, parse_rational, Distribution, Interval, Rational, StateSpace, StateSet, UtilityFunction};
use crate::error::{Error, Result};
use crate::tree::{AffineTree, Branch, IntervalMassAssignment, MassAssignment};

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::Decode { path: path.to_string(), message: message.into() })
}

fn at(path: &str, key: impl std::fmt::Display) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return fail(path, "expected a number or a rational string"),
    };
    parse_rational(&text).or_else(|e| fail(path, e.to_string()))
}

pub fn interval_to_json(q: &Interval) -> Value {
    json!([rational_to_json(q.lo()), rational_to_json(q.hi())])
}

/// `[lo, hi]`, or a single number for a point interval.
pub fn interval_from_json(v: &Value, path: &str) -> Result<Interval> {
    let (lo, hi) = match v {
        Value::Array(items) if items.len() == 2 => {
            (rational_from_json(&items[0], &index(path, 0))?, rational_from_json(&items[1], &index(path, 1))?)
        }
        Value::Array(_) => return fail(path, "an interval needs exactly two bounds"),
        other => {
            let q = rational_from_json(other, path)?;
            (q.clone(), q)
        }
    };
    Interval::new(lo, hi).or_else(|e| fail(path, e.to_string()))
}

pub fn state_from_json(v: &Value, space: &StateSpace, path: &str) -> Result<crate::credal::StateId> {
    let Value::String(name) = v else {
        return fail(path, "expected a state name");
    };
    match space.id(name) {
        Some(s) => Ok(s),
        None => fail(path, format!("unknown state {name:?}")),
    }
}

pub fn set_to_json(b: &StateSet, space: &StateSpace) -> Value {
    Value::Array(b.iter().map(|s| Value::String(space.name(s).to_string())).collect())
}

/// A nonempty list of state names.
pub fn set_from_json(v: &Value, space: &StateSpace, path: &str) -> Result<StateSet> {
    let Value::Array(items) = v else {
        return fail(path, "expected a list of state names");
    };
    let mut out = StateSet::new();
    for (i, item) in items.iter().enumerate() {
        out.insert(state_from_json(item, space, &index(path, i))?);
    }
    if out.is_empty() {
        return fail(path, "state set must be nonempty");
    }
    Ok(out)
}

fn expect_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().map_or_else(|| fail(path, "expected an object"), Ok)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).map_or_else(|| fail(path, format!("missing field {key:?}")), Ok)
}

fn single_key<'a>(v: &'a Value, path: &str) -> Result<(&'a str, &'a Value)> {
    let obj = expect_object(v, path)?;
    if obj.len() != 1 {
        return fail(path, "a tree node has exactly one key");
    }
    let (k, v) = obj.iter().next().expect("one entry");
    Ok((k.as_str(), v))
}

pub fn tree_to_json(t: &AffineTree, space: &StateSpace) -> Value {
    match t {
        AffineTree::State(s) => json!({ "state": space.name(*s) }),
        AffineTree::Set(b) => json!({ "ch": set_to_json(b, space) }),
        AffineTree::Finite(b) => json!({ "finite": set_to_json(b, space) }),
        AffineTree::Star(bs) => json!({
            "star": bs
                .iter()
                .map(|b| json!({ "interval": interval_to_json(&b.weight), "child": tree_to_json(&b.child, space) }))
                .collect::<Vec<_>>()
        }),
    }
}

fn focal_list(v: &Value, space: &StateSpace, path: &str) -> Result<Vec<(StateSet, Value)>> {
    let Value::Array(items) = v else {
        return fail(path, "expected a list of {\"focal\", \"mass\"} objects");
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let p = index(path, i);
            let obj = expect_object(item, &p)?;
            let focal = set_from_json(field(obj, "focal", &p)?, space, &at(&p, "focal"))?;
            Ok((focal, field(obj, "mass", &p)?.clone()))
        })
        .collect()
}

/// Decodes a tree, expanding the `dist`, `belief` and `ima` forms. The
/// result is validated.
pub fn tree_from_json(v: &Value, space: &StateSpace, path: &str) -> Result<AffineTree> {
    let t = decode_tree(v, space, path)?;
    t.validate_over(space.len()).into_result().or_else(|e| fail(path, e.to_string()))?;
    Ok(t)
}

fn decode_tree(v: &Value, space: &StateSpace, path: &str) -> Result<AffineTree> {
    let (key, body) = single_key(v, path)?;
    let p = at(path, key);
    match key {
        "state" => Ok(AffineTree::State(state_from_json(body, space, &p)?)),
        "ch" => Ok(AffineTree::Set(set_from_json(body, space, &p)?)),
        "finite" => Ok(AffineTree::Finite(set_from_json(body, space, &p)?)),
        "star" => {
            let Value::Array(items) = body else {
                return fail(&p, "expected a list of branches");
            };
            let branches = items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let bp = index(&p, i);
                    let obj = expect_object(item, &bp)?;
                    let weight = interval_from_json(field(obj, "interval", &bp)?, &at(&bp, "interval"))?;
                    let child = decode_tree(field(obj, "child", &bp)?, space, &at(&bp, "child"))?;
                    Ok(Branch::new(weight, child))
                })
                .collect::<Result<_>>()?;
            Ok(AffineTree::Star(branches))
        }
        "dist" => {
            let obj = expect_object(body, &p)?;
            let mut mass = vec![Rational::from_integer(0.into()); space.len()];
            for (name, m) in obj {
                let s = state_from_json(&Value::String(name.clone()), space, &p)?;
                mass[s.0] = rational_from_json(m, &at(&p, name))?;
            }
            let d = Distribution::new(mass).or_else(|e| fail(&p, e.to_string()))?;
            Ok(AffineTree::from_distribution(&d))
        }
        "belief" => {
            let focals = focal_list(body, space, &p)?
                .into_iter()
                .enumerate()
                .map(|(i, (b, m))| Ok((b, rational_from_json(&m, &at(&index(&p, i), "mass"))?)))
                .collect::<Result<_>>()?;
            let m = MassAssignment::new(focals).or_else(|e| fail(&p, e.to_string()))?;
            Ok(AffineTree::from_belief(&m))
        }
        "ima" => {
            let focals = focal_list(body, space, &p)?
                .into_iter()
                .enumerate()
                .map(|(i, (b, m))| Ok((b, interval_from_json(&m, &at(&index(&p, i), "mass"))?)))
                .collect::<Result<_>>()?;
            let m = IntervalMassAssignment::new(focals).or_else(|e| fail(&p, e.to_string()))?;
            Ok(AffineTree::from_ima(&m))
        }
        other => fail(path, format!("unknown tree node {other:?}")),
    }
}

/// Point probabilities as scalars and singleton images as plain names;
/// identity entries of an effect are kept so the document is explicit.
pub fn action_to_json(action: &AbstractAction, space: &StateSpace) -> Value {
    let branches: Vec<Value> = action
        .branches()
        .iter()
        .map(|b| {
            let prob =
                if b.prob.is_point() { rational_to_json(b.prob.lo()) } else { interval_to_json(&b.prob) };
            let mut effect = Map::new();
            for s in space.ids() {
                let img = b.effect.image(s);
                let v = if img.len() == 1 {
                    Value::String(space.name(img.first().expect("nonempty")).to_string())
                } else {
                    set_to_json(img, space)
                };
                effect.insert(space.name(s).to_string(), v);
            }
            json!({ "condition": set_to_json(&b.condition, space), "prob": prob, "effect": effect })
        })
        .collect();
    json!({ "branches": branches })
}

/// Decodes and validates an action. States missing from an effect map to
/// themselves.
pub fn action_from_json(v: &Value, space: &StateSpace, path: &str) -> Result<AbstractAction> {
    let obj = expect_object(v, path)?;
    let bp = at(path, "branches");
    let Value::Array(items) = field(obj, "branches", path)? else {
        return fail(&bp, "expected a list of branches");
    };
    let mut branches = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let p = index(&bp, i);
        let b = expect_object(item, &p)?;
        let condition = set_from_json(field(b, "condition", &p)?, space, &at(&p, "condition"))?;
        let prob = interval_from_json(field(b, "prob", &p)?, &at(&p, "prob"))?;
        let mut images: Vec<StateSet> = space.ids().map(StateSet::singleton).collect();
        if let Some(e) = b.get("effect") {
            let ep = at(&p, "effect");
            for (name, target) in expect_object(e, &ep)? {
                let s = state_from_json(&Value::String(name.clone()), space, &ep)?;
                let tp = at(&ep, name);
                images[s.0] = match target {
                    Value::Array(_) => set_from_json(target, space, &tp)?,
                    other => StateSet::singleton(state_from_json(other, space, &tp)?),
                };
            }
        }
        branches.push(AbstractBranch::new(condition, prob, AbstractEffect::new(images)));
    }
    let action = AbstractAction::new(space.len(), branches);
    let report = match action.as_primitive() {
        Some(primitive) => primitive.validate(),
        None => action.validate(),
    };
    if !report.is_ok() {
        return fail(path, report.describe(&|s| format!("{:?}", space.name(s))));
    }
    Ok(action)
}

pub fn utility_to_json(f: &UtilityFunction, space: &StateSpace) -> Value {
    Value::Object(space.ids().map(|s| (space.name(s).to_string(), rational_to_json(f.value(s)))).collect())
}

/// Every state needs a value.
pub fn utility_from_json(v: &Value, space: &StateSpace, path: &str) -> Result<UtilityFunction> {
    let obj = expect_object(v, path)?;
    let mut values = vec![None; space.len()];
    for (name, q) in obj {
        let s = state_from_json(&Value::String(name.clone()), space, path)?;
        values[s.0] = Some(rational_from_json(q, &at(path, name))?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, q)| q.map_or_else(|| fail(path, format!("no utility for state {:?}", space.names()[i])), Ok))
        .collect::<Result<_>>()?;
    Ok(UtilityFunction::new(values))
}

pub fn distribution_to_json(p: &Distribution, space: &StateSpace) -> Value {
    Value::Object(space.ids().map(|s| (space.name(s).to_string(), rational_to_json(p.mass(s)))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal::{ratio, StateId};
    use crate::oracle::gen::{self, GenConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn abc() -> StateSpace {
        StateSpace::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn numbers_are_read_exactly() {
        let v: Value = serde_json::from_str(r#"[0.1, "3/10", 2, "-1.5"]"#).unwrap();
        let got: Vec<Rational> = v.as_array().unwrap().iter().map(|x| rational_from_json(x, "x").unwrap()).collect();
        assert_eq!(got, vec![ratio(1, 10), ratio(3, 10), ratio(2, 1), ratio(-3, 2)]);
        assert!(rational_from_json(&json!(true), "x").is_err());
    }

    #[test]
    fn tree_round_trip() {
        let space = abc();
        let v: Value = serde_json::from_str(
            r#"{"star": [{"interval": ["3/5", 0.8], "child": {"ch": ["b", "c"]}},
                         {"interval": [0.2, 0.4], "child": {"state": "a"}}]}"#,
        )
        .unwrap();
        let t = tree_from_json(&v, &space, "world").unwrap();
        let again = tree_from_json(&tree_to_json(&t, &space), &space, "world").unwrap();
        assert_eq!(t, again);
        assert_eq!(
            tree_to_json(&t, &space).to_string(),
            r#"{"star":[{"child":{"ch":["b","c"]},"interval":["3/5","4/5"]},{"child":{"state":"a"},"interval":["1/5","2/5"]}]}"#
        );
    }

    #[test]
    fn tree_sugar_expands() {
        let space = abc();
        let dist = tree_from_json(&json!({"dist": {"a": 0.5, "c": "1/2"}}), &space, "w").unwrap();
        assert_eq!(dist.leaf_count(), 2);
        let belief = tree_from_json(
            &json!({"belief": [{"focal": ["a"], "mass": 0.5}, {"focal": ["b", "c"], "mass": 0.5}]}),
            &space,
            "w",
        )
        .unwrap();
        assert_eq!(belief.branches().unwrap()[1].child, AffineTree::set([StateId(1), StateId(2)]));
        let ima = tree_from_json(
            &json!({"ima": [{"focal": ["a"], "mass": [0.2, 0.6]}, {"focal": ["b"], "mass": [0.4, 0.8]}]}),
            &space,
            "w",
        )
        .unwrap();
        assert_eq!(ima.branches().unwrap().len(), 2);
    }

    #[test]
    fn decode_errors_name_the_path() {
        let space = abc();
        let bad = json!({"star": [{"interval": [0.2, 0.4], "child": {"state": "z"}}]});
        let err = tree_from_json(&bad, &space, "worlds.w").unwrap_err().to_string();
        assert!(err.starts_with("worlds.w.star[0].child.state"), "{err}");
        let infeasible = json!({"star": [{"interval": [0.2, 0.4], "child": {"state": "a"}}]});
        assert!(tree_from_json(&infeasible, &space, "w").is_err());
    }

    #[test]
    fn action_round_trip_and_validation() {
        let space = abc();
        let v = json!({"branches": [
            {"condition": ["a", "b", "c"], "prob": [0.6, 0.8], "effect": {"a": "b", "b": ["b", "c"], "c": "c"}},
            {"condition": ["a", "b", "c"], "prob": [0.2, 0.4]}
        ]});
        let action = action_from_json(&v, &space, "actions.x").unwrap();
        assert_eq!(action.branches()[1].effect, AbstractEffect::identity(3));
        let again = action_from_json(&action_to_json(&action, &space), &space, "actions.x").unwrap();
        assert_eq!(action, again);

        let over = json!({"branches": [
            {"condition": ["a", "b", "c"], "prob": 0.7, "effect": {"b": "a", "c": "a"}},
            {"condition": ["a", "b", "c"], "prob": 0.4}
        ]});
        let err = action_from_json(&over, &space, "actions.bad").unwrap_err().to_string();
        assert!(err.contains("sum to 11/10"), "{err}");
    }

    #[test]
    fn random_fixtures_round_trip() {
        let cfg = GenConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let n = gen::state_count(&cfg, &mut rng);
            let space = StateSpace::anonymous(n).unwrap();
            let t = gen::tree(n, &cfg, false, &mut rng);
            assert_eq!(tree_from_json(&tree_to_json(&t, &space), &space, "t").unwrap(), t);
            let a = gen::abstract_action(n, &cfg, &mut rng);
            assert_eq!(action_from_json(&action_to_json(&a, &space), &space, "a").unwrap(), a);
            let f = gen::utility(n, &mut rng);
            assert_eq!(utility_from_json(&utility_to_json(&f, &space), &space, "f").unwrap(), f);
        }
    }
}
