//! Domain files: states, utility, actions, worlds and plans.
//!
//! Several files may be loaded together; later files add actions, worlds
//! and plans to the first and must repeat its state list if they give one.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use affine_core::codec::{
    action_from_json, action_to_json, tree_from_json, tree_to_json, utility_from_json, utility_to_json,
};
use affine_core::{AbstractAction, AffineTree, StateSpace, UtilityFunction};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Debug)]
pub struct Domain {
    pub space: StateSpace,
    pub utility: Option<UtilityFunction>,
    pub actions: BTreeMap<String, AbstractAction>,
    pub worlds: BTreeMap<String, AffineTree>,
    pub plans: BTreeMap<String, Vec<String>>,
}

fn invalid(source: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{source}: {message}"))
}

fn object<'a>(v: &'a Value, source: &str, key: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| invalid(source, format!("{key}: expected an object")))
}

pub fn parse_json(text: &str, source: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Validation(format!("{source}:{}:{}: parse error: {e}", e.line(), e.column()))
    })
}

fn parse_states(v: &Value, source: &str) -> Result<StateSpace, CliError> {
    let names = v
        .as_array()
        .and_then(|items| items.iter().map(|s| s.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
        .ok_or_else(|| invalid(source, "states: expected a list of names"))?;
    StateSpace::new(names).map_err(|e| invalid(source, format!("states: {e}")))
}

/// An action is `{"branches": [...]}` or the bare branch list.
fn action_document(v: &Value) -> Value {
    match v {
        Value::Array(_) => serde_json::json!({ "branches": v }),
        other => other.clone(),
    }
}

impl Domain {
    pub fn empty(space: StateSpace) -> Self {
        Self {
            space,
            utility: None,
            actions: BTreeMap::new(),
            worlds: BTreeMap::new(),
            plans: BTreeMap::new(),
        }
    }

    /// Loads and merges the files in order, then checks references.
    pub fn load_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self, CliError> {
        let mut domain: Option<Domain> = None;
        for path in paths {
            let path = path.as_ref();
            let source = path.display().to_string();
            let text =
                fs::read_to_string(path).map_err(|e| CliError::Input(format!("{source}: cannot read: {e}")))?;
            let doc = parse_json(&text, &source)?;
            domain = Some(Self::merge_document(domain, &doc, &source)?);
        }
        let domain = domain.ok_or_else(|| CliError::Usage("no domain file given".into()))?;
        domain.check_references()?;
        Ok(domain)
    }

    /// Parses one document on its own.
    pub fn from_json(doc: &Value, source: &str) -> Result<Self, CliError> {
        let domain = Self::merge_document(None, doc, source)?;
        domain.check_references()?;
        Ok(domain)
    }

    fn merge_document(base: Option<Domain>, doc: &Value, source: &str) -> Result<Self, CliError> {
        let top = doc.as_object().ok_or_else(|| invalid(source, "expected a JSON object"))?;
        for key in top.keys() {
            if !matches!(key.as_str(), "states" | "utility" | "actions" | "worlds" | "plans") {
                return Err(invalid(source, format!("unknown field {key:?}")));
            }
        }
        let mut domain = match (base, top.get("states")) {
            (None, Some(states)) => Domain::empty(parse_states(states, source)?),
            (None, None) => return Err(invalid(source, "states: missing")),
            (Some(d), Some(states)) => {
                if parse_states(states, source)?.names() != d.space.names() {
                    return Err(invalid(source, "states: differ from the first domain file"));
                }
                d
            }
            (Some(d), None) => d,
        };
        if let Some(u) = top.get("utility") {
            if domain.utility.is_some() {
                return Err(invalid(source, "utility: given more than once"));
            }
            let f = utility_from_json(u, &domain.space, "utility").map_err(|e| invalid(source, e))?;
            domain.utility = Some(f);
        }
        if let Some(v) = top.get("actions") {
            for (name, a) in object(v, source, "actions")? {
                let path = format!("actions.{name}");
                let action =
                    action_from_json(&action_document(a), &domain.space, &path).map_err(|e| invalid(source, e))?;
                insert_new(&mut domain.actions, name, action, source, "action")?;
            }
        }
        if let Some(v) = top.get("worlds") {
            for (name, w) in object(v, source, "worlds")? {
                let path = format!("worlds.{name}");
                let tree = tree_from_json(w, &domain.space, &path).map_err(|e| invalid(source, e))?;
                insert_new(&mut domain.worlds, name, tree, source, "world")?;
            }
        }
        if let Some(v) = top.get("plans") {
            for (name, p) in object(v, source, "plans")? {
                let steps = p
                    .as_array()
                    .and_then(|items| items.iter().map(|s| s.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| invalid(source, format!("plans.{name}: expected a list of action names")))?;
                insert_new(&mut domain.plans, name, steps, source, "plan")?;
            }
        }
        Ok(domain)
    }

    fn check_references(&self) -> Result<(), CliError> {
        for (name, steps) in &self.plans {
            if steps.is_empty() {
                return Err(CliError::Validation(format!("plans.{name}: a plan needs at least one action")));
            }
            for (i, step) in steps.iter().enumerate() {
                if !self.actions.contains_key(step) {
                    return Err(CliError::Validation(format!(
                        "plans.{name}[{i}]: reference: unknown action {step:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn action(&self, name: &str) -> Result<&AbstractAction, CliError> {
        self.actions.get(name).ok_or_else(|| CliError::Validation(format!("reference: unknown action {name:?}")))
    }

    pub fn world(&self, name: &str) -> Result<&AffineTree, CliError> {
        self.worlds.get(name).ok_or_else(|| CliError::Validation(format!("reference: unknown world {name:?}")))
    }

    pub fn plan(&self, name: &str) -> Result<Vec<AbstractAction>, CliError> {
        let steps =
            self.plans.get(name).ok_or_else(|| CliError::Validation(format!("reference: unknown plan {name:?}")))?;
        steps.iter().map(|s| self.action(s).cloned()).collect()
    }

    pub fn utility(&self) -> Result<&UtilityFunction, CliError> {
        self.utility.as_ref().ok_or_else(|| CliError::Validation("utility: missing from the domain".into()))
    }

    /// The canonical document: sorted keys, exact rationals as strings.
    pub fn to_json(&self) -> Value {
        let mut top = Map::new();
        top.insert("states".into(), Value::from(self.space.names().to_vec()));
        if let Some(f) = &self.utility {
            top.insert("utility".into(), utility_to_json(f, &self.space));
        }
        top.insert("actions".into(), actions_to_json(&self.actions, &self.space));
        let worlds = self.worlds.iter().map(|(k, t)| (k.clone(), tree_to_json(t, &self.space))).collect();
        top.insert("worlds".into(), Value::Object(worlds));
        let plans = self.plans.iter().map(|(k, p)| (k.clone(), Value::from(p.clone()))).collect();
        top.insert("plans".into(), Value::Object(plans));
        Value::Object(top)
    }
}

pub fn actions_to_json(actions: &BTreeMap<String, AbstractAction>, space: &StateSpace) -> Value {
    Value::Object(actions.iter().map(|(k, a)| (k.clone(), action_to_json(a, space))).collect())
}

fn insert_new<T>(map: &mut BTreeMap<String, T>, name: &str, value: T, source: &str, kind: &str) -> Result<(), CliError> {
    if map.insert(name.to_string(), value).is_some() {
        return Err(invalid(source, format!("{kind} {name:?} is defined more than once")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({
            "states": ["a", "b"],
            "utility": {"a": 0, "b": "-3/2"},
            "actions": {"go": [{"condition": ["a", "b"], "prob": 1, "effect": {"a": "b"}}]},
            "worlds": {"start": {"state": "a"}},
            "plans": {"p": ["go"]}
        })
    }

    #[test]
    fn loads_a_minimal_domain() {
        let d = Domain::from_json(&minimal(), "t").unwrap();
        assert_eq!(d.space.names(), ["a", "b"]);
        assert_eq!(d.plan("p").unwrap().len(), 1);
    }

    #[test]
    fn unknown_action_in_plan_is_a_reference_error() {
        let mut doc = minimal();
        doc["plans"]["p"] = json!(["go", "fly"]);
        let e = Domain::from_json(&doc, "t").unwrap_err().to_string();
        assert!(e.contains("reference") && e.contains("\"fly\""), "{e}");
    }

    #[test]
    fn sum_rule_error_names_the_state() {
        let mut doc = minimal();
        doc["actions"]["go"] = json!([
            {"condition": ["a", "b"], "prob": "6/10"},
            {"condition": ["a", "b"], "prob": "0.5", "effect": {"a": "b"}}
        ]);
        let e = Domain::from_json(&doc, "t").unwrap_err().to_string();
        assert!(e.contains("sum rule") && e.contains("11/10") && e.contains("\"a\""), "{e}");
    }

    #[test]
    fn parse_errors_carry_a_position() {
        let e = parse_json("{\n  \"states\": [\"a\",\n}", "f.json").unwrap_err().to_string();
        assert!(e.starts_with("f.json:3:1:"), "{e}");
    }

    #[test]
    fn canonical_emission_round_trips() {
        let d = Domain::from_json(&minimal(), "t").unwrap();
        let once = d.to_json();
        let again = Domain::from_json(&once, "t").unwrap().to_json();
        assert_eq!(serde_json::to_string(&once).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn fragments_merge_and_reject_duplicates() {
        let base = minimal();
        let fragment = json!({"actions": {"stay": [{"condition": ["a", "b"], "prob": 1}]}});
        let merged = Domain::merge_document(Some(Domain::from_json(&base, "t").unwrap()), &fragment, "f").unwrap();
        assert!(merged.actions.contains_key("stay"));
        let dup = json!({"actions": {"go": [{"condition": ["a", "b"], "prob": 1}]}});
        assert!(Domain::merge_document(Some(merged), &dup, "f").is_err());
    }
}
