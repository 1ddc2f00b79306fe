use std::fmt::Write as _;

use affine_core::abstraction::{inter_abstract, intra_abstract, seq_abstract};
use affine_core::codec::{rational_to_json, tree_to_json};
use affine_core::credal::to_f64;
use affine_core::oracle::{run_property_suite, Selection, SuiteConfig};
use affine_core::{eliminate_dominated, eui, format_rational, project_plan, EuInterval, ProjectionRule};
use serde_json::{json, Value};

use crate::domain::{actions_to_json, Domain};
use crate::error::CliError;
use crate::{AbstractOp, Cli, Command, Format, SuiteArg};

/// Report text and exit code of a command that ran to completion.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn rule_of(n: u8) -> ProjectionRule {
    ProjectionRule::from_number(n).expect("clap restricts the rule number")
}

fn exact(iv: &EuInterval) -> Value {
    json!([rational_to_json(&iv.lo), rational_to_json(&iv.hi)])
}

fn decimal(iv: &EuInterval) -> Value {
    json!([to_f64(&iv.lo), to_f64(&iv.hi)])
}

fn exact_text(iv: &EuInterval) -> String {
    format!("[{}, {}]", format_rational(&iv.lo), format_rational(&iv.hi))
}

fn decimal_text(iv: &EuInterval) -> String {
    format!("[{}, {}]", to_f64(&iv.lo), to_f64(&iv.hi))
}

/// Left-aligned columns separated by two spaces.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn plan_eui(domain: &Domain, plan: &str, world: &str, rule: u8) -> Result<EuInterval, CliError> {
    let projected = project_plan(&domain.plan(plan)?, domain.world(world)?, rule_of(rule))?;
    Ok(eui(&projected.tree, domain.utility()?)?.interval)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate { domain, canonical } => {
            let d = Domain::load_files(&domain.domains)?;
            if *canonical {
                return Ok(Outcome::ok(pretty(&d.to_json())));
            }
            Ok(Outcome::ok(match cli.format {
                Format::Json => pretty(&json!({
                    "valid": true,
                    "states": d.space.names(),
                    "actions": d.actions.keys().collect::<Vec<_>>(),
                    "worlds": d.worlds.keys().collect::<Vec<_>>(),
                    "plans": d.plans.keys().collect::<Vec<_>>(),
                })),
                Format::Table => format!(
                    "ok: {} states, {} actions, {} worlds, {} plans\n",
                    d.space.len(),
                    d.actions.len(),
                    d.worlds.len(),
                    d.plans.len()
                ),
            }))
        }
        Command::Project { domain, plan, world, rule } => {
            let d = Domain::load_files(&domain.domains)?;
            let projected = project_plan(&d.plan(plan)?, d.world(world)?, rule_of(*rule))?;
            let steps = &d.plans[plan.as_str()];
            let tree = tree_to_json(&projected.tree, &d.space);
            Ok(Outcome::ok(match cli.format {
                Format::Json => {
                    let metrics: Vec<Value> = steps
                        .iter()
                        .zip(&projected.steps)
                        .map(|(a, m)| json!({ "action": a, "depth": m.depth, "leaves": m.leaves }))
                        .collect();
                    pretty(&json!({ "plan": plan, "world": world, "rule": rule, "steps": metrics, "tree": tree }))
                }
                Format::Table => {
                    let mut rows = vec![vec!["step".into(), "action".into(), "depth".into(), "leaves".into()]];
                    for (i, (a, m)) in steps.iter().zip(&projected.steps).enumerate() {
                        rows.push(vec![(i + 1).to_string(), a.clone(), m.depth.to_string(), m.leaves.to_string()]);
                    }
                    format!("{}tree: {}\n", table(&rows), serde_json::to_string(&tree).expect("json serializes"))
                }
            }))
        }
        Command::Eui { domain, plan, world, rule } => {
            let d = Domain::load_files(&domain.domains)?;
            let iv = plan_eui(&d, plan, world, *rule)?;
            Ok(Outcome::ok(match cli.format {
                Format::Json => pretty(&json!({
                    "plan": plan,
                    "world": world,
                    "rule": rule,
                    "eui": exact(&iv),
                    "decimal": decimal(&iv),
                })),
                Format::Table => table(&[
                    vec!["plan".into(), "rule".into(), "eui".into(), "decimal".into()],
                    vec![plan.clone(), rule.to_string(), exact_text(&iv), decimal_text(&iv)],
                ]),
            }))
        }
        Command::Eliminate { domain, plans, world, rule } => {
            let d = Domain::load_files(&domain.domains)?;
            let entries = plans
                .iter()
                .map(|p| Ok((p.clone(), plan_eui(&d, p, world, *rule)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let result = eliminate_dominated(&entries);
            let survivors: Vec<&String> = result.survivors.iter().map(|(p, _)| p).collect();
            Ok(Outcome::ok(match cli.format {
                Format::Json => pretty(&json!({
                    "world": world,
                    "rule": rule,
                    "plans": entries
                        .iter()
                        .map(|(p, iv)| json!({ "plan": p, "eui": exact(iv), "decimal": decimal(iv) }))
                        .collect::<Vec<_>>(),
                    "survivors": survivors,
                    "eliminated": result
                        .log
                        .iter()
                        .map(|(loser, winner)| json!({ "plan": loser, "dominated_by": winner }))
                        .collect::<Vec<_>>(),
                })),
                Format::Table => {
                    let mut rows = vec![vec!["plan".into(), "eui".into(), "decimal".into(), "status".into()]];
                    for (p, iv) in &entries {
                        let status = match result.log.iter().find(|(loser, _)| loser == p) {
                            Some((_, winner)) => format!("dominated by {winner}"),
                            None => "survives".into(),
                        };
                        rows.push(vec![p.clone(), exact_text(iv), decimal_text(iv), status]);
                    }
                    table(&rows)
                }
            }))
        }
        Command::Abstract { domain, op, actions, groups, name } => {
            let d = Domain::load_files(&domain.domains)?;
            let operands = actions.iter().map(|a| d.action(a).cloned()).collect::<Result<Vec<_>, _>>()?;
            let built = match op {
                AbstractOp::Bundle => {
                    let [action] = operands.as_slice() else {
                        return Err(CliError::Usage("bundle takes exactly one action".into()));
                    };
                    let n = action.branches().len();
                    let listed = match groups {
                        Some(text) => parse_groups(text)?,
                        None => vec![(0..n).collect()],
                    };
                    intra_abstract(action, &complete_partition(listed, n))?
                }
                AbstractOp::Combine | AbstractOp::Compose if operands.len() < 2 => {
                    return Err(CliError::Usage(format!("{op:?} needs at least two actions").to_lowercase()));
                }
                AbstractOp::Combine => inter_abstract(&operands)?,
                AbstractOp::Compose => {
                    let mut acc = operands[0].clone();
                    for next in &operands[1..] {
                        acc = seq_abstract(&acc, next)?;
                    }
                    acc
                }
            };
            let op_name = format!("{op:?}").to_lowercase();
            let name = name.clone().unwrap_or_else(|| format!("{op_name}_{}", actions.join("_")));
            let fragment = [(name, built)].into_iter().collect();
            Ok(Outcome::ok(pretty(&json!({ "actions": actions_to_json(&fragment, &d.space) }))))
        }
        Command::Check { suite, cases } => {
            let selection = match suite {
                SuiteArg::Lemmas => Selection::Lemmas,
                SuiteArg::Theorems => Selection::Theorems,
                SuiteArg::All => Selection::All,
            };
            let report = run_property_suite(&SuiteConfig {
                seed: cli.seed,
                cases: *cases,
                selection,
                ..SuiteConfig::default()
            });
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Table => {
                    let mut rows = vec![vec!["property".into(), "cases".into(), "failed".into(), "result".into()]];
                    for p in &report.properties {
                        let result = if p.passed { "pass" } else { "FAIL" };
                        rows.push(vec![p.name.clone(), p.cases.to_string(), p.failed.to_string(), result.into()]);
                    }
                    table(&rows)
                }
            };
            Ok(Outcome { text, code: if report.passed { 0 } else { 3 } })
        }
    }
}

/// `"0,1;2,3"` to `[[0, 1], [2, 3]]`.
fn parse_groups(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    text.split(';')
        .map(|group| {
            group
                .split(',')
                .map(|i| i.trim().parse().map_err(|_| CliError::Usage(format!("bad branch index {i:?} in --groups"))))
                .collect()
        })
        .collect()
}

/// Adds a singleton group for every branch not listed, ordering groups by
/// their first branch.
fn complete_partition(mut groups: Vec<Vec<usize>>, n: usize) -> Vec<Vec<usize>> {
    let listed: Vec<usize> = groups.iter().flatten().copied().collect();
    groups.extend((0..n).filter(|i| !listed.contains(i)).map(|i| vec![i]));
    groups.sort_by_key(|g| g.iter().min().copied());
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_parse_and_complete() {
        assert_eq!(parse_groups("0,1;3").unwrap(), vec![vec![0, 1], vec![3]]);
        assert!(parse_groups("0,x").is_err());
        assert_eq!(complete_partition(vec![vec![1, 3]], 4), vec![vec![0], vec![1, 3], vec![2]]);
    }

    #[test]
    fn table_aligns_columns() {
        let t = table(&[vec!["a".into(), "bb".into()], vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }
}
