//! Canonical text rendering of a bundle.
//!
//! Output parses back to a structurally equal bundle. Policies are printed
//! without their vacuous principle (parsing re-inserts it one rank above the
//! maximum), annotation entries that are incomparable are omitted, and the
//! world-generation mode is always explicit.

use crate::{ParsedBundle, SpaceDefKind};
use ethica_core::causal::CausalAgencyModel;
use ethica_core::governor::PairPreference;
use ethica_core::verifier::{AtomArg, PropExpr, Quantifier};
use std::fmt::Write;

pub fn serialize(bundle: &ParsedBundle) -> String {
    let mut out = String::new();
    for model in &bundle.models {
        write_model(&mut out, model);
    }
    for policy in &bundle.policies {
        let _ = writeln!(out, "policy {} {{", policy.name());
        for p in policy.non_vacuous() {
            let rank = policy.rank_of(&p.id).unwrap_or(0);
            if p.description.is_empty() {
                let _ = writeln!(out, "  principle {} : {rank};", p.id);
            } else {
                let _ = writeln!(
                    out,
                    "  principle {} : {rank} \"{}\";",
                    p.id,
                    escape(&p.description)
                );
            }
        }
        let _ = writeln!(out, "}}\n");
    }
    for set in &bundle.plan_sets {
        let _ = writeln!(out, "plans {} for {} {{", set.name, set.policy);
        for plan in &set.plans {
            if plan.violations.is_empty() {
                let _ = writeln!(out, "  plan {};", plan.id);
            } else {
                let _ = writeln!(out, "  plan {} violates {};", plan.id, plan.violations.join(", "));
            }
        }
        let _ = writeln!(out, "}}\n");
    }
    for named in &bundle.annotation_sets {
        let ann = &named.annotations;
        let _ = writeln!(out, "annotations {} {{", named.name);
        let _ = writeln!(out, "  tasks {}", ann.n_tasks());
        let _ = writeln!(out, "  laws {}", ann.n_laws());
        for law in 0..ann.n_laws() {
            let entries: Vec<String> = ann
                .explicit_entries()
                .into_iter()
                .filter(|(l, _, _, _)| *l == law)
                .map(|(_, low, high, pref)| match pref {
                    PairPreference::FirstPreferred => format!("t{} < t{}", low + 1, high + 1),
                    _ => format!("t{} < t{}", high + 1, low + 1),
                })
                .collect();
            if !entries.is_empty() {
                let _ = writeln!(out, "  law {}: {};", law + 1, entries.join(", "));
            }
        }
        let _ = writeln!(out, "}}\n");
    }
    for space in &bundle.spaces {
        let _ = write!(out, "space {} {{ ", space.name);
        match &space.kind {
            SpaceDefKind::Backgrounds { model, fixed } => {
                let _ = write!(out, "backgrounds {model}");
                if !fixed.is_empty() {
                    let clauses: Vec<String> =
                        fixed.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    let _ = write!(out, " where {}", clauses.join(", "));
                }
            }
            SpaceDefKind::Annotations { n_tasks, n_laws } => {
                let _ = write!(out, "annotations tasks {n_tasks} laws {n_laws}");
            }
            SpaceDefKind::Availability { plans } => {
                let _ = write!(out, "availability {plans}");
            }
        }
        let _ = writeln!(out, " }}\n");
    }
    for property in &bundle.properties {
        let quantifier = match property.quantifier {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        };
        let _ = writeln!(out, "property {} {{", property.name);
        let _ = writeln!(out, "  {quantifier} scenario:");
        let _ = writeln!(out, "    {}", render_propexpr(&property.condition, 0));
        let _ = writeln!(out, "}}\n");
    }
    for suite in &bundle.suites {
        let _ = writeln!(out, "suite {} {{", suite.name);
        for check in &suite.checks {
            let _ = writeln!(out, "  check {} over {};", check.property, check.space);
        }
        let _ = writeln!(out, "}}\n");
    }
    out
}

fn write_model(out: &mut String, model: &CausalAgencyModel) {
    let _ = writeln!(out, "model {} {{", model.name());
    let _ = writeln!(out, "  actions {}", model.actions().join(", "));
    let background: Vec<String> = model
        .background()
        .into_iter()
        .map(|b| format!("{b} = {}", model.background_values()[b]))
        .collect();
    let _ = writeln!(out, "  background {}", background.join(", "));
    let _ = writeln!(out, "  consequences {}", model.consequences().join(", "));
    let _ = writeln!(out, "  mechanisms");
    for m in model.mechanisms() {
        let _ = writeln!(out, "    {} := {};", m.consequent, m.antecedent);
    }
    let _ = writeln!(out, "  utilities");
    for (name, value) in model.utilities() {
        let _ = writeln!(out, "    {name}: {value};");
    }
    let _ = writeln!(out, "  intentions");
    for (action, consequence) in model.intentions() {
        let _ = writeln!(out, "    {action} -> {consequence};");
    }
    let mode = match model.action_mode() {
        ethica_core::causal::ActionMode::ExactlyOne => "exactly_one",
        ethica_core::causal::ActionMode::PowerSet => "power_set",
    };
    let _ = writeln!(out, "  mode {mode}");
    let _ = writeln!(out, "}}\n");
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Precedence levels: implies 1 (right-assoc), or 2, and 3, not 4.
fn render_propexpr(expr: &PropExpr, min: u8) -> String {
    let (text, prec) = match expr {
        PropExpr::Const(true) => ("true".to_string(), 5),
        PropExpr::Const(false) => ("false".to_string(), 5),
        PropExpr::Atom(atom) => {
            let args: Vec<String> = atom
                .args
                .iter()
                .map(|a| match a {
                    AtomArg::Name(n) => n.clone(),
                    AtomArg::Number(n) => n.to_string(),
                })
                .collect();
            let text = if args.is_empty() {
                atom.head.clone()
            } else {
                format!("{}({})", atom.head, args.join(", "))
            };
            (text, 5)
        }
        PropExpr::Not(inner) => (format!("not {}", render_propexpr(inner, 4)), 4),
        PropExpr::And(a, b) => (
            format!("{} and {}", render_propexpr(a, 3), render_propexpr(b, 4)),
            3,
        ),
        PropExpr::Or(a, b) => (
            format!("{} or {}", render_propexpr(a, 2), render_propexpr(b, 3)),
            2,
        ),
        PropExpr::Implies(a, b) => (
            format!(
                "{} implies {}",
                render_propexpr(a, 2),
                render_propexpr(b, 1)
            ),
            1,
        ),
    };
    if prec < min {
        format!("({text})")
    } else {
        text
    }
}
