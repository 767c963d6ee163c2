//! Text rendering with optional ANSI styling.
//!
//! Colour is controlled by the `ETHICA_COLOR` environment variable
//! (`always`/`1`, `never`/`0`, anything else means "when stdout is a
//! terminal") and affects styling only, never content.

use ethica_core::pde::{ConditionWitness, PermissibilityVerdict};
use ethica_core::policy::{PlanSelection, RejectionReason};
use ethica_core::governor::{TaskRejection, TaskSelection};
use ethica_core::causal::{CausalAgencyModel, World};
use ethica_core::verifier::{Outcome, ScenarioData, ScenarioTrace, VerificationReport};
use std::io::IsTerminal;

pub fn color_enabled() -> bool {
    match std::env::var("ETHICA_COLOR").ok().as_deref() {
        Some("always") | Some("1") => true,
        Some("never") | Some("0") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

fn paint(text: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn good(text: &str) -> String {
    paint(text, "32")
}

pub fn bad(text: &str) -> String {
    paint(text, "31")
}

pub fn bold(text: &str) -> String {
    paint(text, "1")
}

fn condition_label(index: u8) -> &'static str {
    match index {
        1 => "the action itself is not harmful",
        2 => "no harmful intended consequence",
        3 => "some acceptable intended consequence",
        4 => "no harmful causal means",
        _ => "net utility positive",
    }
}

fn render_witness(w: &ConditionWitness) -> String {
    match w {
        ConditionWitness::Utility { variable, utility } => format!("{variable} (u = {utility})"),
        ConditionWitness::CausalMeans {
            cause,
            cause_utility,
            effect,
            effect_utility,
            ..
        } => format!("{cause} \u{21dd} {effect} (u({cause}) = {cause_utility}, u({effect}) = {effect_utility})"),
        ConditionWitness::UtilitySum { sum, contributions } => {
            let parts: Vec<String> = contributions
                .iter()
                .map(|(name, utility)| format!("{name}: {utility}"))
                .collect();
            if parts.is_empty() {
                format!("sum = {sum} (no true consequences)")
            } else {
                format!("sum = {sum} ({})", parts.join(", "))
            }
        }
    }
}

pub fn world_actions(model: &CausalAgencyModel, world: &World) -> String {
    let trues: Vec<&str> = model
        .actions()
        .into_iter()
        .filter(|a| world.value(a) == Some(true))
        .collect();
    if trues.is_empty() {
        "{no actions}".to_string()
    } else {
        format!("{{{}}}", trues.join(", "))
    }
}

pub fn render_verdict(model: &CausalAgencyModel, verdict: &PermissibilityVerdict) -> String {
    let mut out = String::new();
    let headline = if verdict.permissible {
        good("PERMISSIBLE")
    } else {
        bad("IMPERMISSIBLE")
    };
    out.push_str(&format!(
        "world {}: {headline}\n",
        world_actions(model, &verdict.world)
    ));
    for (action, results) in &verdict.per_action {
        out.push_str(&format!("  {action}:\n"));
        for result in results {
            out.push_str(&render_condition_line(result, 4));
        }
    }
    for result in &verdict.world_conditions {
        out.push_str(&render_condition_line(result, 2));
    }
    if verdict.world_conditions[1].passed {
        out.push_str(&format!("  net utility: {}\n", verdict.utility_sum));
    }
    out
}

fn render_condition_line(result: &ethica_core::pde::ConditionResult, indent: usize) -> String {
    let pad = " ".repeat(indent);
    let status = if result.passed {
        good("pass")
    } else {
        bad("FAIL")
    };
    let mut line = format!(
        "{pad}condition {} ({}): {status}",
        result.index,
        condition_label(result.index)
    );
    if !result.witnesses.is_empty() {
        let parts: Vec<String> = result.witnesses.iter().map(render_witness).collect();
        line.push_str(&format!(" \u{2014} {}", parts.join("; ")));
    }
    line.push('\n');
    line
}

pub fn render_plan_selection(selection: &PlanSelection) -> String {
    let mut out = format!("selected: {}\n", bold(&selection.selected.id));
    if selection.selected.violations.is_empty() {
        out.push_str("  violations: none\n");
    } else {
        out.push_str(&format!(
            "  violations: {}\n",
            selection.selected.violations.join(", ")
        ));
    }
    for rejected in &selection.rejected {
        let reason = match &rejected.reason {
            RejectionReason::LostAtRank { rank } => {
                format!("more violations at severity rank {rank}")
            }
            RejectionReason::TieBreak => "tied, later in the candidate list".to_string(),
        };
        out.push_str(&format!("  rejected {}: {reason}\n", rejected.id));
    }
    out
}

pub fn render_task_selection(selection: &TaskSelection) -> String {
    let mut out = format!("selected: {}\n", bold(&format!("t{}", selection.selected + 1)));
    if selection.cycle {
        out.push_str(&format!(
            "  {}: no undominated task; fell back to the least-beaten one\n",
            bad("preference cycle")
        ));
    }
    for rejected in &selection.trace {
        let reason = match rejected.rejection {
            TaskRejection::BeatenAtLaw { law } => format!("beaten at law {}", law + 1),
            TaskRejection::TieBreak => "tied, higher index".to_string(),
        };
        out.push_str(&format!("  rejected t{}: {reason}\n", rejected.task + 1));
    }
    out
}

pub fn render_scenario(data: &ScenarioData) -> String {
    match data {
        ScenarioData::Backgrounds { assignment } => {
            let parts: Vec<String> = assignment
                .iter()
                .map(|(name, value)| format!("{name} = {value}"))
                .collect();
            format!("background {{{}}}", parts.join(", "))
        }
        ScenarioData::Annotations { annotations } => {
            let entries: Vec<String> = annotations
                .explicit_entries()
                .into_iter()
                .map(|(law, low, high, pref)| {
                    let (winner, loser) = match pref {
                        ethica_core::governor::PairPreference::FirstPreferred => (low, high),
                        _ => (high, low),
                    };
                    format!("law {}: t{} < t{}", law + 1, winner + 1, loser + 1)
                })
                .collect();
            if entries.is_empty() {
                "annotations {all incomparable}".to_string()
            } else {
                format!("annotations {{{}}}", entries.join("; "))
            }
        }
        ScenarioData::Availability { available } => {
            format!("available {{{}}}", available.join(", "))
        }
    }
}

fn render_trace(trace: &ScenarioTrace, model: Option<&CausalAgencyModel>) -> String {
    match trace {
        ScenarioTrace::Pde { verdicts } => {
            let parts: Vec<String> = verdicts
                .iter()
                .map(|v| {
                    let actions = match model {
                        Some(m) => world_actions(m, &v.world),
                        None => "{…}".to_string(),
                    };
                    format!(
                        "{actions} {}",
                        if v.permissible { "permissible" } else { "impermissible" }
                    )
                })
                .collect();
            format!("worlds: {}", parts.join("; "))
        }
        ScenarioTrace::Governor { selection } => format!(
            "selected t{}{}",
            selection.selected + 1,
            if selection.cycle { " (cycle)" } else { "" }
        ),
        ScenarioTrace::Plans { selection } => format!("selected {}", selection.selected.id),
    }
}

pub fn render_report(report: &VerificationReport, model: Option<&CausalAgencyModel>) -> String {
    let outcome = match report.outcome {
        Outcome::Holds => good("HOLDS"),
        Outcome::Fails => bad("FAILS"),
    };
    let mut out = format!(
        "property {} over {}: {outcome} ({} of {} scenarios checked, {} finding{}, {:.3}s)\n",
        bold(&report.property),
        report.space,
        report.scenarios_checked,
        report.space_size,
        report.findings,
        if report.findings == 1 { "" } else { "s" },
        report.elapsed.as_secs_f64()
    );
    let label = match report.outcome {
        Outcome::Holds => "witness",
        Outcome::Fails => "counterexample",
    };
    for evidence in &report.evidence {
        out.push_str(&format!(
            "  {label} #{}: {} \u{2014} {}\n",
            evidence.scenario.index,
            render_scenario(&evidence.scenario.data),
            render_trace(&evidence.trace, model),
        ));
    }
    out
}
