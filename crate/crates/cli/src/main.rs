//! Command-line front end.
//!
//! Exit status: 0 when the command's question is answered positively (a
//! permissible world exists, every property holds, a selection was made),
//! 1 when it is answered negatively (no permissible world, some property
//! fails), 2 on usage, parse or reference errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ethica_core::causal::{ActionMode, CausalAgencyModel};
use ethica_core::pde;
use ethica_core::governor::select_task;
use ethica_core::policy::select_plan;
use ethica_core::verifier::{self, CheckOptions, StandardEvaluator};
use ethica_lang::{parse_many, ParsedBundle, SourceDocument};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

mod render;

#[derive(Parser)]
#[command(
    name = "ethica",
    version,
    about = "Causal-agency ethical reasoning: permissibility checking, plan selection, governor ordering, and exhaustive scenario verification"
)]
struct Cli {
    /// Input documents; may be given multiple times
    #[arg(short = 'f', long = "file", global = true, value_name = "PATH")]
    files: Vec<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Cap on reported counterexamples per property
    #[arg(long, global = true, default_value_t = 10, value_name = "N")]
    max_counterexamples: usize,

    /// Worker threads for exhaustive checks
    #[arg(long, global = true, default_value_t = 1, value_name = "N",
          value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,

    /// Override model data: u.<var>=<number>, background.<var>=<bool>,
    /// mode=<exactly_one|power_set>; may be given multiple times
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse documents and report diagnostics
    Validate {
        /// Documents to validate (in addition to --file)
        documents: Vec<PathBuf>,
    },
    /// Check permissibility of every candidate world of a model
    Check {
        /// Model name
        model: String,
    },
    /// Select the least-unethical plan of a plan set
    Select {
        /// Policy name (must match the plan set's policy)
        policy: String,
        /// Plan set name
        plans: String,
    },
    /// Order candidate tasks by a prioritised rule code
    Govern {
        /// Annotation set name
        annotations: String,
    },
    /// Run a verification suite
    Verify {
        /// Suite name
        suite: String,
    },
    /// Explain whether `cause` is a but-for cause of `effect` in a world
    Explain {
        /// Model name
        model: String,
        /// World as name=bool pairs over all actions and background
        /// variables, e.g. "turn_lights_on=true,fire=true"
        world: String,
        cause: String,
        effect: String,
    },
}

#[derive(Serialize)]
struct Envelope {
    tool_version: &'static str,
    command: &'static str,
    reports: Vec<serde_json::Value>,
}

fn emit(format: Format, command: &'static str, reports: Vec<serde_json::Value>, text: String) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => {
            let envelope = Envelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                command,
                reports,
            };
            println!("{}", serde_json::to_string_pretty(&envelope).unwrap());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}

fn load_bundle(files: &[PathBuf]) -> Result<ParsedBundle> {
    if files.is_empty() {
        bail!("no input documents; pass them with --file");
    }
    let mut documents = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        documents.push(SourceDocument::new(path.display().to_string(), text));
    }
    parse_many(&documents).map_err(|diagnostics| {
        for d in &diagnostics {
            eprintln!("{d}");
        }
        anyhow!(
            "{} diagnostic{} in the input documents",
            diagnostics.len(),
            if diagnostics.len() == 1 { "" } else { "s" }
        )
    })
}

enum Override {
    Utility(String, f64),
    Background(String, bool),
    Mode(ActionMode),
}

fn parse_overrides(raw: &[String]) -> Result<Vec<Override>> {
    let mut overrides = Vec::new();
    for entry in raw {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got '{entry}'"))?;
        let parsed = if let Some(variable) = key.strip_prefix("u.") {
            let utility: f64 = value
                .parse()
                .map_err(|_| anyhow!("'{value}' is not a number in '{entry}'"))?;
            Override::Utility(variable.to_string(), utility)
        } else if let Some(variable) = key.strip_prefix("background.") {
            let flag: bool = value
                .parse()
                .map_err(|_| anyhow!("'{value}' is not a bool in '{entry}'"))?;
            Override::Background(variable.to_string(), flag)
        } else if key == "mode" {
            match value {
                "exactly_one" => Override::Mode(ActionMode::ExactlyOne),
                "power_set" => Override::Mode(ActionMode::PowerSet),
                other => bail!("unknown mode '{other}' in '{entry}'"),
            }
        } else {
            bail!("unknown --set key '{key}' (use u.<var>, background.<var> or mode)");
        };
        overrides.push(parsed);
    }
    Ok(overrides)
}

/// Applies overrides to a copy of the model and returns it with the
/// effective background assignment.
fn apply_overrides(
    model: &CausalAgencyModel,
    overrides: &[Override],
) -> Result<(CausalAgencyModel, BTreeMap<String, bool>)> {
    let mut model = model.clone();
    let mut background: BTreeMap<String, bool> = model.background_values().clone();
    for entry in overrides {
        match entry {
            Override::Utility(variable, utility) => {
                if model.kind_of(variable).is_none() {
                    bail!("--set names unknown variable '{variable}'");
                }
                model.set_utility(variable.clone(), *utility);
            }
            Override::Background(variable, value) => {
                if !model.background().contains(&variable.as_str()) {
                    bail!("--set names unknown background variable '{variable}'");
                }
                background.insert(variable.clone(), *value);
            }
            Override::Mode(mode) => model.set_action_mode(*mode),
        }
    }
    Ok((model, background))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let overrides = parse_overrides(&cli.set)?;
    if !overrides.is_empty()
        && !matches!(cli.command, Command::Check { .. } | Command::Explain { .. })
    {
        bail!("--set only applies to the check and explain commands");
    }
    let options = CheckOptions {
        max_evidence: cli.max_counterexamples,
        workers: cli.workers as usize,
    };

    match &cli.command {
        Command::Validate { documents } => {
            let mut all = cli.files.clone();
            all.extend(documents.clone());
            let bundle = load_bundle(&all)?;
            let summary = format!(
                "ok: {} model(s), {} policy(ies), {} plan set(s), {} annotation set(s), {} space(s), {} property(ies), {} suite(s)\n",
                bundle.models.len(),
                bundle.policies.len(),
                bundle.plan_sets.len(),
                bundle.annotation_sets.len(),
                bundle.spaces.len(),
                bundle.properties.len(),
                bundle.suites.len()
            );
            emit(
                cli.format,
                "validate",
                vec![serde_json::json!({
                    "models": bundle.models.len(),
                    "policies": bundle.policies.len(),
                    "plan_sets": bundle.plan_sets.len(),
                    "annotation_sets": bundle.annotation_sets.len(),
                    "spaces": bundle.spaces.len(),
                    "properties": bundle.properties.len(),
                    "suites": bundle.suites.len(),
                })],
                summary,
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Check { model } => {
            let bundle = load_bundle(&cli.files)?;
            let base = bundle
                .model(model)
                .ok_or_else(|| anyhow!("unknown model '{model}'"))?;
            let (model, background) = apply_overrides(base, &overrides)?;
            let verdicts = pde::permissible_worlds(&model, &background)?;
            let mut text = String::new();
            for verdict in &verdicts {
                text.push_str(&render::render_verdict(&model, verdict));
            }
            let permissible = verdicts.iter().filter(|v| v.permissible).count();
            text.push_str(&format!(
                "{permissible} of {} worlds permissible\n",
                verdicts.len()
            ));
            let reports = verdicts
                .iter()
                .map(|v| serde_json::to_value(v).unwrap())
                .collect();
            emit(cli.format, "check", reports, text);
            Ok(if permissible > 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Select { policy, plans } => {
            let bundle = load_bundle(&cli.files)?;
            let policy_ref = bundle
                .policy(policy)
                .ok_or_else(|| anyhow!("unknown policy '{policy}'"))?;
            let set = bundle
                .plan_set(plans)
                .ok_or_else(|| anyhow!("unknown plan set '{plans}'"))?;
            if set.policy != *policy {
                bail!("plan set '{plans}' is for policy '{}', not '{policy}'", set.policy);
            }
            let selection = select_plan(policy_ref, &set.plans)?;
            let text = render::render_plan_selection(&selection);
            emit(
                cli.format,
                "select",
                vec![serde_json::to_value(&selection).unwrap()],
                text,
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Govern { annotations } => {
            let bundle = load_bundle(&cli.files)?;
            let named = bundle
                .annotation_set(annotations)
                .ok_or_else(|| anyhow!("unknown annotation set '{annotations}'"))?;
            let selection = select_task(&named.annotations)?;
            let text = render::render_task_selection(&selection);
            emit(
                cli.format,
                "govern",
                vec![serde_json::to_value(&selection).unwrap()],
                text,
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { suite } => {
            let bundle = load_bundle(&cli.files)?;
            let suite_def = bundle
                .suite(suite)
                .ok_or_else(|| anyhow!("unknown suite '{suite}'"))?;
            let spaces: Vec<_> = suite_def
                .checks
                .iter()
                .map(|check| {
                    bundle
                        .resolve_space(&check.space)
                        .ok_or_else(|| anyhow!("unknown space '{}'", check.space))
                })
                .collect::<Result<_>>()?;
            let pairs: Vec<(&verifier::ScenarioSpace, &verifier::PropertySpec)> = suite_def
                .checks
                .iter()
                .zip(&spaces)
                .map(|(check, space)| {
                    bundle
                        .property(&check.property)
                        .map(|property| (space, property))
                        .ok_or_else(|| anyhow!("unknown property '{}'", check.property))
                })
                .collect::<Result<_>>()?;
            let reports = verifier::verify_suite(&pairs, &StandardEvaluator, &options)?;

            let mut text = String::new();
            for (report, (space, _)) in reports.iter().zip(&pairs) {
                let model = match &space.kind {
                    verifier::SpaceKind::Backgrounds { model, .. } => Some(model),
                    _ => None,
                };
                text.push_str(&render::render_report(report, model));
            }
            let all_hold = reports.iter().all(|r| r.holds());
            let reports = reports
                .iter()
                .map(|r| serde_json::to_value(r).unwrap())
                .collect();
            emit(cli.format, "verify", reports, text);
            Ok(if all_hold {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Explain {
            model,
            world,
            cause,
            effect,
        } => {
            let bundle = load_bundle(&cli.files)?;
            let base = bundle
                .model(model)
                .ok_or_else(|| anyhow!("unknown model '{model}'"))?;
            let (model, _) = apply_overrides(base, &overrides)?;
            let assignment = parse_world_spec(world)?;
            let world = model.evaluate(&assignment)?;
            let witness = model.is_cause(&world, cause, effect)?;

            let mut text;
            let verdict_json;
            match &witness {
                Some(witness) => {
                    text = format!(
                        "{} \u{21dd} {}: {}\n",
                        cause,
                        effect,
                        render::good("cause")
                    );
                    text.push_str(&render_side_by_side(
                        &model,
                        &witness.factual,
                        &witness.counterfactual,
                    ));
                    verdict_json = serde_json::json!({
                        "cause": cause,
                        "effect": effect,
                        "is_cause": true,
                        "witness": serde_json::to_value(witness).unwrap(),
                    });
                }
                None => {
                    let reason = if world.value(cause) != Some(true) {
                        "factuality fails: the cause does not hold in the world"
                    } else if world.value(effect) != Some(true) {
                        "factuality fails: the effect does not hold in the world"
                    } else {
                        "the effect survives the intervention"
                    };
                    text = format!(
                        "{} \u{21dd} {}: {} ({reason})\n",
                        cause,
                        effect,
                        render::bad("not a cause")
                    );
                    let (_, counterfactual) = model.intervene(&world, cause)?;
                    text.push_str(&render_side_by_side(&model, &world, &counterfactual));
                    verdict_json = serde_json::json!({
                        "cause": cause,
                        "effect": effect,
                        "is_cause": false,
                        "reason": reason,
                    });
                }
            }
            emit(cli.format, "explain", vec![verdict_json], text);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_world_spec(spec: &str) -> Result<BTreeMap<String, bool>> {
    let mut assignment = BTreeMap::new();
    for pair in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("world spec entries look like name=bool, got '{pair}'"))?;
        let value: bool = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("'{value}' is not a bool in '{pair}'"))?;
        assignment.insert(name.trim().to_string(), value);
    }
    Ok(assignment)
}

fn render_side_by_side(
    model: &CausalAgencyModel,
    factual: &ethica_core::causal::World,
    counterfactual: &ethica_core::causal::World,
) -> String {
    let names: Vec<&str> = model
        .variables()
        .iter()
        .map(|v| v.name.as_str())
        .collect();
    let width = names.iter().map(|n| n.len()).max().unwrap_or(8).max(8);
    let mut out = format!("  {:width$}  factual  intervened\n", "variable");
    for name in names {
        let show = |world: &ethica_core::causal::World| match world.value(name) {
            Some(true) => "true",
            Some(false) => "false",
            None => "-",
        };
        let marker = if factual.value(name) != counterfactual.value(name) {
            " *"
        } else {
            ""
        };
        out.push_str(&format!(
            "  {:width$}  {:7}  {}{marker}\n",
            name,
            show(factual),
            show(counterfactual)
        ));
    }
    out
}
