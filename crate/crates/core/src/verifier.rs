//! Exhaustive scenario checking.
//!
//! A [`ScenarioSpace`] is a finite, canonically ordered family of inputs:
//! background valuations of a causal agency model, pairwise law annotations
//! for a governor, or availability subsets of a plan set. A [`PropertySpec`]
//! quantifies a propositional condition over scenario atoms — facts of the
//! scenario itself plus outputs of the component under test (permissibility
//! verdicts, selected tasks or plans). [`check_property`] evaluates the
//! condition on every scenario and reports either that the property holds or
//! the counterexamples that refute it.
//!
//! Scenario evaluation is pure and scenarios are independent, so forall
//! checks may be partitioned across workers; reports are a deterministic
//! fold in canonical scenario order regardless of the partitioning.

use crate::causal::{ActionMode, CausalAgencyModel, EvalError};
use crate::governor::{self, GovernorError, LawAnnotationSet, TaskSelection};
use crate::pde::{self, PermissibilityVerdict};
use crate::policy::{self, EthicalPolicy, PlanCandidate, PlanSelection, PolicyError};
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};
use thiserror::Error;

/// A finite, enumerable family of scenarios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpace {
    pub name: String,
    pub kind: SpaceKind,
}

/// The dimensions a space ranges over.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    /// All valuations of the model's background variables that are not fixed.
    Backgrounds {
        model: CausalAgencyModel,
        fixed: BTreeMap<String, bool>,
    },
    /// All pairwise law annotation combinations for the given sizes.
    Annotations { n_tasks: usize, n_laws: usize },
    /// All non-empty availability subsets of a plan set.
    Availability {
        policy: EthicalPolicy,
        plans: Vec<PlanCandidate>,
    },
}

/// One fully instantiated point of a scenario space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    /// Position in the canonical enumeration of the space.
    pub index: u64,
    pub data: ScenarioData,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioData {
    /// Total background assignment, fixed variables included.
    Backgrounds { assignment: BTreeMap<String, bool> },
    Annotations { annotations: LawAnnotationSet },
    /// Ids of the available plans, in plan-set order.
    Availability { available: Vec<String> },
}

impl ScenarioSpace {
    /// Background variables ranged over, in declaration order.
    fn free_backgrounds<'a>(
        model: &'a CausalAgencyModel,
        fixed: &BTreeMap<String, bool>,
    ) -> Vec<&'a str> {
        model
            .background()
            .into_iter()
            .filter(|b| !fixed.contains_key(*b))
            .collect()
    }

    /// Number of scenarios in the space.
    pub fn size(&self) -> Result<u64, VerifyError> {
        match &self.kind {
            SpaceKind::Backgrounds { model, fixed } => {
                let free = Self::free_backgrounds(model, fixed).len();
                if free >= 63 {
                    return Err(VerifyError::SpaceTooLarge {
                        detail: format!("{free} free background variables"),
                    });
                }
                Ok(1u64 << free)
            }
            SpaceKind::Annotations { n_tasks, n_laws } => {
                Ok(governor::enumerate_annotations(*n_tasks, *n_laws)?.total())
            }
            SpaceKind::Availability { plans, .. } => {
                let n = plans.len();
                if n >= 63 {
                    return Err(VerifyError::SpaceTooLarge {
                        detail: format!("{n} plans"),
                    });
                }
                Ok((1u64 << n) - 1)
            }
        }
    }

    /// The scenario at a canonical index.
    ///
    /// Backgrounds: bit `i` of the index is the value of the i-th free
    /// background variable. Annotations: the index is decoded per
    /// [`LawAnnotationSet::from_index`]. Availability: the subset with
    /// bitmask `index + 1`, bit `i` making the i-th plan available.
    pub fn scenario(&self, index: u64) -> Scenario {
        let data = match &self.kind {
            SpaceKind::Backgrounds { model, fixed } => {
                let mut assignment = fixed.clone();
                for (i, name) in Self::free_backgrounds(model, fixed).iter().enumerate() {
                    assignment.insert(name.to_string(), index & (1 << i) != 0);
                }
                ScenarioData::Backgrounds { assignment }
            }
            SpaceKind::Annotations { n_tasks, n_laws } => ScenarioData::Annotations {
                annotations: LawAnnotationSet::from_index(*n_tasks, *n_laws, index),
            },
            SpaceKind::Availability { plans, .. } => {
                let mask = index + 1;
                ScenarioData::Availability {
                    available: plans
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, p)| p.id.clone())
                        .collect(),
                }
            }
        };
        Scenario { index, data }
    }

    /// Every scenario exactly once, in canonical order.
    pub fn scenarios(&self) -> Result<impl Iterator<Item = Scenario> + '_, VerifyError> {
        let size = self.size()?;
        Ok((0..size).map(|i| self.scenario(i)))
    }
}

/// Whether the condition must hold on every scenario or on at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A named, quantified condition over scenario atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertySpec {
    pub name: String,
    pub quantifier: Quantifier,
    pub condition: PropExpr,
}

/// Propositional condition over scenario atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum PropExpr {
    Const(bool),
    Atom(AtomRef),
    Not(Box<PropExpr>),
    And(Box<PropExpr>, Box<PropExpr>),
    Or(Box<PropExpr>, Box<PropExpr>),
    Implies(Box<PropExpr>, Box<PropExpr>),
}

impl PropExpr {
    pub fn atom(head: impl Into<String>, args: Vec<AtomArg>) -> Self {
        PropExpr::Atom(AtomRef {
            head: head.into(),
            args,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: PropExpr) -> Self {
        PropExpr::Not(Box::new(e))
    }

    pub fn and(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::Implies(Box::new(a), Box::new(b))
    }
}

/// An uninterpreted atom: a head and its arguments, resolved against a
/// scenario space before checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomRef {
    pub head: String,
    pub args: Vec<AtomArg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomArg {
    Name(String),
    Number(u64),
}

impl fmt::Display for AtomRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                match a {
                    AtomArg::Name(n) => write!(f, "{n}")?,
                    AtomArg::Number(n) => write!(f, "{n}")?,
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The evaluation record for one scenario, kept alongside counterexamples.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioTrace {
    Pde { verdicts: Vec<PermissibilityVerdict> },
    Governor { selection: TaskSelection },
    Plans { selection: PlanSelection },
}

/// Maps scenarios to the outputs the property's atoms talk about.
///
/// Implementations must be pure: same scenario, same trace.
pub trait ScenarioEvaluator: Sync {
    fn evaluate(
        &self,
        space: &ScenarioSpace,
        scenario: &Scenario,
    ) -> Result<ScenarioTrace, VerifyError>;
}

/// The production evaluator: permissibility verdicts for background spaces,
/// lexicographic task selection for annotation spaces, policy-ordered plan
/// selection for availability spaces.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardEvaluator;

impl ScenarioEvaluator for StandardEvaluator {
    fn evaluate(
        &self,
        space: &ScenarioSpace,
        scenario: &Scenario,
    ) -> Result<ScenarioTrace, VerifyError> {
        match (&space.kind, &scenario.data) {
            (SpaceKind::Backgrounds { model, .. }, ScenarioData::Backgrounds { assignment }) => {
                Ok(ScenarioTrace::Pde {
                    verdicts: pde::permissible_worlds(model, assignment)?,
                })
            }
            (SpaceKind::Annotations { .. }, ScenarioData::Annotations { annotations }) => {
                Ok(ScenarioTrace::Governor {
                    selection: governor::select_task(annotations)?,
                })
            }
            (SpaceKind::Availability { policy, plans }, ScenarioData::Availability { available }) => {
                let candidates: Vec<PlanCandidate> = plans
                    .iter()
                    .filter(|p| available.contains(&p.id))
                    .cloned()
                    .collect();
                Ok(ScenarioTrace::Plans {
                    selection: policy::select_plan(policy, &candidates)?,
                })
            }
            _ => Err(VerifyError::EvaluatorMismatch),
        }
    }
}

/// An atom bound to the space it will be evaluated in.
#[derive(Debug, Clone, PartialEq)]
enum ResolvedAtom {
    BackgroundFact { variable: String },
    Permissible { actions: BTreeSet<String> },
    SelectedTask { task: usize },
    Prefer { law: usize, preferred: usize, over: usize },
    Cycle,
    SelectedPlan { id: String },
    Available { id: String },
}

#[derive(Debug, Clone, PartialEq)]
enum ResolvedExpr {
    Const(bool),
    Atom(ResolvedAtom),
    Not(Box<ResolvedExpr>),
    And(Box<ResolvedExpr>, Box<ResolvedExpr>),
    Or(Box<ResolvedExpr>, Box<ResolvedExpr>),
    Implies(Box<ResolvedExpr>, Box<ResolvedExpr>),
}

fn unresolvable(atom: &AtomRef, reason: impl Into<String>) -> VerifyError {
    VerifyError::UnresolvableAtom {
        atom: atom.to_string(),
        reason: reason.into(),
    }
}

/// Parses a surface task name `t<k>` (1-based) into a 0-based index.
fn task_index(atom: &AtomRef, name: &str, n_tasks: usize) -> Result<usize, VerifyError> {
    let number = name
        .strip_prefix('t')
        .and_then(|rest| rest.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| unresolvable(atom, format!("'{name}' is not a task (expected t1..t{n_tasks})")))?;
    if number > n_tasks {
        return Err(unresolvable(
            atom,
            format!("task {name} out of range for {n_tasks} tasks"),
        ));
    }
    Ok(number - 1)
}

fn names(atom: &AtomRef) -> Result<Vec<&str>, VerifyError> {
    atom.args
        .iter()
        .map(|a| match a {
            AtomArg::Name(n) => Ok(n.as_str()),
            AtomArg::Number(_) => Err(unresolvable(atom, "expected a name argument")),
        })
        .collect()
}

fn resolve_atom(atom: &AtomRef, space: &ScenarioSpace) -> Result<ResolvedAtom, VerifyError> {
    match &space.kind {
        SpaceKind::Backgrounds { model, .. } => match atom.head.as_str() {
            "permissible" => {
                let actions: BTreeSet<String> =
                    names(atom)?.into_iter().map(str::to_string).collect();
                if actions.len() != atom.args.len() {
                    return Err(unresolvable(atom, "duplicate action"));
                }
                for a in &actions {
                    if !model.actions().contains(&a.as_str()) {
                        return Err(unresolvable(
                            atom,
                            format!("'{a}' is not an action of model '{}'", model.name()),
                        ));
                    }
                }
                if model.action_mode() == ActionMode::ExactlyOne && actions.len() != 1 {
                    return Err(unresolvable(
                        atom,
                        "model generates exactly-one-action worlds, so the action set must be a singleton",
                    ));
                }
                Ok(ResolvedAtom::Permissible { actions })
            }
            name if atom.args.is_empty() => {
                if model.background().contains(&name) {
                    Ok(ResolvedAtom::BackgroundFact {
                        variable: name.to_string(),
                    })
                } else {
                    Err(unresolvable(
                        atom,
                        format!("'{name}' is not a background variable of model '{}'", model.name()),
                    ))
                }
            }
            _ => Err(unresolvable(atom, "unknown atom for a background space")),
        },
        SpaceKind::Annotations { n_tasks, n_laws } => match atom.head.as_str() {
            "selected" => match names(atom)?.as_slice() {
                [name] => Ok(ResolvedAtom::SelectedTask {
                    task: task_index(atom, name, *n_tasks)?,
                }),
                _ => Err(unresolvable(atom, "selected takes one task")),
            },
            "prefer" => match atom.args.as_slice() {
                [AtomArg::Number(law), AtomArg::Name(a), AtomArg::Name(b)] => {
                    let law = *law as usize;
                    if law < 1 || law > *n_laws {
                        return Err(unresolvable(
                            atom,
                            format!("law {law} out of range 1..{n_laws}"),
                        ));
                    }
                    let preferred = task_index(atom, a, *n_tasks)?;
                    let over = task_index(atom, b, *n_tasks)?;
                    if preferred == over {
                        return Err(unresolvable(atom, "a task cannot be preferred over itself"));
                    }
                    Ok(ResolvedAtom::Prefer {
                        law: law - 1,
                        preferred,
                        over,
                    })
                }
                _ => Err(unresolvable(atom, "prefer takes a law number and two tasks")),
            },
            "cycle" if atom.args.is_empty() => Ok(ResolvedAtom::Cycle),
            _ => Err(unresolvable(atom, "unknown atom for an annotation space")),
        },
        SpaceKind::Availability { plans, .. } => {
            let plan_arg = |atom: &AtomRef| -> Result<String, VerifyError> {
                match names(atom)?.as_slice() {
                    [name] => {
                        if plans.iter().any(|p| p.id == *name) {
                            Ok(name.to_string())
                        } else {
                            Err(unresolvable(atom, format!("'{name}' is not a plan")))
                        }
                    }
                    _ => Err(unresolvable(atom, "expected one plan id")),
                }
            };
            match atom.head.as_str() {
                "selected" => Ok(ResolvedAtom::SelectedPlan { id: plan_arg(atom)? }),
                "available" => Ok(ResolvedAtom::Available { id: plan_arg(atom)? }),
                _ => Err(unresolvable(atom, "unknown atom for an availability space")),
            }
        }
    }
}

fn resolve_expr(expr: &PropExpr, space: &ScenarioSpace) -> Result<ResolvedExpr, VerifyError> {
    Ok(match expr {
        PropExpr::Const(b) => ResolvedExpr::Const(*b),
        PropExpr::Atom(atom) => ResolvedExpr::Atom(resolve_atom(atom, space)?),
        PropExpr::Not(e) => ResolvedExpr::Not(Box::new(resolve_expr(e, space)?)),
        PropExpr::And(a, b) => ResolvedExpr::And(
            Box::new(resolve_expr(a, space)?),
            Box::new(resolve_expr(b, space)?),
        ),
        PropExpr::Or(a, b) => ResolvedExpr::Or(
            Box::new(resolve_expr(a, space)?),
            Box::new(resolve_expr(b, space)?),
        ),
        PropExpr::Implies(a, b) => ResolvedExpr::Implies(
            Box::new(resolve_expr(a, space)?),
            Box::new(resolve_expr(b, space)?),
        ),
    })
}

/// Checks that every atom of the property is meaningful for the space.
pub fn validate_property(space: &ScenarioSpace, property: &PropertySpec) -> Result<(), VerifyError> {
    resolve_expr(&property.condition, space).map(|_| ())
}

fn eval_atom(
    atom: &ResolvedAtom,
    scenario: &Scenario,
    trace: &ScenarioTrace,
) -> Result<bool, VerifyError> {
    match atom {
        ResolvedAtom::BackgroundFact { variable } => match &scenario.data {
            ScenarioData::Backgrounds { assignment } => Ok(assignment[variable]),
            _ => Err(VerifyError::EvaluatorMismatch),
        },
        ResolvedAtom::Permissible { actions } => match trace {
            ScenarioTrace::Pde { verdicts } => {
                let verdict = verdicts
                    .iter()
                    .find(|v| {
                        let trues: BTreeSet<String> =
                            v.per_action.keys().cloned().collect();
                        trues == *actions
                    })
                    .ok_or(VerifyError::EvaluatorMismatch)?;
                Ok(verdict.permissible)
            }
            _ => Err(VerifyError::EvaluatorMismatch),
        },
        ResolvedAtom::SelectedTask { task } => match trace {
            ScenarioTrace::Governor { selection } => Ok(selection.selected == *task),
            _ => Err(VerifyError::EvaluatorMismatch),
        },
        ResolvedAtom::Prefer { law, preferred, over } => match &scenario.data {
            ScenarioData::Annotations { annotations } => Ok(annotations
                .preference(*law, *preferred, *over)?
                == crate::governor::PairPreference::FirstPreferred),
            _ => Err(VerifyError::EvaluatorMismatch),
        },
        ResolvedAtom::Cycle => match trace {
            ScenarioTrace::Governor { selection } => Ok(selection.cycle),
            _ => Err(VerifyError::EvaluatorMismatch),
        },
        ResolvedAtom::SelectedPlan { id } => match trace {
            ScenarioTrace::Plans { selection } => Ok(selection.selected.id == *id),
            _ => Err(VerifyError::EvaluatorMismatch),
        },
        ResolvedAtom::Available { id } => match &scenario.data {
            ScenarioData::Availability { available } => Ok(available.contains(id)),
            _ => Err(VerifyError::EvaluatorMismatch),
        },
    }
}

fn eval_expr(
    expr: &ResolvedExpr,
    scenario: &Scenario,
    trace: &ScenarioTrace,
) -> Result<bool, VerifyError> {
    Ok(match expr {
        ResolvedExpr::Const(b) => *b,
        ResolvedExpr::Atom(atom) => eval_atom(atom, scenario, trace)?,
        ResolvedExpr::Not(e) => !eval_expr(e, scenario, trace)?,
        ResolvedExpr::And(a, b) => eval_expr(a, scenario, trace)? && eval_expr(b, scenario, trace)?,
        ResolvedExpr::Or(a, b) => eval_expr(a, scenario, trace)? || eval_expr(b, scenario, trace)?,
        ResolvedExpr::Implies(a, b) => {
            !eval_expr(a, scenario, trace)? || eval_expr(b, scenario, trace)?
        }
    })
}

/// Options for a verification run.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Cap on stored counterexamples/witnesses (violations are still counted
    /// beyond it). A failing or witnessed report always keeps at least one
    /// item, so the outcome can be read off the evidence list.
    pub max_evidence: usize,
    /// Worker threads for forall checks. Existential checks always scan
    /// sequentially so early stopping stays deterministic.
    pub workers: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_evidence: 10,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
}

/// A scenario refuting a forall property or witnessing an exists property,
/// with the evaluator's trace for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub scenario: Scenario,
    pub trace: ScenarioTrace,
}

fn duration_secs<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Result of checking one property over one space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub property: String,
    pub space: String,
    /// Scenarios actually evaluated. Equals `space_size` for forall
    /// properties; an existential check stops at its first witness.
    pub scenarios_checked: u64,
    pub space_size: u64,
    pub outcome: Outcome,
    /// Counterexamples (forall) or witnesses (exists), in canonical scenario
    /// order, capped at the configured maximum.
    pub evidence: Vec<Evidence>,
    /// Total violations found (forall) or witnesses found (exists),
    /// uncapped.
    pub findings: u64,
    #[serde(serialize_with = "duration_secs", rename = "elapsed_secs")]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

/// Evaluates the property's condition on every scenario of the space.
///
/// Forall: all scenarios are checked and every violating scenario is counted,
/// the first `max_evidence` of them (in canonical order) kept as
/// counterexamples. Exists: scenarios are scanned in canonical order until a
/// witness is found. The report is identical for any worker count.
pub fn check_property(
    space: &ScenarioSpace,
    property: &PropertySpec,
    evaluator: &dyn ScenarioEvaluator,
    options: &CheckOptions,
) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let condition = resolve_expr(&property.condition, space)?;
    let size = space.size()?;
    let max_evidence = options.max_evidence.max(1);

    let run_one = |index: u64| -> Result<(bool, Scenario, ScenarioTrace), VerifyError> {
        let scenario = space.scenario(index);
        let trace = evaluator.evaluate(space, &scenario)?;
        let value = eval_expr(&condition, &scenario, &trace)?;
        Ok((value, scenario, trace))
    };

    let report = match property.quantifier {
        Quantifier::Exists => {
            let mut checked = 0;
            let mut witness = None;
            for index in 0..size {
                checked += 1;
                let (value, scenario, trace) = run_one(index)?;
                if value {
                    witness = Some(Evidence { scenario, trace });
                    break;
                }
            }
            let found = witness.is_some();
            VerificationReport {
                property: property.name.clone(),
                space: space.name.clone(),
                scenarios_checked: checked,
                space_size: size,
                outcome: if found { Outcome::Holds } else { Outcome::Fails },
                findings: witness.iter().count() as u64,
                evidence: witness.into_iter().collect(),
                elapsed: started.elapsed(),
            }
        }
        Quantifier::Forall => {
            let workers = options.workers.max(1).min(size.max(1) as usize);
            let chunk = size.div_ceil(workers as u64).max(1);
            let results: Vec<Result<(u64, Vec<Evidence>), VerifyError>> =
                std::thread::scope(|scope| {
                    let handles: Vec<_> = (0..workers as u64)
                        .map(|w| {
                            let run_one = &run_one;
                            let start = w * chunk;
                            let end = ((w + 1) * chunk).min(size);
                            scope.spawn(move || {
                                let mut violations = 0u64;
                                let mut evidence = Vec::new();
                                for index in start..end {
                                    let (value, scenario, trace) = run_one(index)?;
                                    if !value {
                                        violations += 1;
                                        if evidence.len() < max_evidence {
                                            evidence.push(Evidence { scenario, trace });
                                        }
                                    }
                                }
                                Ok((violations, evidence))
                            })
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("verification worker panicked"))
                        .collect()
                });

            let mut violations = 0u64;
            let mut evidence = Vec::new();
            for result in results {
                let (count, mut items) = result?;
                violations += count;
                evidence.append(&mut items);
            }
            evidence.truncate(max_evidence);
            VerificationReport {
                property: property.name.clone(),
                space: space.name.clone(),
                scenarios_checked: size,
                space_size: size,
                outcome: if violations == 0 { Outcome::Holds } else { Outcome::Fails },
                findings: violations,
                evidence,
                elapsed: started.elapsed(),
            }
        }
    };
    Ok(report)
}

/// Runs a list of (space, property) checks in order; the aggregate succeeds
/// only when every property holds.
pub fn verify_suite(
    suite: &[(&ScenarioSpace, &PropertySpec)],
    evaluator: &dyn ScenarioEvaluator,
    options: &CheckOptions,
) -> Result<Vec<VerificationReport>, VerifyError> {
    suite
        .iter()
        .map(|(space, property)| check_property(space, property, evaluator, options))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("cannot resolve atom {atom}: {reason}")]
    UnresolvableAtom { atom: String, reason: String },
    #[error("scenario space too large: {detail}")]
    SpaceTooLarge { detail: String },
    #[error("scenario or trace does not match the space kind")]
    EvaluatorMismatch,
    #[error(transparent)]
    Model(#[from] EvalError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Governor(#[from] GovernorError),
}
