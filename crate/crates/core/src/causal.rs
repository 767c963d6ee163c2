//! Causal agency models.
//!
//! A model carries three disjoint sets of propositional variables — actions,
//! background facts and consequences — together with one mechanism
//! `c := φ` per consequence, a utility map, an intention relation and a world
//! generation mode. Worlds assign the actions and background facts; the
//! consequence valuation is derived as the unique fixpoint of the (acyclic)
//! mechanisms. Interventions flip a variable and, for consequences, remove
//! its mechanism; but-for causality is decided by comparing the factual and
//! intervened worlds.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// The role a variable plays in a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Action,
    Background,
    Consequence,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Action => write!(f, "action"),
            VarKind::Background => write!(f, "background"),
            VarKind::Consequence => write!(f, "consequence"),
        }
    }
}

/// A named propositional variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

/// Propositional formula over variable names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Formula {
    True,
    False,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Collects every variable name referenced by the formula.
    pub fn variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(name) => {
                out.insert(name);
            }
            Formula::Not(inner) => inner.variables(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }

    /// Evaluates the formula; `value_of` supplies variable values.
    ///
    /// Returns the name of the first unresolvable variable on failure.
    pub fn eval(&self, value_of: &dyn Fn(&str) -> Option<bool>) -> Result<bool, String> {
        match self {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Var(name) => value_of(name).ok_or_else(|| name.clone()),
            Formula::Not(inner) => Ok(!inner.eval(value_of)?),
            Formula::And(a, b) => Ok(a.eval(value_of)? & b.eval(value_of)?),
            Formula::Or(a, b) => Ok(a.eval(value_of)? | b.eval(value_of)?),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Not(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Var(name) => write!(f, "{name}")?,
            Formula::Not(inner) => {
                write!(f, "not ")?;
                inner.fmt_prec(f, 3)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " and ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " or ")?;
                b.fmt_prec(f, 2)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A mechanism `consequent := antecedent`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mechanism {
    pub consequent: String,
    pub antecedent: Formula,
}

/// How candidate worlds are generated from the action set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMode {
    /// Exactly one action variable is true in each world.
    ExactlyOne,
    /// Every subset of actions, including the empty one, yields a world.
    PowerSet,
}

/// A causal agency model.
///
/// Construction is permissive: duplicate names, missing mechanisms, undeclared
/// references and cycles can all be expressed and are reported by
/// [`CausalAgencyModel::validate`]. Evaluation operations expect a valid model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalAgencyModel {
    name: String,
    variables: Vec<Variable>,
    mechanisms: Vec<Mechanism>,
    utilities: BTreeMap<String, f64>,
    intentions: Vec<(String, String)>,
    background_values: BTreeMap<String, bool>,
    action_mode: ActionMode,
    /// Consequences whose value is fixed by an intervention, replacing their
    /// mechanism. Empty on user-constructed models.
    pinned: BTreeMap<String, bool>,
}

impl CausalAgencyModel {
    pub fn new(name: impl Into<String>) -> Self {
        CausalAgencyModel {
            name: name.into(),
            variables: Vec::new(),
            mechanisms: Vec::new(),
            utilities: BTreeMap::new(),
            intentions: Vec::new(),
            background_values: BTreeMap::new(),
            action_mode: ActionMode::ExactlyOne,
            pinned: BTreeMap::new(),
        }
    }

    pub fn add_action(&mut self, name: impl Into<String>) {
        self.variables.push(Variable {
            name: name.into(),
            kind: VarKind::Action,
        });
    }

    /// Declares a background variable together with its current value.
    pub fn add_background(&mut self, name: impl Into<String>, value: bool) {
        let name = name.into();
        self.background_values.insert(name.clone(), value);
        self.variables.push(Variable {
            name,
            kind: VarKind::Background,
        });
    }

    pub fn add_consequence(&mut self, name: impl Into<String>) {
        self.variables.push(Variable {
            name: name.into(),
            kind: VarKind::Consequence,
        });
    }

    pub fn add_mechanism(&mut self, consequent: impl Into<String>, antecedent: Formula) {
        self.mechanisms.push(Mechanism {
            consequent: consequent.into(),
            antecedent,
        });
    }

    pub fn set_utility(&mut self, name: impl Into<String>, value: f64) {
        self.utilities.insert(name.into(), value);
    }

    pub fn add_intention(&mut self, action: impl Into<String>, consequence: impl Into<String>) {
        self.intentions.push((action.into(), consequence.into()));
    }

    pub fn set_action_mode(&mut self, mode: ActionMode) {
        self.action_mode = mode;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }

    pub fn intentions(&self) -> &[(String, String)] {
        &self.intentions
    }

    pub fn utilities(&self) -> &BTreeMap<String, f64> {
        &self.utilities
    }

    pub fn action_mode(&self) -> ActionMode {
        self.action_mode
    }

    pub fn background_values(&self) -> &BTreeMap<String, bool> {
        &self.background_values
    }

    pub fn pinned(&self) -> &BTreeMap<String, bool> {
        &self.pinned
    }

    /// Utility of a variable; unlisted variables are neutral (0).
    pub fn utility(&self, name: &str) -> f64 {
        self.utilities.get(name).copied().unwrap_or(0.0)
    }

    fn names_of(&self, kind: VarKind) -> Vec<&str> {
        self.variables
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.as_str())
            .collect()
    }

    /// Action names in declaration order.
    pub fn actions(&self) -> Vec<&str> {
        self.names_of(VarKind::Action)
    }

    /// Background variable names in declaration order.
    pub fn background(&self) -> Vec<&str> {
        self.names_of(VarKind::Background)
    }

    /// Consequence names in declaration order.
    pub fn consequences(&self) -> Vec<&str> {
        self.names_of(VarKind::Consequence)
    }

    /// Kind of a declared variable, if any. With duplicate declarations the
    /// first one wins; validation reports the duplicate.
    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.variables
            .iter()
            .find(|v| v.name == name)
            .map(|v| v.kind)
    }

    pub fn mechanism_for(&self, consequent: &str) -> Option<&Mechanism> {
        self.mechanisms.iter().find(|m| m.consequent == consequent)
    }

    /// Checks every structural invariant and reports all violations found.
    /// An empty report means the model is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                violations.push(Violation::DuplicateVariable {
                    name: v.name.clone(),
                });
            }
        }

        let consequences: BTreeSet<&str> = self.consequences().into_iter().collect();
        let mut mechanised = BTreeSet::new();
        for m in &self.mechanisms {
            match self.kind_of(&m.consequent) {
                None => violations.push(Violation::UndeclaredReference {
                    context: format!("mechanism for '{}'", m.consequent),
                    name: m.consequent.clone(),
                }),
                Some(VarKind::Consequence) => {
                    if !mechanised.insert(m.consequent.as_str()) {
                        violations.push(Violation::DuplicateMechanism {
                            consequence: m.consequent.clone(),
                        });
                    }
                }
                Some(_) => violations.push(Violation::MechanismForNonConsequence {
                    name: m.consequent.clone(),
                }),
            }
            let mut refs = BTreeSet::new();
            m.antecedent.variables(&mut refs);
            for r in refs {
                if self.kind_of(r).is_none() {
                    violations.push(Violation::UndeclaredReference {
                        context: format!("mechanism for '{}'", m.consequent),
                        name: r.to_string(),
                    });
                }
            }
        }
        for c in &consequences {
            if !mechanised.contains(c) && !self.pinned.contains_key(*c) {
                violations.push(Violation::MissingMechanism {
                    consequence: c.to_string(),
                });
            }
        }

        if let Err(cycle) = self.consequence_order() {
            violations.push(Violation::MechanismCycle { cycle });
        }

        for (name, value) in &self.utilities {
            if self.kind_of(name).is_none() {
                violations.push(Violation::UndeclaredReference {
                    context: "utilities".to_string(),
                    name: name.clone(),
                });
            }
            if !value.is_finite() {
                violations.push(Violation::NonFiniteUtility {
                    name: name.clone(),
                    value: *value,
                });
            }
        }

        for (action, consequence) in &self.intentions {
            match self.kind_of(action) {
                None => violations.push(Violation::UndeclaredReference {
                    context: "intentions".to_string(),
                    name: action.clone(),
                }),
                Some(VarKind::Action) => {}
                Some(kind) => violations.push(Violation::IntentionNotAnAction {
                    name: action.clone(),
                    kind,
                }),
            }
            match self.kind_of(consequence) {
                None => violations.push(Violation::UndeclaredReference {
                    context: "intentions".to_string(),
                    name: consequence.clone(),
                }),
                Some(VarKind::Consequence) => {}
                Some(kind) => violations.push(Violation::IntentionNotAConsequence {
                    name: consequence.clone(),
                    kind,
                }),
            }
        }

        ValidationReport { violations }
    }

    /// Consequences in evaluation order: a topological order of the
    /// mechanism dependency graph, breaking ties by declaration order.
    /// Pinned consequences have no dependencies.
    ///
    /// Returns a dependency cycle (in declaration order, starting at its
    /// first-declared member) when no such order exists.
    pub fn consequence_order(&self) -> Result<Vec<String>, Vec<String>> {
        let consequences = self.consequences();
        let index: BTreeMap<&str, usize> = consequences
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect();

        // deps[i] = consequence indices that must be evaluated before i
        let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); consequences.len()];
        for (i, c) in consequences.iter().enumerate() {
            if self.pinned.contains_key(*c) {
                continue;
            }
            if let Some(m) = self.mechanism_for(c) {
                let mut refs = BTreeSet::new();
                m.antecedent.variables(&mut refs);
                for r in refs {
                    if let Some(&j) = index.get(r) {
                        deps[i].insert(j);
                    }
                }
            }
        }

        let mut order = Vec::with_capacity(consequences.len());
        let mut done = vec![false; consequences.len()];
        loop {
            let next = (0..consequences.len())
                .find(|&i| !done[i] && deps[i].iter().all(|&j| done[j]));
            match next {
                Some(i) => {
                    done[i] = true;
                    order.push(consequences[i].to_string());
                }
                None => break,
            }
        }
        if order.len() == consequences.len() {
            return Ok(order);
        }

        // Walk dependencies from the first unresolved consequence until a
        // node repeats, then report the loop in declaration order.
        let start = (0..consequences.len()).find(|&i| !done[i]).unwrap();
        let mut path = vec![start];
        let mut on_path = BTreeSet::from([start]);
        loop {
            let current = *path.last().unwrap();
            let next = deps[current].iter().copied().find(|&j| !done[j]).unwrap();
            if on_path.contains(&next) {
                let from = path.iter().position(|&i| i == next).unwrap();
                let mut cycle: Vec<usize> = path[from..].to_vec();
                cycle.sort_unstable();
                return Err(cycle
                    .into_iter()
                    .map(|i| consequences[i].to_string())
                    .collect());
            }
            on_path.insert(next);
            path.push(next);
        }
    }

    /// Evaluates a total assignment of the actions and background variables,
    /// deriving every consequence in topological order.
    pub fn evaluate(&self, assignment: &BTreeMap<String, bool>) -> Result<World, EvalError> {
        for name in assignment.keys() {
            match self.kind_of(name) {
                None => {
                    return Err(EvalError::UnknownVariable { name: name.clone() });
                }
                Some(VarKind::Consequence) => {
                    return Err(EvalError::NotAnInput { name: name.clone() });
                }
                Some(_) => {}
            }
        }
        let missing: Vec<String> = self
            .variables
            .iter()
            .filter(|v| matches!(v.kind, VarKind::Action | VarKind::Background))
            .filter(|v| !assignment.contains_key(&v.name))
            .map(|v| v.name.clone())
            .collect();
        if !missing.is_empty() {
            return Err(EvalError::PartialAssignment { names: missing });
        }

        let order = self.consequence_order().map_err(|cycle| {
            EvalError::InvalidModel {
                reason: format!("mechanism cycle: {}", cycle.join(" -> ")),
            }
        })?;

        let mut derived: BTreeMap<String, bool> = BTreeMap::new();
        for c in order {
            let value = if let Some(&pin) = self.pinned.get(&c) {
                pin
            } else {
                let m = self
                    .mechanism_for(&c)
                    .ok_or_else(|| EvalError::InvalidModel {
                        reason: format!("no mechanism for consequence '{c}'"),
                    })?;
                m.antecedent
                    .eval(&|name| {
                        assignment.get(name).copied().or_else(|| derived.get(name).copied())
                    })
                    .map_err(|name| EvalError::InvalidModel {
                        reason: format!("mechanism for '{c}' references unresolved '{name}'"),
                    })?
            };
            derived.insert(c, value);
        }

        Ok(World {
            assignment: assignment.clone(),
            derived,
        })
    }

    /// Flips `target` and returns the modified model/world pair; the inputs
    /// are left untouched.
    ///
    /// Flipping an action or background variable only changes the assignment;
    /// flipping a consequence removes its mechanism and pins it to the
    /// opposite of its current derived value. The returned world is
    /// re-evaluated under the returned model.
    pub fn intervene(
        &self,
        world: &World,
        target: &str,
    ) -> Result<(CausalAgencyModel, World), EvalError> {
        match self.kind_of(target) {
            None => Err(EvalError::UnknownVariable {
                name: target.to_string(),
            }),
            Some(VarKind::Action) | Some(VarKind::Background) => {
                let current =
                    world
                        .assignment
                        .get(target)
                        .copied()
                        .ok_or_else(|| EvalError::ForeignWorld {
                            detail: format!("world does not assign '{target}'"),
                        })?;
                let mut assignment = world.assignment.clone();
                assignment.insert(target.to_string(), !current);
                let new_world = self.evaluate(&assignment)?;
                Ok((self.clone(), new_world))
            }
            Some(VarKind::Consequence) => {
                let current =
                    world
                        .derived
                        .get(target)
                        .copied()
                        .ok_or_else(|| EvalError::ForeignWorld {
                            detail: format!("world does not derive '{target}'"),
                        })?;
                let mut model = self.clone();
                model.mechanisms.retain(|m| m.consequent != target);
                model.pinned.insert(target.to_string(), !current);
                let new_world = model.evaluate(&world.assignment)?;
                Ok((model, new_world))
            }
        }
    }

    /// Decides whether `cause` is a but-for cause of `effect` in `world`:
    /// both must hold factually and `effect` must fail once `cause` is
    /// flipped by an intervention. Returns a witness exactly when true.
    pub fn is_cause(
        &self,
        world: &World,
        cause: &str,
        effect: &str,
    ) -> Result<Option<CausalWitness>, EvalError> {
        if self.kind_of(cause).is_none() {
            return Err(EvalError::UnknownVariable {
                name: cause.to_string(),
            });
        }
        match self.kind_of(effect) {
            None => {
                return Err(EvalError::UnknownVariable {
                    name: effect.to_string(),
                })
            }
            Some(VarKind::Consequence) => {}
            Some(kind) => {
                return Err(EvalError::NotAConsequence {
                    name: effect.to_string(),
                    kind,
                })
            }
        }
        if world.value(cause) != Some(true) || world.value(effect) != Some(true) {
            return Ok(None);
        }
        let (_, counterfactual) = self.intervene(world, cause)?;
        if counterfactual.value(effect) == Some(false) {
            Ok(Some(CausalWitness {
                cause: cause.to_string(),
                effect: effect.to_string(),
                factual: world.clone(),
                counterfactual,
            }))
        } else {
            Ok(None)
        }
    }
}

/// One interpretation of the actions and background variables together with
/// the consequence valuation derived from the mechanisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct World {
    assignment: BTreeMap<String, bool>,
    derived: BTreeMap<String, bool>,
}

impl World {
    pub fn assignment(&self) -> &BTreeMap<String, bool> {
        &self.assignment
    }

    pub fn derived(&self) -> &BTreeMap<String, bool> {
        &self.derived
    }

    /// Value of any variable, assigned or derived.
    pub fn value(&self, name: &str) -> Option<bool> {
        self.assignment
            .get(name)
            .or_else(|| self.derived.get(name))
            .copied()
    }

}

/// Evidence that `cause ⇝ effect`: the effect holds in the factual world and
/// fails in the intervened one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalWitness {
    pub cause: String,
    pub effect: String,
    pub factual: World,
    pub counterfactual: World,
}

/// A structural invariant broken by a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    DuplicateVariable { name: String },
    MissingMechanism { consequence: String },
    DuplicateMechanism { consequence: String },
    MechanismForNonConsequence { name: String },
    UndeclaredReference { context: String, name: String },
    MechanismCycle { cycle: Vec<String> },
    IntentionNotAnAction { name: String, kind: VarKind },
    IntentionNotAConsequence { name: String, kind: VarKind },
    NonFiniteUtility { name: String, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVariable { name } => {
                write!(f, "variable '{name}' is declared more than once")
            }
            Violation::MissingMechanism { consequence } => {
                write!(f, "consequence '{consequence}' has no mechanism")
            }
            Violation::DuplicateMechanism { consequence } => {
                write!(f, "consequence '{consequence}' has more than one mechanism")
            }
            Violation::MechanismForNonConsequence { name } => {
                write!(f, "mechanism target '{name}' is not a consequence")
            }
            Violation::UndeclaredReference { context, name } => {
                write!(f, "{context} references undeclared variable '{name}'")
            }
            Violation::MechanismCycle { cycle } => {
                write!(f, "mechanism cycle: {}", cycle.join(" -> "))
            }
            Violation::IntentionNotAnAction { name, kind } => {
                write!(f, "intention source '{name}' is a {kind}, not an action")
            }
            Violation::IntentionNotAConsequence { name, kind } => {
                write!(f, "intention target '{name}' is a {kind}, not a consequence")
            }
            Violation::NonFiniteUtility { name, value } => {
                write!(f, "utility of '{name}' is not finite ({value})")
            }
        }
    }
}

/// Outcome of validating a model; empty means valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Errors from evaluation, intervention and causality queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown variable '{name}'")]
    UnknownVariable { name: String },
    #[error("'{name}' is a consequence and cannot be assigned directly")]
    NotAnInput { name: String },
    #[error("'{name}' is a {kind}, not a consequence")]
    NotAConsequence { name: String, kind: VarKind },
    #[error("assignment is missing variables: {}", names.join(", "))]
    PartialAssignment { names: Vec<String> },
    #[error("world does not belong to this model: {detail}")]
    ForeignWorld { detail: String },
    #[error("model is not valid: {reason}")]
    InvalidModel { reason: String },
    #[error("{what} is too large to enumerate")]
    TooLarge { what: String },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::smart_home;

    fn assignment(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn smart_home_is_valid() {
        let report = smart_home().validate();
        assert!(report.is_valid(), "unexpected violations: {report}");
    }

    #[test]
    fn two_mechanism_cycle_is_reported() {
        let mut m = CausalAgencyModel::new("cyclic");
        m.add_consequence("c1");
        m.add_consequence("c2");
        m.add_mechanism("c1", Formula::var("c2"));
        m.add_mechanism("c2", Formula::var("c1"));
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MechanismCycle { cycle } if cycle == &["c1", "c2"])));
    }

    #[test]
    fn duplicate_mechanism_is_reported() {
        let mut m = CausalAgencyModel::new("dup");
        m.add_action("turn_lights_on");
        m.add_consequence("lights_on");
        m.add_mechanism("lights_on", Formula::var("turn_lights_on"));
        m.add_mechanism("lights_on", Formula::True);
        let report = m.validate();
        assert!(report.violations.iter().any(
            |v| matches!(v, Violation::DuplicateMechanism { consequence } if consequence == "lights_on")
        ));
    }

    #[test]
    fn undeclared_reference_is_reported() {
        let mut m = CausalAgencyModel::new("typo");
        m.add_consequence("people_can_see");
        m.add_mechanism("people_can_see", Formula::var("dayligt"));
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UndeclaredReference { name, .. } if name == "dayligt")));
    }

    #[test]
    fn evaluate_all_actions_true() {
        let m = smart_home();
        let w = m
            .evaluate(&assignment(&[
                ("turn_lights_on", true),
                ("evacuation_attempt", true),
                ("fire", true),
                ("daylight", false),
            ]))
            .unwrap();
        assert_eq!(w.value("lights_on"), Some(true));
        assert_eq!(w.value("people_can_see"), Some(true));
        assert_eq!(w.value("people_leave_house"), Some(true));
        assert_eq!(w.value("danger_in_house"), Some(true));
        assert_eq!(w.value("people_are_safe"), Some(true));
    }

    #[test]
    fn evaluate_without_lights_at_night() {
        let m = smart_home();
        let w = m
            .evaluate(&assignment(&[
                ("turn_lights_on", false),
                ("evacuation_attempt", true),
                ("fire", true),
                ("daylight", false),
            ]))
            .unwrap();
        assert_eq!(w.value("lights_on"), Some(false));
        assert_eq!(w.value("people_can_see"), Some(false));
        assert_eq!(w.value("people_leave_house"), Some(false));
        assert_eq!(w.value("danger_in_house"), Some(true));
        assert_eq!(w.value("people_are_safe"), Some(false));
    }

    #[test]
    fn evaluate_empty_consequence_set() {
        let mut m = CausalAgencyModel::new("actions_only");
        m.add_action("a");
        let w = m.evaluate(&assignment(&[("a", true)])).unwrap();
        assert!(w.derived().is_empty());
    }

    #[test]
    fn partial_assignment_names_missing_variables() {
        let m = smart_home();
        let err = m
            .evaluate(&assignment(&[("turn_lights_on", true)]))
            .unwrap_err();
        match err {
            EvalError::PartialAssignment { names } => {
                assert!(names.contains(&"fire".to_string()));
                assert!(names.contains(&"daylight".to_string()));
                assert!(names.contains(&"evacuation_attempt".to_string()));
            }
            other => panic!("expected PartialAssignment, got {other:?}"),
        }
    }

    fn all_true_world(m: &CausalAgencyModel) -> World {
        m.evaluate(&assignment(&[
            ("turn_lights_on", true),
            ("evacuation_attempt", true),
            ("fire", true),
            ("daylight", false),
        ]))
        .unwrap()
    }

    #[test]
    fn intervening_on_consequence_removes_mechanism_and_pins() {
        let m = smart_home();
        let w = all_true_world(&m);
        let (m2, w2) = m.intervene(&w, "lights_on").unwrap();
        assert!(m2.mechanism_for("lights_on").is_none());
        assert_eq!(m2.pinned().get("lights_on"), Some(&false));
        assert_eq!(w2.value("lights_on"), Some(false));
        assert_eq!(w2.value("people_can_see"), Some(false));
        assert_eq!(w2.value("people_leave_house"), Some(false));
        assert_eq!(w2.value("people_are_safe"), Some(false));
        // the original pair is untouched
        assert!(m.mechanism_for("lights_on").is_some());
        assert_eq!(w.value("lights_on"), Some(true));
    }

    #[test]
    fn intervening_twice_on_an_action_is_an_involution() {
        let m = smart_home();
        let w = all_true_world(&m);
        let (m2, w2) = m.intervene(&w, "turn_lights_on").unwrap();
        let (_, w3) = m2.intervene(&w2, "turn_lights_on").unwrap();
        assert_eq!(w3.assignment(), w.assignment());
        assert_eq!(w3.derived(), w.derived());
    }

    #[test]
    fn intervening_on_background_fire() {
        let m = smart_home();
        let w = all_true_world(&m);
        let (m2, w2) = m.intervene(&w, "fire").unwrap();
        assert_eq!(w2.value("danger_in_house"), Some(false));
        // safety persists through the evacuation route
        assert_eq!(w2.value("people_are_safe"), Some(true));
        // mechanisms unchanged for assignment-level interventions
        assert_eq!(m2.mechanisms(), m.mechanisms());
    }

    #[test]
    fn lights_on_is_cause_of_safety_at_night() {
        let m = smart_home();
        let w = all_true_world(&m);
        let witness = m.is_cause(&w, "lights_on", "people_are_safe").unwrap();
        let witness = witness.expect("lights_on should be a but-for cause");
        assert_eq!(witness.factual.value("people_are_safe"), Some(true));
        assert_eq!(witness.counterfactual.value("people_are_safe"), Some(false));
    }

    #[test]
    fn danger_is_not_a_cause_of_safety() {
        let m = smart_home();
        let w = all_true_world(&m);
        // flipping danger_in_house leaves people_are_safe true via people_leave_house
        let witness = m.is_cause(&w, "danger_in_house", "people_are_safe").unwrap();
        assert!(witness.is_none());
    }

    #[test]
    fn false_cause_fails_factuality() {
        let m = smart_home();
        let w = m
            .evaluate(&assignment(&[
                ("turn_lights_on", false),
                ("evacuation_attempt", true),
                ("fire", true),
                ("daylight", false),
            ]))
            .unwrap();
        let witness = m.is_cause(&w, "turn_lights_on", "people_are_safe").unwrap();
        assert!(witness.is_none());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let m = smart_home();
        let a = assignment(&[
            ("turn_lights_on", true),
            ("evacuation_attempt", false),
            ("fire", true),
            ("daylight", false),
        ]);
        assert_eq!(m.evaluate(&a).unwrap(), m.evaluate(&a).unwrap());
    }

    #[test]
    fn derived_values_satisfy_their_mechanisms() {
        let m = smart_home();
        let w = all_true_world(&m);
        for mech in m.mechanisms() {
            let expected = mech
                .antecedent
                .eval(&|name| w.value(name))
                .unwrap();
            assert_eq!(w.value(&mech.consequent), Some(expected), "{}", mech.consequent);
        }
    }

    #[test]
    fn formula_display_uses_minimal_parentheses() {
        let f = Formula::or(
            Formula::var("people_leave_house"),
            Formula::not(Formula::var("danger_in_house")),
        );
        assert_eq!(f.to_string(), "people_leave_house or not danger_in_house");
        let g = Formula::and(
            Formula::or(Formula::var("a"), Formula::var("b")),
            Formula::var("c"),
        );
        assert_eq!(g.to_string(), "(a or b) and c");
    }
}
