//! Permissibility under the principle of double effect.
//!
//! A world is permissible when every action it makes true satisfies the
//! per-action conditions and the world as a whole satisfies the causal-means
//! and net-utility conditions:
//!
//! 1. the action itself is not harmful: `u(a) >= 0`;
//! 2. no intended consequence of the action is harmful:
//!    for every `(a, c)` in the intention relation, `u(c) >= 0`;
//! 3. the action intends some consequence that is not harmful:
//!    some `(a, c)` in the intention relation has `u(c) >= 0`;
//! 4. no harmful variable is a causal means to a non-harmful consequence:
//!    for every action or consequence `x` with `u(x) < 0` and every
//!    consequence `y`, `x ⇝ y` implies `u(y) < 0`;
//! 5. the summed utility of the true consequences is strictly positive.
//!
//! Every failing condition is reported with witnesses; checking never stops
//! at the first failure.

use crate::causal::{ActionMode, CausalAgencyModel, CausalWitness, EvalError, VarKind, World};
use serde::Serialize;
use std::collections::BTreeMap;

/// Evidence attached to a condition result.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionWitness {
    /// A variable and its utility (conditions 1–3).
    Utility { variable: String, utility: f64 },
    /// A harmful cause of a non-harmful effect (condition 4).
    CausalMeans {
        cause: String,
        cause_utility: f64,
        effect: String,
        effect_utility: f64,
        witness: CausalWitness,
    },
    /// The net utility and its contributions (condition 5).
    UtilitySum {
        sum: f64,
        contributions: Vec<(String, f64)>,
    },
}

/// Outcome of a single permissibility condition.
///
/// Witnesses are non-empty exactly when they explain the outcome: on failure
/// for conditions 1, 2, 4 and 5, and on success for condition 3 (the
/// satisfying intended consequences).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub index: u8,
    pub passed: bool,
    pub witnesses: Vec<ConditionWitness>,
}

/// Permissibility of one world: conditions 1–3 per true action, conditions
/// 4–5 for the world, and the overall verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermissibilityVerdict {
    pub world: World,
    /// Conditions 1–3, keyed by each action the world makes true.
    pub per_action: BTreeMap<String, Vec<ConditionResult>>,
    /// Conditions 4 and 5.
    pub world_conditions: Vec<ConditionResult>,
    /// Net utility of the true consequences (the condition-5 sum).
    pub utility_sum: f64,
    pub permissible: bool,
}

impl PermissibilityVerdict {
    /// Action names the world makes true, in name order.
    pub fn true_actions(&self) -> Vec<&str> {
        self.per_action.keys().map(|s| s.as_str()).collect()
    }

    /// All condition results, per-action ones first.
    pub fn all_conditions(&self) -> impl Iterator<Item = &ConditionResult> {
        self.per_action
            .values()
            .flatten()
            .chain(self.world_conditions.iter())
    }
}

/// Generates the candidate worlds for a background assignment: one world per
/// action under [`ActionMode::ExactlyOne`], or one per action subset
/// (including the empty one) under [`ActionMode::PowerSet`].
///
/// Worlds are in canonical order: treating the i-th declared action as bit i,
/// action sets are enumerated as ascending bitmasks.
pub fn generate_worlds(
    model: &CausalAgencyModel,
    background: &BTreeMap<String, bool>,
) -> Result<Vec<World>, EvalError> {
    for name in background.keys() {
        match model.kind_of(name) {
            Some(VarKind::Background) => {}
            Some(_) => {
                return Err(EvalError::NotAnInput { name: name.clone() });
            }
            None => {
                return Err(EvalError::UnknownVariable { name: name.clone() });
            }
        }
    }
    let missing: Vec<String> = model
        .background()
        .into_iter()
        .filter(|b| !background.contains_key(*b))
        .map(str::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::PartialAssignment { names: missing });
    }

    let actions = model.actions();
    // a model without actions describes exactly one situation in any mode
    let masks: Vec<u64> = if actions.is_empty() {
        vec![0]
    } else {
        match model.action_mode() {
            ActionMode::ExactlyOne => (0..actions.len()).map(|i| 1u64 << i).collect(),
            ActionMode::PowerSet => {
                if actions.len() > 20 {
                    return Err(EvalError::TooLarge {
                        what: format!("power set of {} actions", actions.len()),
                    });
                }
                (0..(1u64 << actions.len())).collect()
            }
        }
    };

    let mut worlds = Vec::with_capacity(masks.len());
    for mask in masks {
        let mut assignment = background.clone();
        for (i, action) in actions.iter().enumerate() {
            assignment.insert(action.to_string(), mask & (1 << i) != 0);
        }
        worlds.push(model.evaluate(&assignment)?);
    }
    Ok(worlds)
}

/// Checks all five permissibility conditions on a world of `model`.
pub fn check_permissibility(
    model: &CausalAgencyModel,
    world: &World,
) -> Result<PermissibilityVerdict, EvalError> {
    // Reject worlds that do not belong to the model: the assignment must
    // cover exactly the actions and background variables and the derived
    // valuation must be the mechanisms' fixpoint.
    let recomputed = model.evaluate(world.assignment())?;
    if recomputed.derived() != world.derived() {
        return Err(EvalError::ForeignWorld {
            detail: "derived valuation does not match the model's mechanisms".to_string(),
        });
    }

    let mut per_action = BTreeMap::new();
    for action in model.actions() {
        if world.value(action) != Some(true) {
            continue;
        }
        per_action.insert(action.to_string(), action_conditions(model, action));
    }

    let condition4 = causal_means_condition(model, world)?;
    let (condition5, utility_sum) = net_utility_condition(model, world);

    let permissible = per_action
        .values()
        .flatten()
        .chain([&condition4, &condition5])
        .all(|c| c.passed);

    Ok(PermissibilityVerdict {
        world: world.clone(),
        per_action,
        world_conditions: vec![condition4, condition5],
        utility_sum,
        permissible,
    })
}

/// Conditions 1–3 for one action.
fn action_conditions(model: &CausalAgencyModel, action: &str) -> Vec<ConditionResult> {
    let action_utility = model.utility(action);
    let condition1 = ConditionResult {
        index: 1,
        passed: action_utility >= 0.0,
        witnesses: if action_utility >= 0.0 {
            Vec::new()
        } else {
            vec![ConditionWitness::Utility {
                variable: action.to_string(),
                utility: action_utility,
            }]
        },
    };

    let intended: Vec<(&str, f64)> = model
        .intentions()
        .iter()
        .filter(|(a, _)| a == action)
        .map(|(_, c)| (c.as_str(), model.utility(c)))
        .collect();

    let harmful: Vec<ConditionWitness> = intended
        .iter()
        .filter(|(_, u)| *u < 0.0)
        .map(|(c, u)| ConditionWitness::Utility {
            variable: c.to_string(),
            utility: *u,
        })
        .collect();
    let condition2 = ConditionResult {
        index: 2,
        passed: harmful.is_empty(),
        witnesses: harmful,
    };

    let acceptable: Vec<ConditionWitness> = intended
        .iter()
        .filter(|(_, u)| *u >= 0.0)
        .map(|(c, u)| ConditionWitness::Utility {
            variable: c.to_string(),
            utility: *u,
        })
        .collect();
    let condition3 = ConditionResult {
        index: 3,
        passed: !acceptable.is_empty(),
        witnesses: acceptable,
    };

    vec![condition1, condition2, condition3]
}

/// Condition 4: every harmful action or consequence that is a but-for cause
/// of some consequence may only cause harmful consequences.
fn causal_means_condition(
    model: &CausalAgencyModel,
    world: &World,
) -> Result<ConditionResult, EvalError> {
    let mut pairs = Vec::new();
    let causes: Vec<&str> = model
        .actions()
        .into_iter()
        .chain(model.consequences())
        .collect();
    for cause in causes {
        let cause_utility = model.utility(cause);
        if cause_utility >= 0.0 {
            continue;
        }
        for effect in model.consequences() {
            if effect == cause {
                continue;
            }
            let effect_utility = model.utility(effect);
            if effect_utility < 0.0 {
                continue;
            }
            if let Some(witness) = model.is_cause(world, cause, effect)? {
                pairs.push(ConditionWitness::CausalMeans {
                    cause: cause.to_string(),
                    cause_utility,
                    effect: effect.to_string(),
                    effect_utility,
                    witness,
                });
            }
        }
    }
    Ok(ConditionResult {
        index: 4,
        passed: pairs.is_empty(),
        witnesses: pairs,
    })
}

/// Condition 5: the utilities of the true consequences must sum above zero.
fn net_utility_condition(model: &CausalAgencyModel, world: &World) -> (ConditionResult, f64) {
    let contributions: Vec<(String, f64)> = model
        .consequences()
        .into_iter()
        .filter(|c| world.value(c) == Some(true))
        .map(|c| (c.to_string(), model.utility(c)))
        .collect();
    let sum: f64 = contributions.iter().map(|(_, u)| u).sum();
    let passed = sum > 0.0;
    let result = ConditionResult {
        index: 5,
        passed,
        witnesses: if passed {
            Vec::new()
        } else {
            vec![ConditionWitness::UtilitySum { sum, contributions }]
        },
    };
    (result, sum)
}

/// Convenience: generates all candidate worlds and checks each, returning
/// verdicts in canonical world order.
pub fn permissible_worlds(
    model: &CausalAgencyModel,
    background: &BTreeMap<String, bool>,
) -> Result<Vec<PermissibilityVerdict>, EvalError> {
    generate_worlds(model, background)?
        .iter()
        .map(|w| check_permissibility(model, w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::Formula;
    use crate::fixtures::smart_home;

    fn fire_at_night() -> BTreeMap<String, bool> {
        [("fire".to_string(), true), ("daylight".to_string(), false)]
            .into_iter()
            .collect()
    }

    fn condition<'a>(
        verdict: &'a PermissibilityVerdict,
        action: &str,
        index: u8,
    ) -> &'a ConditionResult {
        verdict.per_action[action]
            .iter()
            .find(|c| c.index == index)
            .unwrap()
    }

    fn world_condition(verdict: &PermissibilityVerdict, index: u8) -> &ConditionResult {
        verdict
            .world_conditions
            .iter()
            .find(|c| c.index == index)
            .unwrap()
    }

    #[test]
    fn power_set_mode_generates_four_worlds() {
        let m = smart_home();
        let worlds = generate_worlds(&m, &fire_at_night()).unwrap();
        assert_eq!(worlds.len(), 4);
        // canonical order: ascending action bitmask
        assert_eq!(worlds[0].value("turn_lights_on"), Some(false));
        assert_eq!(worlds[0].value("evacuation_attempt"), Some(false));
        assert_eq!(worlds[3].value("turn_lights_on"), Some(true));
        assert_eq!(worlds[3].value("evacuation_attempt"), Some(true));
    }

    #[test]
    fn exactly_one_mode_generates_one_world_per_action() {
        let mut m = smart_home();
        m.set_action_mode(ActionMode::ExactlyOne);
        let worlds = generate_worlds(&m, &fire_at_night()).unwrap();
        assert_eq!(worlds.len(), 2);
        for w in &worlds {
            let trues = m
                .actions()
                .iter()
                .filter(|a| w.value(a) == Some(true))
                .count();
            assert_eq!(trues, 1);
        }
    }

    #[test]
    fn singleton_power_set_has_two_worlds() {
        let mut m = CausalAgencyModel::new("one_action");
        m.add_action("a");
        m.set_action_mode(ActionMode::PowerSet);
        let worlds = generate_worlds(&m, &BTreeMap::new()).unwrap();
        assert_eq!(worlds.len(), 2);
    }

    #[test]
    fn both_actions_world_fails_on_causal_means() {
        let m = smart_home();
        let worlds = generate_worlds(&m, &fire_at_night()).unwrap();
        let verdict = check_permissibility(&m, &worlds[3]).unwrap();
        assert!(!verdict.permissible);

        // resource cost of the lights is an intended consequence: condition 2
        assert!(!condition(&verdict, "turn_lights_on", 2).passed);

        // the lit lights are a harmful cause of safety: condition 4
        let c4 = world_condition(&verdict, 4);
        assert!(!c4.passed);
        let has_safety_pair = c4.witnesses.iter().any(|w| match w {
            ConditionWitness::CausalMeans {
                cause,
                cause_utility,
                effect,
                effect_utility,
                ..
            } => {
                cause == "lights_on"
                    && effect == "people_are_safe"
                    && *cause_utility == -1.0
                    && *effect_utility == 10.0
            }
            _ => false,
        });
        assert!(has_safety_pair, "missing lights_on ⇝ people_are_safe witness");
    }

    #[test]
    fn evacuation_alone_fails_net_utility() {
        let m = smart_home();
        let worlds = generate_worlds(&m, &fire_at_night()).unwrap();
        // mask order: {} , {turn_lights_on}, {evacuation_attempt}, {both}
        let verdict = check_permissibility(&m, &worlds[2]).unwrap();
        assert!(!verdict.permissible);
        let c5 = world_condition(&verdict, 5);
        assert!(!c5.passed);
        assert_eq!(verdict.utility_sum, 0.0);
        match &c5.witnesses[0] {
            ConditionWitness::UtilitySum { sum, .. } => assert_eq!(*sum, 0.0),
            other => panic!("expected utility sum witness, got {other:?}"),
        }
    }

    #[test]
    fn all_positive_single_action_world_is_permissible() {
        let mut m = CausalAgencyModel::new("benign");
        m.add_action("a");
        m.add_consequence("c");
        m.add_mechanism("c", Formula::var("a"));
        m.set_utility("c", 1.0);
        m.add_intention("a", "c");
        let worlds = generate_worlds(&m, &BTreeMap::new()).unwrap();
        let verdict = check_permissibility(&m, &worlds[0]).unwrap();
        assert!(verdict.permissible);
        assert!(verdict.all_conditions().all(|c| c.passed));
    }

    #[test]
    fn all_four_smart_home_worlds_are_impermissible() {
        let m = smart_home();
        let verdicts = permissible_worlds(&m, &fire_at_night()).unwrap();
        assert_eq!(verdicts.len(), 4);
        assert!(verdicts.iter().all(|v| !v.permissible));
    }

    #[test]
    fn model_without_actions_yields_one_world_driven_by_world_conditions() {
        let mut m = CausalAgencyModel::new("no_actions");
        m.add_background("b", true);
        m.add_consequence("c");
        m.add_mechanism("c", Formula::var("b"));
        m.set_utility("c", 2.0);
        let background: BTreeMap<String, bool> = [("b".to_string(), true)].into_iter().collect();
        for mode in [ActionMode::PowerSet, ActionMode::ExactlyOne] {
            m.set_action_mode(mode);
            let verdicts = permissible_worlds(&m, &background).unwrap();
            assert_eq!(verdicts.len(), 1);
            assert!(verdicts[0].per_action.is_empty());
            assert!(verdicts[0].permissible);
        }
    }

    #[test]
    fn neutral_lighting_cost_repairs_the_both_actions_world() {
        let mut m = smart_home();
        m.set_utility("lights_on", 0.0);
        let verdicts = permissible_worlds(&m, &fire_at_night()).unwrap();
        assert_eq!(verdicts.len(), 4);
        let both = &verdicts[3];
        assert!(both.permissible);
        assert!(both.all_conditions().all(|c| c.passed));
        assert_eq!(both.utility_sum, 10.0);
        // the other three worlds stay impermissible
        assert!(verdicts[..3].iter().all(|v| !v.permissible));
    }

    #[test]
    fn condition4_witnesses_are_sound() {
        let m = smart_home();
        let verdicts = permissible_worlds(&m, &fire_at_night()).unwrap();
        for verdict in &verdicts {
            let c4 = world_condition(verdict, 4);
            for w in &c4.witnesses {
                let ConditionWitness::CausalMeans { cause, effect, .. } = w else {
                    panic!("condition 4 carries a non-causal witness");
                };
                assert!(m
                    .is_cause(&verdict.world, cause, effect)
                    .unwrap()
                    .is_some());
                assert!(m.utility(cause) < 0.0);
                assert!(m.utility(effect) >= 0.0);
            }
        }
    }

    #[test]
    fn foreign_world_is_rejected() {
        let m = smart_home();
        let mut other = CausalAgencyModel::new("other");
        other.add_action("x");
        let w = other
            .evaluate(&[("x".to_string(), true)].into_iter().collect())
            .unwrap();
        assert!(check_permissibility(&m, &w).is_err());
    }
}
