//! Reference implementations and deterministic generators for tests.
//!
//! Everything here recomputes results straight from the definitions, by a
//! different route than the production code: worlds are evaluated by
//! iterating all mechanisms to a fixpoint instead of in topological order,
//! permissibility is decided by direct quantifier enumeration with a local
//! intervention routine, and plan comparison sorts violation ranks instead
//! of bucketing counts. Production crates use this one only as a
//! dev-dependency.

use ethica_core::causal::{ActionMode, CausalAgencyModel, Formula, VarKind};
use ethica_core::governor::{LawAnnotationSet, PairPreference};
use ethica_core::policy::{EthicalPolicy, PlanCandidate, PlanOrdering};
use std::collections::{BTreeMap, BTreeSet};

/// Small xorshift64* generator so tests are reproducible without extra
/// dependencies.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(if seed == 0 { 0x9e3779b97f4a7c15 } else { seed })
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545f4914f6cdd1d)
    }

    /// Uniform value in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform choice from a slice.
    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

// ── Reference world evaluation ───────────────────────────────────────────

/// Evaluates the consequences by running every mechanism over and over until
/// nothing changes, starting from all-false. Acyclic mechanisms converge to
/// their unique fixpoint within |C| passes regardless of evaluation order.
///
/// Panics if the valuation has not stabilised after |C| + 1 passes, which
/// only happens on cyclic mechanism sets.
pub fn fixpoint_evaluate(
    model: &CausalAgencyModel,
    assignment: &BTreeMap<String, bool>,
) -> BTreeMap<String, bool> {
    let mechanisms: Vec<(String, Formula)> = model
        .mechanisms()
        .iter()
        .map(|m| (m.consequent.clone(), m.antecedent.clone()))
        .collect();
    fixpoint_with(&mechanisms, model.pinned(), assignment, model.consequences())
}

fn fixpoint_with(
    mechanisms: &[(String, Formula)],
    pinned: &BTreeMap<String, bool>,
    assignment: &BTreeMap<String, bool>,
    consequences: Vec<&str>,
) -> BTreeMap<String, bool> {
    let mut derived: BTreeMap<String, bool> =
        consequences.iter().map(|c| (c.to_string(), false)).collect();
    for (name, value) in pinned {
        derived.insert(name.clone(), *value);
    }
    for _ in 0..=consequences.len() {
        let previous = derived.clone();
        for (consequent, antecedent) in mechanisms {
            let value = antecedent
                .eval(&|name| {
                    assignment
                        .get(name)
                        .copied()
                        .or_else(|| previous.get(name).copied())
                })
                .expect("reference evaluation hit an undeclared variable");
            derived.insert(consequent.clone(), value);
        }
        for (name, value) in pinned {
            derived.insert(name.clone(), *value);
        }
        if derived == previous {
            return derived;
        }
    }
    panic!("mechanisms did not reach a fixpoint (cycle?)");
}

// ── Reference permissibility ─────────────────────────────────────────────

/// Condition outcomes recomputed directly from the definitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceVerdict {
    /// Conditions 1–3 per true action.
    pub per_action: BTreeMap<String, [bool; 3]>,
    pub condition4: bool,
    /// Harmful-cause/non-harmful-effect pairs violating condition 4.
    pub condition4_pairs: BTreeSet<(String, String)>,
    pub condition5: bool,
    pub utility_sum: f64,
    pub permissible: bool,
}

/// Checks the five conditions on the world reached from `assignment`,
/// enumerating every quantifier domain explicitly and intervening through a
/// local copy of the mechanisms.
pub fn reference_verdict(
    model: &CausalAgencyModel,
    assignment: &BTreeMap<String, bool>,
) -> ReferenceVerdict {
    let mechanisms: Vec<(String, Formula)> = model
        .mechanisms()
        .iter()
        .map(|m| (m.consequent.clone(), m.antecedent.clone()))
        .collect();
    let derived = fixpoint_with(&mechanisms, model.pinned(), assignment, model.consequences());
    let holds = |name: &str| -> bool {
        assignment
            .get(name)
            .or_else(|| derived.get(name))
            .copied()
            .unwrap_or(false)
    };

    let mut per_action = BTreeMap::new();
    for action in model.actions() {
        if !holds(action) {
            continue;
        }
        let intended: Vec<&str> = model
            .intentions()
            .iter()
            .filter(|(a, _)| a == action)
            .map(|(_, c)| c.as_str())
            .collect();
        let c1 = model.utility(action) >= 0.0;
        let c2 = intended.iter().all(|c| model.utility(c) >= 0.0);
        let c3 = intended.iter().any(|c| model.utility(c) >= 0.0);
        per_action.insert(action.to_string(), [c1, c2, c3]);
    }

    // condition 4: flip each candidate cause and see which effects survive
    let mut condition4_pairs = BTreeSet::new();
    let causes: Vec<String> = model
        .actions()
        .into_iter()
        .chain(model.consequences())
        .map(str::to_string)
        .collect();
    for cause in &causes {
        if model.utility(cause) >= 0.0 || !holds(cause) {
            continue;
        }
        // intervention: flip assigned variables; unmechanise and pin consequences
        let counter_derived = if assignment.contains_key(cause) {
            let mut flipped = assignment.clone();
            flipped.insert(cause.clone(), !assignment[cause]);
            fixpoint_with(&mechanisms, model.pinned(), &flipped, model.consequences())
        } else {
            let remaining: Vec<(String, Formula)> = mechanisms
                .iter()
                .filter(|(c, _)| c != cause)
                .cloned()
                .collect();
            let mut pins = model.pinned().clone();
            pins.insert(cause.clone(), !derived[cause]);
            fixpoint_with(&remaining, &pins, assignment, model.consequences())
        };
        for effect in model.consequences() {
            if effect == cause || model.utility(effect) < 0.0 {
                continue;
            }
            let factual = derived.get(effect).copied().unwrap_or(false);
            let counterfactual = counter_derived.get(effect).copied().unwrap_or(false);
            if factual && !counterfactual {
                condition4_pairs.insert((cause.clone(), effect.to_string()));
            }
        }
    }
    let condition4 = condition4_pairs.is_empty();

    let utility_sum: f64 = model
        .consequences()
        .into_iter()
        .filter(|c| derived[*c])
        .map(|c| model.utility(c))
        .sum();
    let condition5 = utility_sum > 0.0;

    let permissible = per_action.values().flatten().all(|b| *b) && condition4 && condition5;

    ReferenceVerdict {
        per_action,
        condition4,
        condition4_pairs,
        condition5,
        utility_sum,
        permissible,
    }
}

// ── Reference plan comparison ────────────────────────────────────────────

/// Compares two plans by their violation ranks sorted most severe first:
/// at the first position where the sequences differ, the smaller rank wins,
/// and a plan whose sequence is a prefix of the other's wins.
pub fn reference_compare(
    policy: &EthicalPolicy,
    a: &PlanCandidate,
    b: &PlanCandidate,
) -> PlanOrdering {
    let ranks = |plan: &PlanCandidate| -> Vec<i64> {
        let mut ranks: Vec<i64> = plan
            .violations
            .iter()
            .map(|id| policy.rank_of(id).expect("violation of unknown principle"))
            .collect();
        ranks.sort_unstable_by(|x, y| y.cmp(x));
        ranks
    };
    let ra = ranks(a);
    let rb = ranks(b);
    for (x, y) in ra.iter().zip(rb.iter()) {
        if x < y {
            return PlanOrdering::ABetter;
        }
        if x > y {
            return PlanOrdering::BBetter;
        }
    }
    match ra.len().cmp(&rb.len()) {
        std::cmp::Ordering::Less => PlanOrdering::ABetter,
        std::cmp::Ordering::Greater => PlanOrdering::BBetter,
        std::cmp::Ordering::Equal => PlanOrdering::Equal,
    }
}

// ── Reference task selection ─────────────────────────────────────────────

/// Lexicographic winner of a pair from the raw annotation cells: positive
/// means the first task wins, negative the second, zero neither.
pub fn reference_pair_winner(annotations: &LawAnnotationSet, a: usize, b: usize) -> i8 {
    for law in 0..annotations.n_laws() {
        match annotations.preference(law, a, b).unwrap() {
            PairPreference::FirstPreferred => return 1,
            PairPreference::SecondPreferred => return -1,
            PairPreference::Incomparable => {}
        }
    }
    0
}

/// Undominated task indices under the lexicographic pair comparison.
pub fn reference_undominated(annotations: &LawAnnotationSet) -> Vec<usize> {
    let n = annotations.n_tasks();
    (0..n)
        .filter(|&t| (0..n).all(|o| o == t || reference_pair_winner(annotations, o, t) != 1))
        .collect()
}

// ── Generators ───────────────────────────────────────────────────────────

/// Shape limits for generated models.
pub struct ModelShape {
    pub max_actions: usize,
    pub max_background: usize,
    pub max_consequences: usize,
    pub max_total: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_actions: 4,
            max_background: 3,
            max_consequences: 6,
            max_total: 10,
        }
    }
}

/// Generates a valid model: variable counts within the shape limits,
/// acyclic mechanisms over earlier-generated consequences, integer-valued
/// utilities in -3..=3, and a random intention relation. Consequences are
/// declared in a shuffled order so declaration order disagrees with
/// dependency order.
pub fn gen_model(rng: &mut Rng, shape: &ModelShape, name: &str) -> CausalAgencyModel {
    let n_actions = rng.below(shape.max_actions + 1);
    let n_background = rng.below(shape.max_background + 1);
    let remaining = shape
        .max_total
        .saturating_sub(n_actions + n_background)
        .min(shape.max_consequences);
    let n_consequences = rng.below(remaining + 1);

    let actions: Vec<String> = (0..n_actions).map(|i| format!("a{i}")).collect();
    let background: Vec<String> = (0..n_background).map(|i| format!("b{i}")).collect();
    let consequences: Vec<String> = (0..n_consequences).map(|i| format!("c{i}")).collect();

    let mut model = CausalAgencyModel::new(name);
    for a in &actions {
        model.add_action(a);
    }
    for b in &background {
        model.add_background(b, rng.bool());
    }

    // declare consequences in a shuffled order
    let mut declaration: Vec<usize> = (0..n_consequences).collect();
    for i in (1..declaration.len()).rev() {
        let j = rng.below(i + 1);
        declaration.swap(i, j);
    }
    for &i in &declaration {
        model.add_consequence(&consequences[i]);
    }

    // mechanism for c_i may reference actions, background, and c_j with j < i
    for (i, c) in consequences.iter().enumerate() {
        let mut pool: Vec<String> = actions.iter().chain(background.iter()).cloned().collect();
        pool.extend(consequences[..i].iter().cloned());
        model.add_mechanism(c, gen_formula(rng, &pool, 3));
    }

    let mut all_vars: Vec<String> = actions.iter().chain(background.iter()).cloned().collect();
    all_vars.extend(consequences.iter().cloned());
    for v in &all_vars {
        if rng.below(3) == 0 {
            model.set_utility(v, (rng.below(7) as f64) - 3.0);
        }
    }

    for a in &actions {
        for c in &consequences {
            if rng.below(4) == 0 {
                model.add_intention(a, c);
            }
        }
    }

    model.set_action_mode(if rng.bool() {
        ActionMode::PowerSet
    } else {
        ActionMode::ExactlyOne
    });
    model
}

/// Random formula of bounded depth over the given variable pool.
pub fn gen_formula(rng: &mut Rng, pool: &[String], depth: usize) -> Formula {
    if depth == 0 || pool.is_empty() || rng.below(3) == 0 {
        if pool.is_empty() || rng.below(8) == 0 {
            return if rng.bool() { Formula::True } else { Formula::False };
        }
        return Formula::var(rng.pick(pool).clone());
    }
    match rng.below(3) {
        0 => Formula::not(gen_formula(rng, pool, depth - 1)),
        1 => Formula::and(
            gen_formula(rng, pool, depth - 1),
            gen_formula(rng, pool, depth - 1),
        ),
        _ => Formula::or(
            gen_formula(rng, pool, depth - 1),
            gen_formula(rng, pool, depth - 1),
        ),
    }
}

/// Random total assignment of the model's background variables.
pub fn gen_background(rng: &mut Rng, model: &CausalAgencyModel) -> BTreeMap<String, bool> {
    model
        .background()
        .into_iter()
        .map(|b| (b.to_string(), rng.bool()))
        .collect()
}

/// Random total assignment of the model's actions and background variables.
pub fn gen_assignment(rng: &mut Rng, model: &CausalAgencyModel) -> BTreeMap<String, bool> {
    model
        .variables()
        .iter()
        .filter(|v| v.kind != VarKind::Consequence)
        .map(|v| (v.name.clone(), rng.bool()))
        .collect()
}

/// Random policy with up to `max_principles` principles; ranks may tie.
/// The vacuous top element is placed canonically.
pub fn gen_policy(rng: &mut Rng, max_principles: usize, name: &str) -> EthicalPolicy {
    let n = 1 + rng.below(max_principles.max(1));
    let mut policy = EthicalPolicy::new(name);
    for i in 0..n {
        let rank = rng.below(n + 2) as i64;
        policy.add_principle(format!("p{i}"), format!("principle {i}"), rank);
    }
    policy.insert_vacuous_top();
    policy
}

/// Random plan violating up to three principles of the policy, possibly
/// repeating one.
pub fn gen_plan(rng: &mut Rng, policy: &EthicalPolicy, id: impl Into<String>) -> PlanCandidate {
    let ids: Vec<String> = policy.non_vacuous().map(|p| p.id.clone()).collect();
    let mut violations = Vec::new();
    if !ids.is_empty() {
        for _ in 0..rng.below(4) {
            violations.push(rng.pick(&ids).clone());
        }
    }
    PlanCandidate {
        id: id.into(),
        violations,
    }
}

/// Uniformly random annotation set.
pub fn gen_annotations(rng: &mut Rng, n_tasks: usize, n_laws: usize) -> LawAnnotationSet {
    let mut set = LawAnnotationSet::new(n_tasks, n_laws);
    for law in 0..n_laws {
        for a in 0..n_tasks {
            for b in (a + 1)..n_tasks {
                let pref = match rng.below(3) {
                    0 => PairPreference::FirstPreferred,
                    1 => PairPreference::SecondPreferred,
                    _ => PairPreference::Incomparable,
                };
                set.set(law, a, b, pref).unwrap();
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_are_valid() {
        let mut rng = Rng::new(7);
        for _ in 0..200 {
            let model = gen_model(&mut rng, &ModelShape::default(), "generated");
            let report = model.validate();
            assert!(report.is_valid(), "generated invalid model: {report}");
        }
    }

    #[test]
    fn fixpoint_evaluation_matches_hand_truth_table() {
        let mut m = CausalAgencyModel::new("tiny");
        m.add_action("a");
        m.add_consequence("x");
        m.add_consequence("y");
        m.add_mechanism("y", Formula::and(Formula::var("a"), Formula::var("x")));
        m.add_mechanism("x", Formula::var("a"));
        let assignment: BTreeMap<String, bool> = [("a".to_string(), true)].into_iter().collect();
        let derived = fixpoint_evaluate(&m, &assignment);
        assert!(derived["x"]);
        assert!(derived["y"]);
    }

    #[test]
    fn reference_compare_is_consistent_with_itself() {
        let mut rng = Rng::new(11);
        let policy = gen_policy(&mut rng, 4, "generated_policy");
        for i in 0..100 {
            let a = gen_plan(&mut rng, &policy, format!("a{i}"));
            let b = gen_plan(&mut rng, &policy, format!("b{i}"));
            let ab = reference_compare(&policy, &a, &b);
            let ba = reference_compare(&policy, &b, &a);
            assert_eq!(ab, ba.flipped());
        }
    }
}
