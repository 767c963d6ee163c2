//! Ethical policies and plan selection.
//!
//! A policy is a finite set of principles under a total severity preorder,
//! expressed as integer ranks: a higher rank is more unethical to violate and
//! equal ranks are equally unethical. Every policy carries exactly one
//! vacuous principle, never violated by any plan, ranked strictly above all
//! others. Plans are compared by their violation multisets: counts are
//! bucketed by rank and compared lexicographically from the most severe rank
//! down, so one grave violation outweighs any number of lighter ones.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// The identifier used for the vacuous principle inserted by
/// [`EthicalPolicy::insert_vacuous_top`].
pub const VACUOUS_ID: &str = "vacuous";

/// A single ethical principle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Principle {
    pub id: String,
    pub description: String,
    pub is_vacuous: bool,
}

/// A named set of principles with a total severity preorder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EthicalPolicy {
    name: String,
    principles: Vec<Principle>,
    rank: BTreeMap<String, i64>,
}

impl EthicalPolicy {
    pub fn new(name: impl Into<String>) -> Self {
        EthicalPolicy {
            name: name.into(),
            principles: Vec::new(),
            rank: BTreeMap::new(),
        }
    }

    pub fn add_principle(&mut self, id: impl Into<String>, description: impl Into<String>, rank: i64) {
        let id = id.into();
        self.rank.insert(id.clone(), rank);
        self.principles.push(Principle {
            id,
            description: description.into(),
            is_vacuous: false,
        });
    }

    /// Inserts the vacuous principle one rank above the current maximum.
    pub fn insert_vacuous_top(&mut self) {
        let top = self.rank.values().copied().max().unwrap_or(0) + 1;
        self.rank.insert(VACUOUS_ID.to_string(), top);
        self.principles.push(Principle {
            id: VACUOUS_ID.to_string(),
            description: "vacuously satisfied".to_string(),
            is_vacuous: true,
        });
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn principles(&self) -> &[Principle] {
        &self.principles
    }

    /// Principles that plans can actually violate, in declaration order.
    pub fn non_vacuous(&self) -> impl Iterator<Item = &Principle> {
        self.principles.iter().filter(|p| !p.is_vacuous)
    }

    pub fn rank_of(&self, id: &str) -> Option<i64> {
        self.rank.get(id).copied()
    }

    pub fn principle(&self, id: &str) -> Option<&Principle> {
        self.principles.iter().find(|p| p.id == id)
    }

    /// Reports every structural violation; empty means valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen = BTreeMap::new();
        for p in &self.principles {
            if seen.insert(p.id.clone(), ()).is_some() {
                violations.push(PolicyViolation::DuplicateId { id: p.id.clone() });
            }
        }
        let vacuous: Vec<&Principle> = self.principles.iter().filter(|p| p.is_vacuous).collect();
        match vacuous.as_slice() {
            [] => violations.push(PolicyViolation::MissingVacuous),
            [v] => {
                let v_rank = self.rank_of(&v.id).unwrap_or(i64::MIN);
                for p in self.non_vacuous() {
                    if self.rank_of(&p.id).unwrap_or(i64::MIN) >= v_rank {
                        violations.push(PolicyViolation::VacuousNotStrictlyMaximal {
                            offender: p.id.clone(),
                        });
                    }
                }
            }
            more => violations.push(PolicyViolation::MultipleVacuous {
                ids: more.iter().map(|p| p.id.clone()).collect(),
            }),
        }
        ValidationReport { violations }
    }

    /// Violation counts bucketed by rank, for one plan.
    fn rank_counts(&self, plan: &PlanCandidate) -> Result<BTreeMap<i64, usize>, PolicyError> {
        let mut counts = BTreeMap::new();
        for id in &plan.violations {
            match self.principle(id) {
                None => {
                    return Err(PolicyError::UnknownPrinciple {
                        plan: plan.id.clone(),
                        id: id.clone(),
                    })
                }
                Some(p) if p.is_vacuous => {
                    return Err(PolicyError::VacuousViolated {
                        plan: plan.id.clone(),
                    })
                }
                Some(_) => {
                    *counts.entry(self.rank_of(id).unwrap()).or_insert(0) += 1;
                }
            }
        }
        Ok(counts)
    }

    /// The most severe rank at which the two plans' violation counts differ,
    /// with the count on each side. `None` when the multisets are rank-equal.
    fn first_difference(
        &self,
        a: &PlanCandidate,
        b: &PlanCandidate,
    ) -> Result<Option<(i64, usize, usize)>, PolicyError> {
        let counts_a = self.rank_counts(a)?;
        let counts_b = self.rank_counts(b)?;
        let mut ranks: Vec<i64> = counts_a.keys().chain(counts_b.keys()).copied().collect();
        ranks.sort_unstable();
        ranks.dedup();
        for rank in ranks.into_iter().rev() {
            let ca = counts_a.get(&rank).copied().unwrap_or(0);
            let cb = counts_b.get(&rank).copied().unwrap_or(0);
            if ca != cb {
                return Ok(Some((rank, ca, cb)));
            }
        }
        Ok(None)
    }
}

/// A candidate plan, identified by name, with the multiset of principle ids
/// it violates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanCandidate {
    pub id: String,
    pub violations: Vec<String>,
}

impl PlanCandidate {
    pub fn new(id: impl Into<String>, violations: &[&str]) -> Self {
        PlanCandidate {
            id: id.into(),
            violations: violations.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Result of comparing two plans under a policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanOrdering {
    ABetter,
    BBetter,
    Equal,
}

impl PlanOrdering {
    pub fn flipped(self) -> Self {
        match self {
            PlanOrdering::ABetter => PlanOrdering::BBetter,
            PlanOrdering::BBetter => PlanOrdering::ABetter,
            PlanOrdering::Equal => PlanOrdering::Equal,
        }
    }
}

/// Compares two plans: fewer violations at the most severe differing rank
/// wins; rank-equal violation counts compare equal.
pub fn compare_plans(
    policy: &EthicalPolicy,
    a: &PlanCandidate,
    b: &PlanCandidate,
) -> Result<PlanOrdering, PolicyError> {
    Ok(match policy.first_difference(a, b)? {
        None => PlanOrdering::Equal,
        Some((_, ca, cb)) if ca < cb => PlanOrdering::ABetter,
        Some(_) => PlanOrdering::BBetter,
    })
}

/// Why a candidate was not selected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectionReason {
    /// It has more violations than the winner at this rank.
    LostAtRank { rank: i64 },
    /// It ties the winner but appears later in the candidate list.
    TieBreak,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedCandidate {
    pub id: String,
    pub index: usize,
    pub reason: RejectionReason,
}

/// A selected plan and, for every rejected candidate, the rank at which it
/// lost to the winner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSelection {
    pub selected: PlanCandidate,
    pub selected_index: usize,
    pub rejected: Vec<RejectedCandidate>,
}

/// Picks a minimal candidate under [`compare_plans`], breaking ties by the
/// lowest list index. Selection is total for non-empty candidate lists.
pub fn select_plan(
    policy: &EthicalPolicy,
    candidates: &[PlanCandidate],
) -> Result<PlanSelection, PolicyError> {
    if candidates.is_empty() {
        return Err(PolicyError::NoCandidates);
    }
    let mut best = 0;
    for i in 1..candidates.len() {
        if compare_plans(policy, &candidates[i], &candidates[best])? == PlanOrdering::ABetter {
            best = i;
        }
    }
    let mut rejected = Vec::new();
    for (i, candidate) in candidates.iter().enumerate() {
        if i == best {
            continue;
        }
        let reason = match policy.first_difference(candidate, &candidates[best])? {
            Some((rank, _, _)) => RejectionReason::LostAtRank { rank },
            None => RejectionReason::TieBreak,
        };
        rejected.push(RejectedCandidate {
            id: candidate.id.clone(),
            index: i,
            reason,
        });
    }
    Ok(PlanSelection {
        selected: candidates[best].clone(),
        selected_index: best,
        rejected,
    })
}

/// A policy structure problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyViolation {
    DuplicateId { id: String },
    MissingVacuous,
    MultipleVacuous { ids: Vec<String> },
    VacuousNotStrictlyMaximal { offender: String },
}

impl fmt::Display for PolicyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyViolation::DuplicateId { id } => {
                write!(f, "principle '{id}' is declared more than once")
            }
            PolicyViolation::MissingVacuous => {
                write!(f, "policy has no vacuous principle")
            }
            PolicyViolation::MultipleVacuous { ids } => {
                write!(f, "policy has multiple vacuous principles: {}", ids.join(", "))
            }
            PolicyViolation::VacuousNotStrictlyMaximal { offender } => {
                write!(
                    f,
                    "principle '{offender}' is ranked at or above the vacuous principle"
                )
            }
        }
    }
}

/// Outcome of validating a policy; empty means valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<PolicyViolation>,
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

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("plan '{plan}' violates unknown principle '{id}'")]
    UnknownPrinciple { plan: String, id: String },
    #[error("plan '{plan}' violates the vacuous principle")]
    VacuousViolated { plan: String },
    #[error("no candidate plans to select from")]
    NoCandidates,
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Emergency-landing policy: harming people is gravest, damaging
    /// property the lightest concern.
    pub(crate) fn landing_policy() -> EthicalPolicy {
        let mut p = EthicalPolicy::new("ua_policy");
        p.add_principle("f1", "do not harm people", 4);
        p.add_principle("f2", "do not harm animals", 3);
        p.add_principle("f3", "do not damage self", 2);
        p.add_principle("f4", "do not damage property", 1);
        p.insert_vacuous_top();
        p
    }

    fn landing_plans() -> Vec<PlanCandidate> {
        vec![
            PlanCandidate::new("power_line_field", &["f4"]),
            PlanCandidate::new("people_field", &["f1"]),
            PlanCandidate::new("road", &["f4"]),
            PlanCandidate::new("empty_field", &[]),
        ]
    }

    #[test]
    fn landing_policy_is_valid() {
        let report = landing_policy().validate();
        assert!(report.is_valid(), "unexpected violations: {report}");
    }

    #[test]
    fn missing_vacuous_is_reported() {
        let mut p = EthicalPolicy::new("bare");
        p.add_principle("f1", "", 1);
        assert!(p
            .validate()
            .violations
            .contains(&PolicyViolation::MissingVacuous));
    }

    #[test]
    fn vacuous_tied_with_a_principle_is_reported() {
        let mut p = EthicalPolicy::new("tied");
        p.add_principle("f1", "", 1);
        p.insert_vacuous_top();
        p.add_principle("f2", "", 2); // same rank as the vacuous principle
        assert!(p.validate().violations.iter().any(|v| matches!(
            v,
            PolicyViolation::VacuousNotStrictlyMaximal { offender } if offender == "f2"
        )));
    }

    #[test]
    fn gravity_dominates_number() {
        let policy = landing_policy();
        let a = PlanCandidate::new("a", &["f1"]);
        let b = PlanCandidate::new("b", &["f4"]);
        assert_eq!(compare_plans(&policy, &a, &b).unwrap(), PlanOrdering::BBetter);
        // even many light violations beat one grave violation
        let c = PlanCandidate::new("c", &["f4", "f4", "f4"]);
        assert_eq!(compare_plans(&policy, &a, &c).unwrap(), PlanOrdering::BBetter);
    }

    #[test]
    fn no_violations_dominates() {
        let policy = landing_policy();
        let a = PlanCandidate::new("a", &[]);
        let b = PlanCandidate::new("b", &["f4"]);
        assert_eq!(compare_plans(&policy, &a, &b).unwrap(), PlanOrdering::ABetter);
    }

    #[test]
    fn equal_gravity_fewer_violations_wins() {
        let policy = landing_policy();
        let a = PlanCandidate::new("a", &["f4"]);
        let b = PlanCandidate::new("b", &["f4", "f4"]);
        assert_eq!(compare_plans(&policy, &a, &b).unwrap(), PlanOrdering::ABetter);
    }

    #[test]
    fn all_plans_available_selects_the_empty_field() {
        let policy = landing_policy();
        let selection = select_plan(&policy, &landing_plans()).unwrap();
        assert_eq!(selection.selected.id, "empty_field");
        for r in &selection.rejected {
            assert!(matches!(r.reason, RejectionReason::LostAtRank { .. }));
        }
    }

    #[test]
    fn road_is_preferred_over_the_people_field() {
        let policy = landing_policy();
        let candidates = vec![
            PlanCandidate::new("people_field", &["f1"]),
            PlanCandidate::new("road", &["f4"]),
        ];
        let selection = select_plan(&policy, &candidates).unwrap();
        assert_eq!(selection.selected.id, "road");
        assert_eq!(
            selection.rejected[0].reason,
            RejectionReason::LostAtRank { rank: 4 }
        );
    }

    #[test]
    fn single_candidate_is_always_selected() {
        let policy = landing_policy();
        let candidates = vec![PlanCandidate::new("people_field", &["f1"])];
        let selection = select_plan(&policy, &candidates).unwrap();
        assert_eq!(selection.selected.id, "people_field");
        assert!(selection.rejected.is_empty());
    }

    #[test]
    fn ties_break_by_lowest_index() {
        let policy = landing_policy();
        let candidates = vec![
            PlanCandidate::new("power_line_field", &["f4"]),
            PlanCandidate::new("road", &["f4"]),
        ];
        let selection = select_plan(&policy, &candidates).unwrap();
        assert_eq!(selection.selected.id, "power_line_field");
        assert_eq!(selection.rejected[0].reason, RejectionReason::TieBreak);
    }

    #[test]
    fn unknown_principle_is_an_error() {
        let policy = landing_policy();
        let a = PlanCandidate::new("a", &["f9"]);
        let b = PlanCandidate::new("b", &[]);
        assert!(compare_plans(&policy, &a, &b).is_err());
    }

    #[test]
    fn empty_candidate_list_is_an_error() {
        let policy = landing_policy();
        assert_eq!(
            select_plan(&policy, &[]).unwrap_err(),
            PolicyError::NoCandidates
        );
    }
}
