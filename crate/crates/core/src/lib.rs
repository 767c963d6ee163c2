//! Core library for causal-agency ethical reasoning.
//!
//! The crate is organised around five building blocks:
//!
//! - [`causal`] — causal agency models: propositional variables split into
//!   actions, background facts and consequences; acyclic mechanisms; world
//!   evaluation; interventions; but-for causality.
//! - [`pde`] — the five permissibility conditions of the principle of double
//!   effect, evaluated over the worlds of a causal agency model.
//! - [`policy`] — ethical policies as severity-ordered principle sets, and
//!   plan selection by lexicographic violation comparison.
//! - [`governor`] — prioritised-rule-code task selection from pairwise
//!   per-law preference annotations, plus exhaustive annotation enumeration.
//! - [`verifier`] — finite scenario spaces, propositional properties over
//!   scenario atoms, and exhaustive pass/counterexample checking.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads without locking.

pub mod causal;
pub mod governor;
pub mod pde;
pub mod policy;
pub mod verifier;

pub use causal::{
    ActionMode, CausalAgencyModel, CausalWitness, EvalError, Formula, ValidationReport, VarKind,
    Variable, World,
};
pub use pde::{ConditionResult, ConditionWitness, PermissibilityVerdict};
pub use policy::{EthicalPolicy, PlanCandidate, PlanOrdering, PlanSelection, Principle};
pub use governor::{LawAnnotationSet, PairPreference, TaskOrdering, TaskSelection};
pub use verifier::{
    PropertySpec, Quantifier, Scenario, ScenarioSpace, SpaceKind, StandardEvaluator,
    VerificationReport,
};
