//! Text format for models, policies, plan sets, annotation sets, scenario
//! spaces, properties and suites.
//!
//! One document holds any number of named items; cross-references (a plan
//! set's policy, a space's model, a suite's properties and spaces) may point
//! forwards and are resolved once everything is parsed. A document with any
//! error yields positioned diagnostics and no bundle.
//!
//! Grammar sketch (`#` comments run to end of line, keywords are reserved):
//!
//! ```text
//! bundle      := item*
//! item        := model | policy | plans | annotations | space | property | suite
//! model       := "model" NAME "{"
//!                  "actions" idlist
//!                  "background" assignlist
//!                  "consequences" idlist
//!                  "mechanisms" (NAME ":=" formula ";")*
//!                  "utilities" (NAME ":" NUMBER ";")*
//!                  "intentions" (NAME "->" NAME ";")*
//!                  ["mode" ("exactly_one" | "power_set")]
//!                "}"
//! idlist      := [NAME ("," NAME)*]
//! assignlist  := [NAME "=" ("true"|"false") ("," NAME "=" ("true"|"false"))*]
//! formula     := formula "or" formula | formula "and" formula | "not" formula
//!              | "(" formula ")" | "true" | "false" | NAME
//! policy      := "policy" NAME "{" ("principle" NAME [":" INT] [STRING] ";")* "}"
//! plans       := "plans" NAME "for" NAME "{"
//!                  ("plan" NAME ["violates" NAME ("," NAME)*] ";")* "}"
//! annotations := "annotations" NAME "{" "tasks" INT "laws" INT
//!                  ("law" INT ":" pair ("," pair)* ";")* "}"
//! pair        := TASK ("<" | "~") TASK            # t1 < t2: t1 preferred
//! space       := "space" NAME "{" ( "backgrounds" NAME ["where" assignlist]
//!                                 | "annotations" "tasks" INT "laws" INT
//!                                 | "availability" NAME ) "}"
//! property    := "property" NAME "{" ("forall"|"exists") "scenario" ":" propexpr "}"
//! propexpr    := propexpr "implies" propexpr | propexpr "or" propexpr
//!              | propexpr "and" propexpr | "not" propexpr | "(" propexpr ")"
//!              | "true" | "false" | NAME ["(" [arg ("," arg)*] ")"]
//! suite       := "suite" NAME "{" ("check" NAME "over" NAME ";")* "}"
//! ```
//!
//! Policies omitting a rank get descending defaults in listing order (the
//! first principle is the gravest); the vacuous top principle is inserted
//! automatically. A model without a `mode` clause generates exactly-one
//! action worlds. Annotation pairs not mentioned are incomparable.

use ethica_core::causal::CausalAgencyModel;
use ethica_core::governor::LawAnnotationSet;
use ethica_core::policy::{EthicalPolicy, PlanCandidate};
use ethica_core::verifier::{PropertySpec, ScenarioSpace, SpaceKind};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

mod lexer;
mod parser;
mod printer;

/// A text to parse, with the origin used in diagnostics (a path, usually).
#[derive(Debug, Clone)]
pub struct SourceDocument {
    pub origin: String,
    pub text: String,
}

impl SourceDocument {
    pub fn new(origin: impl Into<String>, text: impl Into<String>) -> Self {
        SourceDocument {
            origin: origin.into(),
            text: text.into(),
        }
    }
}

/// 1-based position in a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

/// A positioned error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub origin: String,
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.origin, self.pos.line, self.pos.col, self.message
        )
    }
}

/// A named plan set tied to a policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSet {
    pub name: String,
    pub policy: String,
    pub plans: Vec<PlanCandidate>,
}

/// A named annotation set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedAnnotations {
    pub name: String,
    pub annotations: LawAnnotationSet,
}

/// A scenario space definition referencing other items by name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceDef {
    pub name: String,
    pub kind: SpaceDefKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDefKind {
    Backgrounds {
        model: String,
        fixed: BTreeMap<String, bool>,
    },
    Annotations {
        n_tasks: usize,
        n_laws: usize,
    },
    Availability {
        plans: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub property: String,
    pub space: String,
}

/// A named list of (property, space) checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteDef {
    pub name: String,
    pub checks: Vec<SuiteCheck>,
}

/// Every item parsed from a document set, with all cross-references
/// resolved. Collections keep document order; names are unique per kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedBundle {
    pub models: Vec<CausalAgencyModel>,
    pub policies: Vec<EthicalPolicy>,
    pub plan_sets: Vec<PlanSet>,
    pub annotation_sets: Vec<NamedAnnotations>,
    pub spaces: Vec<SpaceDef>,
    pub properties: Vec<PropertySpec>,
    pub suites: Vec<SuiteDef>,
}

impl ParsedBundle {
    pub fn model(&self, name: &str) -> Option<&CausalAgencyModel> {
        self.models.iter().find(|m| m.name() == name)
    }

    pub fn policy(&self, name: &str) -> Option<&EthicalPolicy> {
        self.policies.iter().find(|p| p.name() == name)
    }

    pub fn plan_set(&self, name: &str) -> Option<&PlanSet> {
        self.plan_sets.iter().find(|p| p.name == name)
    }

    pub fn annotation_set(&self, name: &str) -> Option<&NamedAnnotations> {
        self.annotation_sets.iter().find(|a| a.name == name)
    }

    pub fn space_def(&self, name: &str) -> Option<&SpaceDef> {
        self.spaces.iter().find(|s| s.name == name)
    }

    pub fn property(&self, name: &str) -> Option<&PropertySpec> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteDef> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
            && self.policies.is_empty()
            && self.plan_sets.is_empty()
            && self.annotation_sets.is_empty()
            && self.spaces.is_empty()
            && self.properties.is_empty()
            && self.suites.is_empty()
    }

    /// Instantiates a space definition, cloning the model or policy it
    /// refers to. `None` when the space (or anything it references) does
    /// not exist — impossible for bundles built by [`parse`].
    pub fn resolve_space(&self, name: &str) -> Option<ScenarioSpace> {
        let def = self.space_def(name)?;
        let kind = match &def.kind {
            SpaceDefKind::Backgrounds { model, fixed } => SpaceKind::Backgrounds {
                model: self.model(model)?.clone(),
                fixed: fixed.clone(),
            },
            SpaceDefKind::Annotations { n_tasks, n_laws } => SpaceKind::Annotations {
                n_tasks: *n_tasks,
                n_laws: *n_laws,
            },
            SpaceDefKind::Availability { plans } => {
                let set = self.plan_set(plans)?;
                SpaceKind::Availability {
                    policy: self.policy(&set.policy)?.clone(),
                    plans: set.plans.clone(),
                }
            }
        };
        Some(ScenarioSpace {
            name: def.name.clone(),
            kind,
        })
    }
}

/// Parses one document.
pub fn parse(document: &SourceDocument) -> Result<ParsedBundle, Vec<Diagnostic>> {
    parser::parse_documents(std::slice::from_ref(document))
}

/// Parses several documents into one bundle; names must be unique across
/// all of them and cross-references may span documents.
pub fn parse_many(documents: &[SourceDocument]) -> Result<ParsedBundle, Vec<Diagnostic>> {
    parser::parse_documents(documents)
}

/// Renders a bundle as text; parsing the result yields a structurally equal
/// bundle (for policies this assumes the canonical vacuous-top rank, which
/// [`parse`] always produces).
pub fn serialize(bundle: &ParsedBundle) -> String {
    printer::serialize(bundle)
}
