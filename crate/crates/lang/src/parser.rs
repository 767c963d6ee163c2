//! Recursive-descent parser with positioned diagnostics.
//!
//! Parsing is two-phase: each document is tokenised and parsed into pending
//! items (syntactic and item-local checks happen here, with positions), then
//! all items from all documents are linked — duplicate names and dangling or
//! ill-typed cross-references are diagnosed. A document set with any error
//! yields diagnostics and no bundle.

use crate::lexer::{is_keyword, lex, Token, TokenKind};
use crate::{
    Diagnostic, NamedAnnotations, ParsedBundle, PlanSet, Pos, SourceDocument, SpaceDef,
    SpaceDefKind, SuiteCheck, SuiteDef,
};
use ethica_core::causal::{ActionMode, CausalAgencyModel, Formula};
use ethica_core::governor::{LawAnnotationSet, PairPreference};
use ethica_core::policy::{EthicalPolicy, PlanCandidate, VACUOUS_ID};
use ethica_core::verifier::{self, AtomArg, AtomRef, PropExpr, PropertySpec, Quantifier};
use std::collections::{BTreeMap, BTreeSet};

struct Located<T> {
    item: T,
    origin: String,
    pos: Pos,
}

enum PendingItem {
    Model(CausalAgencyModel),
    Policy(EthicalPolicy),
    Plans {
        set: PlanSet,
        policy_pos: Pos,
        entry_pos: Vec<Pos>,
    },
    Annotations(NamedAnnotations),
    Space {
        def: SpaceDef,
        ref_pos: Pos,
        fixed_pos: Vec<(String, Pos)>,
    },
    Property(PropertySpec),
    Suite {
        def: SuiteDef,
        check_pos: Vec<Pos>,
    },
}

impl PendingItem {
    fn kind_and_name(&self) -> (&'static str, String) {
        match self {
            PendingItem::Model(m) => ("model", m.name().to_string()),
            PendingItem::Policy(p) => ("policy", p.name().to_string()),
            PendingItem::Plans { set, .. } => ("plans", set.name.clone()),
            PendingItem::Annotations(a) => ("annotations", a.name.clone()),
            PendingItem::Space { def, .. } => ("space", def.name.clone()),
            PendingItem::Property(p) => ("property", p.name.clone()),
            PendingItem::Suite { def, .. } => ("suite", def.name.clone()),
        }
    }
}

pub fn parse_documents(documents: &[SourceDocument]) -> Result<ParsedBundle, Vec<Diagnostic>> {
    let mut diagnostics = Vec::new();
    let mut items: Vec<Located<PendingItem>> = Vec::new();

    for doc in documents {
        match lex(&doc.origin, &doc.text) {
            Err(diagnostic) => diagnostics.push(diagnostic),
            Ok(tokens) => {
                let mut parser = Parser {
                    tokens,
                    index: 0,
                    origin: &doc.origin,
                    diagnostics: &mut diagnostics,
                };
                parser.parse_items(&mut items);
            }
        }
    }

    link(items, &mut diagnostics)
        .filter(|_| diagnostics.is_empty())
        .ok_or(diagnostics)
}

/// Cross-item checks and bundle assembly.
fn link(
    items: Vec<Located<PendingItem>>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<ParsedBundle> {
    let mut seen: BTreeMap<(&'static str, String), ()> = BTreeMap::new();
    for located in &items {
        let key = located.item.kind_and_name();
        if seen.insert(key.clone(), ()).is_some() {
            diagnostics.push(Diagnostic {
                origin: located.origin.clone(),
                pos: located.pos,
                message: format!("duplicate {} '{}'", key.0, key.1),
            });
        }
    }

    let mut bundle = ParsedBundle::default();
    for located in &items {
        match &located.item {
            PendingItem::Model(m) => bundle.models.push(m.clone()),
            PendingItem::Policy(p) => bundle.policies.push(p.clone()),
            PendingItem::Annotations(a) => bundle.annotation_sets.push(a.clone()),
            PendingItem::Property(p) => bundle.properties.push(p.clone()),
            _ => {}
        }
    }

    // plan sets: the policy must exist and every violated id must name one
    // of its non-vacuous principles
    for located in &items {
        if let PendingItem::Plans {
            set,
            policy_pos,
            entry_pos,
        } = &located.item
        {
            match bundle.policy(&set.policy) {
                None => diagnostics.push(Diagnostic {
                    origin: located.origin.clone(),
                    pos: *policy_pos,
                    message: format!("unknown policy '{}'", set.policy),
                }),
                Some(policy) => {
                    for (plan, pos) in set.plans.iter().zip(entry_pos) {
                        for id in &plan.violations {
                            match policy.principle(id) {
                                None => diagnostics.push(Diagnostic {
                                    origin: located.origin.clone(),
                                    pos: *pos,
                                    message: format!(
                                        "plan '{}' violates unknown principle '{id}'",
                                        plan.id
                                    ),
                                }),
                                Some(p) if p.is_vacuous => diagnostics.push(Diagnostic {
                                    origin: located.origin.clone(),
                                    pos: *pos,
                                    message: format!(
                                        "plan '{}' violates the vacuous principle",
                                        plan.id
                                    ),
                                }),
                                Some(_) => {}
                            }
                        }
                    }
                }
            }
            bundle.plan_sets.push(set.clone());
        }
    }

    // spaces: referenced models/plan sets must exist; fixed variables must
    // be background variables of the model
    for located in &items {
        if let PendingItem::Space {
            def,
            ref_pos,
            fixed_pos,
        } = &located.item
        {
            match &def.kind {
                SpaceDefKind::Backgrounds { model, .. } => match bundle.model(model) {
                    None => diagnostics.push(Diagnostic {
                        origin: located.origin.clone(),
                        pos: *ref_pos,
                        message: format!("unknown model '{model}'"),
                    }),
                    Some(m) => {
                        for (name, pos) in fixed_pos {
                            if !m.background().contains(&name.as_str()) {
                                diagnostics.push(Diagnostic {
                                    origin: located.origin.clone(),
                                    pos: *pos,
                                    message: format!(
                                        "'{name}' is not a background variable of model '{model}'"
                                    ),
                                });
                            }
                        }
                    }
                },
                SpaceDefKind::Availability { plans } => {
                    if bundle.plan_set(plans).is_none() {
                        diagnostics.push(Diagnostic {
                            origin: located.origin.clone(),
                            pos: *ref_pos,
                            message: format!("unknown plan set '{plans}'"),
                        });
                    }
                }
                SpaceDefKind::Annotations { .. } => {}
            }
            bundle.spaces.push(def.clone());
        }
    }

    // suites: every check must name a property and a space, and the
    // property's atoms must resolve against that space
    for located in &items {
        if let PendingItem::Suite { def, check_pos } = &located.item {
            for (check, pos) in def.checks.iter().zip(check_pos) {
                let property = bundle.property(&check.property);
                if property.is_none() {
                    diagnostics.push(Diagnostic {
                        origin: located.origin.clone(),
                        pos: *pos,
                        message: format!("unknown property '{}'", check.property),
                    });
                }
                let space = match bundle.resolve_space(&check.space) {
                    Some(space) => Some(space),
                    None => {
                        if bundle.space_def(&check.space).is_none() {
                            diagnostics.push(Diagnostic {
                                origin: located.origin.clone(),
                                pos: *pos,
                                message: format!("unknown space '{}'", check.space),
                            });
                        }
                        None
                    }
                };
                if let (Some(property), Some(space)) = (property, space) {
                    if let Err(e) = verifier::validate_property(&space, property) {
                        diagnostics.push(Diagnostic {
                            origin: located.origin.clone(),
                            pos: *pos,
                            message: e.to_string(),
                        });
                    }
                }
            }
            bundle.suites.push(def.clone());
        }
    }

    Some(bundle)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    index: usize,
    origin: &'a str,
    diagnostics: &'a mut Vec<Diagnostic>,
}

/// An error that has already been reported as a diagnostic.
type Reported = ();

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.index.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let token = self.peek().clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        token
    }

    fn report(&mut self, pos: Pos, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            origin: self.origin.to_string(),
            pos,
            message: message.into(),
        });
    }

    fn fail<T>(&mut self, pos: Pos, message: impl Into<String>) -> Result<T, Reported> {
        self.report(pos, message);
        Err(())
    }

    fn fail_here<T>(&mut self, message: impl Into<String>) -> Result<T, Reported> {
        let pos = self.peek().pos;
        self.fail(pos, message)
    }

    /// Is the next token the given keyword?
    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(w) if w == word)
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.at_keyword(word) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), Reported> {
        if self.eat_keyword(word) {
            Ok(())
        } else {
            let found = self.peek().kind.clone();
            self.fail_here(format!("expected '{word}', found {found}"))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind) -> Result<Token, Reported> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            let found = self.peek().kind.clone();
            self.fail_here(format!("expected {kind}, found {found}"))
        }
    }

    /// A non-keyword identifier.
    fn expect_name(&mut self, what: &str) -> Result<(String, Pos), Reported> {
        let token = self.peek().clone();
        match token.kind {
            TokenKind::Ident(word) if !is_keyword(&word) => {
                self.advance();
                Ok((word, token.pos))
            }
            TokenKind::Ident(word) => self.fail(
                token.pos,
                format!("'{word}' is a reserved word and cannot be used as {what}"),
            ),
            other => self.fail_here(format!("expected {what}, found {other}")),
        }
    }

    fn expect_integer(&mut self, what: &str) -> Result<(i64, Pos), Reported> {
        let token = self.peek().clone();
        match token.kind {
            TokenKind::Number(text) => match text.parse::<i64>() {
                Ok(value) => {
                    self.advance();
                    Ok((value, token.pos))
                }
                Err(_) => self.fail(token.pos, format!("{what} must be an integer")),
            },
            other => self.fail_here(format!("expected {what}, found {other}")),
        }
    }

    fn expect_number(&mut self, what: &str) -> Result<(f64, Pos), Reported> {
        let token = self.peek().clone();
        match token.kind {
            TokenKind::Number(text) => match text.parse::<f64>() {
                Ok(value) => {
                    self.advance();
                    Ok((value, token.pos))
                }
                Err(_) => self.fail(token.pos, format!("{what} is not a number")),
            },
            other => self.fail_here(format!("expected {what}, found {other}")),
        }
    }

    fn expect_bool(&mut self) -> Result<bool, Reported> {
        if self.eat_keyword("true") {
            Ok(true)
        } else if self.eat_keyword("false") {
            Ok(false)
        } else {
            let found = self.peek().kind.clone();
            self.fail_here(format!("expected 'true' or 'false', found {found}"))
        }
    }

    /// Skips forward to the next top-level item keyword, tracking braces so
    /// recovery does not stop inside the broken item.
    fn recover_to_item(&mut self) {
        let mut depth = 0usize;
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => {
                    depth += 1;
                    self.advance();
                }
                TokenKind::RBrace => {
                    depth = depth.saturating_sub(1);
                    self.advance();
                }
                TokenKind::Ident(word)
                    if depth == 0
                        && matches!(
                            word.as_str(),
                            "model"
                                | "policy"
                                | "plans"
                                | "annotations"
                                | "space"
                                | "property"
                                | "suite"
                        ) =>
                {
                    return;
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn parse_items(&mut self, items: &mut Vec<Located<PendingItem>>) {
        loop {
            let token = self.peek().clone();
            let result = match &token.kind {
                TokenKind::Eof => return,
                TokenKind::Ident(word) => match word.as_str() {
                    "model" => self.parse_model().map(PendingItem::Model),
                    "policy" => self.parse_policy().map(PendingItem::Policy),
                    "plans" => self.parse_plans(),
                    "annotations" => self.parse_annotations().map(PendingItem::Annotations),
                    "space" => self.parse_space(),
                    "property" => self.parse_property().map(PendingItem::Property),
                    "suite" => self.parse_suite(),
                    other => {
                        self.report(token.pos, format!("expected an item, found '{other}'"));
                        Err(())
                    }
                },
                other => {
                    let message = format!("expected an item, found {other}");
                    self.report(token.pos, message);
                    Err(())
                }
            };
            match result {
                Ok(item) => items.push(Located {
                    item,
                    origin: self.origin.to_string(),
                    pos: token.pos,
                }),
                Err(()) => {
                    // skip the offending token too, or recovery may not move
                    if !matches!(self.peek().kind, TokenKind::Eof) {
                        self.advance();
                    }
                    self.recover_to_item();
                }
            }
        }
    }

    // ── model ────────────────────────────────────────────────────────────

    fn parse_model(&mut self) -> Result<CausalAgencyModel, Reported> {
        self.expect_keyword("model")?;
        let (name, _) = self.expect_name("a model name")?;
        self.expect_kind(TokenKind::LBrace)?;
        let mut model = CausalAgencyModel::new(&name);
        let mut declared: BTreeMap<String, Pos> = BTreeMap::new();

        let mut declare = |parser: &mut Self, name: String, pos: Pos| -> Result<(), Reported> {
            if declared.contains_key(&name) {
                return parser.fail(pos, format!("variable '{name}' is already declared"));
            }
            declared.insert(name, pos);
            Ok(())
        };

        self.expect_keyword("actions")?;
        for (action, pos) in self.parse_idlist()? {
            declare(self, action.clone(), pos)?;
            model.add_action(action);
        }

        self.expect_keyword("background")?;
        for (background, value, pos) in self.parse_assignlist()? {
            declare(self, background.clone(), pos)?;
            model.add_background(background, value);
        }

        self.expect_keyword("consequences")?;
        for (consequence, pos) in self.parse_idlist()? {
            declare(self, consequence.clone(), pos)?;
            model.add_consequence(consequence);
        }

        self.expect_keyword("mechanisms")?;
        let mut first_mechanism_pos = None;
        while !self.at_keyword("utilities") && self.peek().kind != TokenKind::Eof {
            let (consequent, pos) = self.expect_name("a consequence name")?;
            first_mechanism_pos.get_or_insert(pos);
            match model.kind_of(&consequent) {
                Some(ethica_core::causal::VarKind::Consequence) => {}
                Some(kind) => {
                    return self.fail(
                        pos,
                        format!("mechanism target '{consequent}' is a {kind}, not a consequence"),
                    );
                }
                None => {
                    return self.fail(pos, format!("undeclared consequence '{consequent}'"));
                }
            }
            if model.mechanism_for(&consequent).is_some() {
                return self.fail(
                    pos,
                    format!("consequence '{consequent}' already has a mechanism"),
                );
            }
            self.expect_kind(TokenKind::Define)?;
            let formula = self.parse_formula(&model)?;
            self.expect_kind(TokenKind::Semi)?;
            model.add_mechanism(consequent, formula);
        }

        self.expect_keyword("utilities")?;
        while !self.at_keyword("intentions") && self.peek().kind != TokenKind::Eof {
            let (variable, pos) = self.expect_name("a variable name")?;
            if model.kind_of(&variable).is_none() {
                return self.fail(pos, format!("undeclared variable '{variable}'"));
            }
            if model.utilities().contains_key(&variable) {
                return self.fail(pos, format!("duplicate utility for '{variable}'"));
            }
            self.expect_kind(TokenKind::Colon)?;
            let (value, _) = self.expect_number("a utility")?;
            self.expect_kind(TokenKind::Semi)?;
            model.set_utility(variable, value);
        }

        self.expect_keyword("intentions")?;
        while !self.at_keyword("mode") && self.peek().kind != TokenKind::RBrace {
            let (action, pos) = self.expect_name("an action name")?;
            match model.kind_of(&action) {
                Some(ethica_core::causal::VarKind::Action) => {}
                Some(kind) => {
                    return self.fail(pos, format!("'{action}' is a {kind}, not an action"));
                }
                None => return self.fail(pos, format!("undeclared action '{action}'")),
            }
            self.expect_kind(TokenKind::Arrow)?;
            let (consequence, pos) = self.expect_name("a consequence name")?;
            match model.kind_of(&consequence) {
                Some(ethica_core::causal::VarKind::Consequence) => {}
                Some(kind) => {
                    return self.fail(
                        pos,
                        format!("'{consequence}' is a {kind}, not a consequence"),
                    );
                }
                None => {
                    return self.fail(pos, format!("undeclared consequence '{consequence}'"));
                }
            }
            self.expect_kind(TokenKind::Semi)?;
            model.add_intention(action, consequence);
        }

        if self.eat_keyword("mode") {
            if self.eat_keyword("exactly_one") {
                model.set_action_mode(ActionMode::ExactlyOne);
            } else if self.eat_keyword("power_set") {
                model.set_action_mode(ActionMode::PowerSet);
            } else {
                let found = self.peek().kind.clone();
                return self
                    .fail_here(format!("expected 'exactly_one' or 'power_set', found {found}"));
            }
        }
        let close = self.expect_kind(TokenKind::RBrace)?;

        // consequences without a mechanism, and anything the inline checks
        // cannot see
        let report = model.validate();
        if let Some(violation) = report.violations.first() {
            let pos = first_mechanism_pos.unwrap_or(close.pos);
            return self.fail(pos, violation.to_string());
        }
        Ok(model)
    }

    fn parse_idlist(&mut self) -> Result<Vec<(String, Pos)>, Reported> {
        let mut names = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::Ident(word) if !is_keyword(word) => {
                    let (name, pos) = self.expect_name("a name")?;
                    names.push((name, pos));
                    if !matches!(self.peek().kind, TokenKind::Comma) {
                        return Ok(names);
                    }
                    self.advance();
                }
                _ => return Ok(names),
            }
        }
    }

    fn parse_assignlist(&mut self) -> Result<Vec<(String, bool, Pos)>, Reported> {
        let mut assignments = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::Ident(word) if !is_keyword(word) => {
                    let (name, pos) = self.expect_name("a name")?;
                    self.expect_kind(TokenKind::Eq)?;
                    let value = self.expect_bool()?;
                    assignments.push((name, value, pos));
                    if !matches!(self.peek().kind, TokenKind::Comma) {
                        return Ok(assignments);
                    }
                    self.advance();
                }
                _ => return Ok(assignments),
            }
        }
    }

    fn parse_formula(&mut self, model: &CausalAgencyModel) -> Result<Formula, Reported> {
        let mut formula = self.parse_formula_and(model)?;
        while self.eat_keyword("or") {
            let rhs = self.parse_formula_and(model)?;
            formula = Formula::or(formula, rhs);
        }
        Ok(formula)
    }

    fn parse_formula_and(&mut self, model: &CausalAgencyModel) -> Result<Formula, Reported> {
        let mut formula = self.parse_formula_unary(model)?;
        while self.eat_keyword("and") {
            let rhs = self.parse_formula_unary(model)?;
            formula = Formula::and(formula, rhs);
        }
        Ok(formula)
    }

    fn parse_formula_unary(&mut self, model: &CausalAgencyModel) -> Result<Formula, Reported> {
        if self.eat_keyword("not") {
            return Ok(Formula::not(self.parse_formula_unary(model)?));
        }
        if self.eat_keyword("true") {
            return Ok(Formula::True);
        }
        if self.eat_keyword("false") {
            return Ok(Formula::False);
        }
        if self.peek().kind == TokenKind::LParen {
            self.advance();
            let inner = self.parse_formula(model)?;
            self.expect_kind(TokenKind::RParen)?;
            return Ok(inner);
        }
        let (name, pos) = self.expect_name("a variable")?;
        if model.kind_of(&name).is_none() {
            return self.fail(pos, format!("undeclared variable '{name}'"));
        }
        Ok(Formula::var(name))
    }

    // ── policy ───────────────────────────────────────────────────────────

    fn parse_policy(&mut self) -> Result<EthicalPolicy, Reported> {
        self.expect_keyword("policy")?;
        let (name, _) = self.expect_name("a policy name")?;
        self.expect_kind(TokenKind::LBrace)?;

        struct Entry {
            id: String,
            rank: Option<i64>,
            description: String,
        }
        let mut entries: Vec<Entry> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        while self.eat_keyword("principle") {
            let (id, pos) = self.expect_name("a principle id")?;
            if id == VACUOUS_ID {
                return self.fail(
                    pos,
                    format!("'{VACUOUS_ID}' is reserved for the implicit top principle"),
                );
            }
            if !seen.insert(id.clone()) {
                return self.fail(pos, format!("duplicate principle '{id}'"));
            }
            let rank = if self.peek().kind == TokenKind::Colon {
                self.advance();
                Some(self.expect_integer("a rank")?.0)
            } else {
                None
            };
            let description = match &self.peek().kind {
                TokenKind::Str(text) => {
                    let text = text.clone();
                    self.advance();
                    text
                }
                _ => String::new(),
            };
            self.expect_kind(TokenKind::Semi)?;
            entries.push(Entry {
                id,
                rank,
                description,
            });
        }
        self.expect_kind(TokenKind::RBrace)?;

        // listing order gives descending default ranks: first is gravest
        let n = entries.len() as i64;
        let mut policy = EthicalPolicy::new(name);
        for (i, entry) in entries.into_iter().enumerate() {
            let rank = entry.rank.unwrap_or(n - i as i64);
            policy.add_principle(entry.id, entry.description, rank);
        }
        policy.insert_vacuous_top();
        Ok(policy)
    }

    // ── plans ────────────────────────────────────────────────────────────

    fn parse_plans(&mut self) -> Result<PendingItem, Reported> {
        self.expect_keyword("plans")?;
        let (name, _) = self.expect_name("a plan set name")?;
        self.expect_keyword("for")?;
        let (policy, policy_pos) = self.expect_name("a policy name")?;
        self.expect_kind(TokenKind::LBrace)?;
        let mut plans = Vec::new();
        let mut entry_pos = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        while self.eat_keyword("plan") {
            let (id, pos) = self.expect_name("a plan id")?;
            if !seen.insert(id.clone()) {
                return self.fail(pos, format!("duplicate plan '{id}'"));
            }
            let mut violations = Vec::new();
            if self.eat_keyword("violates") {
                loop {
                    let (principle, _) = self.expect_name("a principle id")?;
                    violations.push(principle);
                    if !matches!(self.peek().kind, TokenKind::Comma) {
                        break;
                    }
                    self.advance();
                }
            }
            self.expect_kind(TokenKind::Semi)?;
            plans.push(PlanCandidate { id, violations });
            entry_pos.push(pos);
        }
        self.expect_kind(TokenKind::RBrace)?;
        Ok(PendingItem::Plans {
            set: PlanSet {
                name,
                policy,
                plans,
            },
            policy_pos,
            entry_pos,
        })
    }

    // ── annotations ──────────────────────────────────────────────────────

    fn parse_annotations(&mut self) -> Result<NamedAnnotations, Reported> {
        self.expect_keyword("annotations")?;
        let (name, _) = self.expect_name("an annotation set name")?;
        self.expect_kind(TokenKind::LBrace)?;
        self.expect_keyword("tasks")?;
        let (n_tasks, tasks_pos) = self.expect_integer("the task count")?;
        if n_tasks < 1 {
            return self.fail(tasks_pos, "task count must be at least 1");
        }
        self.expect_keyword("laws")?;
        let (n_laws, laws_pos) = self.expect_integer("the law count")?;
        if n_laws < 1 {
            return self.fail(laws_pos, "law count must be at least 1");
        }
        let n_tasks = n_tasks as usize;
        let n_laws = n_laws as usize;
        let mut annotations = LawAnnotationSet::new(n_tasks, n_laws);
        let mut set_cells: BTreeSet<(usize, usize, usize)> = BTreeSet::new();

        while self.eat_keyword("law") {
            let (law, law_pos) = self.expect_integer("a law number")?;
            if law < 1 || law as usize > n_laws {
                return self.fail(law_pos, format!("law {law} out of range 1..{n_laws}"));
            }
            let law = law as usize - 1;
            self.expect_kind(TokenKind::Colon)?;
            loop {
                let (first, first_pos) = self.expect_name("a task (t1, t2, …)")?;
                let a = self.task_number(&first, n_tasks, first_pos)?;
                let preference = match self.peek().kind {
                    TokenKind::Less => {
                        self.advance();
                        PairPreference::FirstPreferred
                    }
                    TokenKind::Tilde => {
                        self.advance();
                        PairPreference::Incomparable
                    }
                    _ => {
                        let found = self.peek().kind.clone();
                        return self.fail_here(format!("expected '<' or '~', found {found}"));
                    }
                };
                let (second, second_pos) = self.expect_name("a task (t1, t2, …)")?;
                let b = self.task_number(&second, n_tasks, second_pos)?;
                if a == b {
                    return self.fail(second_pos, "a task cannot be compared with itself");
                }
                let key = (law, a.min(b), a.max(b));
                if !set_cells.insert(key) {
                    return self.fail(
                        first_pos,
                        format!("law {} already annotates the pair {first}, {second}", law + 1),
                    );
                }
                annotations.set(law, a, b, preference).expect("validated indices");
                if !matches!(self.peek().kind, TokenKind::Comma) {
                    break;
                }
                self.advance();
            }
            self.expect_kind(TokenKind::Semi)?;
        }
        self.expect_kind(TokenKind::RBrace)?;
        Ok(NamedAnnotations { name, annotations })
    }

    fn task_number(&mut self, word: &str, n_tasks: usize, pos: Pos) -> Result<usize, Reported> {
        let index = word
            .strip_prefix('t')
            .and_then(|rest| rest.parse::<usize>().ok())
            .filter(|&k| k >= 1);
        match index {
            Some(k) if k <= n_tasks => Ok(k - 1),
            Some(k) => self.fail(pos, format!("task t{k} out of range for {n_tasks} tasks")),
            None => self.fail(pos, format!("'{word}' is not a task (expected t1..t{n_tasks})")),
        }
    }

    // ── space ────────────────────────────────────────────────────────────

    fn parse_space(&mut self) -> Result<PendingItem, Reported> {
        self.expect_keyword("space")?;
        let (name, _) = self.expect_name("a space name")?;
        self.expect_kind(TokenKind::LBrace)?;
        let (kind, ref_pos, fixed_pos) = if self.eat_keyword("backgrounds") {
            let (model, model_pos) = self.expect_name("a model name")?;
            let mut fixed = BTreeMap::new();
            let mut fixed_pos = Vec::new();
            if self.eat_keyword("where") {
                for (variable, value, pos) in self.parse_assignlist()? {
                    if fixed.insert(variable.clone(), value).is_some() {
                        return self.fail(pos, format!("'{variable}' is fixed twice"));
                    }
                    fixed_pos.push((variable, pos));
                }
            }
            (
                SpaceDefKind::Backgrounds { model, fixed },
                model_pos,
                fixed_pos,
            )
        } else if self.eat_keyword("annotations") {
            self.expect_keyword("tasks")?;
            let (n_tasks, tasks_pos) = self.expect_integer("the task count")?;
            if n_tasks < 2 {
                return self.fail(tasks_pos, "an annotation space needs at least 2 tasks");
            }
            self.expect_keyword("laws")?;
            let (n_laws, laws_pos) = self.expect_integer("the law count")?;
            if n_laws < 1 {
                return self.fail(laws_pos, "law count must be at least 1");
            }
            (
                SpaceDefKind::Annotations {
                    n_tasks: n_tasks as usize,
                    n_laws: n_laws as usize,
                },
                tasks_pos,
                Vec::new(),
            )
        } else if self.eat_keyword("availability") {
            let (plans, plans_pos) = self.expect_name("a plan set name")?;
            (SpaceDefKind::Availability { plans }, plans_pos, Vec::new())
        } else {
            let found = self.peek().kind.clone();
            return self.fail_here(format!(
                "expected 'backgrounds', 'annotations' or 'availability', found {found}"
            ));
        };
        self.expect_kind(TokenKind::RBrace)?;
        Ok(PendingItem::Space {
            def: SpaceDef { name, kind },
            ref_pos,
            fixed_pos,
        })
    }

    // ── property ─────────────────────────────────────────────────────────

    fn parse_property(&mut self) -> Result<PropertySpec, Reported> {
        self.expect_keyword("property")?;
        let (name, _) = self.expect_name("a property name")?;
        self.expect_kind(TokenKind::LBrace)?;
        let quantifier = if self.eat_keyword("forall") {
            Quantifier::Forall
        } else if self.eat_keyword("exists") {
            Quantifier::Exists
        } else {
            let found = self.peek().kind.clone();
            return self.fail_here(format!("expected 'forall' or 'exists', found {found}"));
        };
        self.expect_keyword("scenario")?;
        self.expect_kind(TokenKind::Colon)?;
        let condition = self.parse_propexpr()?;
        self.expect_kind(TokenKind::RBrace)?;
        Ok(PropertySpec {
            name,
            quantifier,
            condition,
        })
    }

    fn parse_propexpr(&mut self) -> Result<PropExpr, Reported> {
        let lhs = self.parse_prop_or()?;
        if self.eat_keyword("implies") {
            let rhs = self.parse_propexpr()?; // right-associative
            Ok(PropExpr::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_prop_or(&mut self) -> Result<PropExpr, Reported> {
        let mut expr = self.parse_prop_and()?;
        while self.eat_keyword("or") {
            let rhs = self.parse_prop_and()?;
            expr = PropExpr::or(expr, rhs);
        }
        Ok(expr)
    }

    fn parse_prop_and(&mut self) -> Result<PropExpr, Reported> {
        let mut expr = self.parse_prop_unary()?;
        while self.eat_keyword("and") {
            let rhs = self.parse_prop_unary()?;
            expr = PropExpr::and(expr, rhs);
        }
        Ok(expr)
    }

    fn parse_prop_unary(&mut self) -> Result<PropExpr, Reported> {
        if self.eat_keyword("not") {
            return Ok(PropExpr::not(self.parse_prop_unary()?));
        }
        if self.eat_keyword("true") {
            return Ok(PropExpr::Const(true));
        }
        if self.eat_keyword("false") {
            return Ok(PropExpr::Const(false));
        }
        if self.peek().kind == TokenKind::LParen {
            self.advance();
            let inner = self.parse_propexpr()?;
            self.expect_kind(TokenKind::RParen)?;
            return Ok(inner);
        }
        let (head, _) = self.expect_name("an atom")?;
        let mut args = Vec::new();
        if self.peek().kind == TokenKind::LParen {
            self.advance();
            if self.peek().kind != TokenKind::RParen {
                loop {
                    match self.peek().kind.clone() {
                        TokenKind::Ident(word) if !is_keyword(&word) => {
                            self.advance();
                            args.push(AtomArg::Name(word));
                        }
                        TokenKind::Number(text) => match text.parse::<u64>() {
                            Ok(value) => {
                                self.advance();
                                args.push(AtomArg::Number(value));
                            }
                            Err(_) => {
                                return self.fail_here(
                                    "atom arguments must be names or non-negative integers",
                                );
                            }
                        },
                        other => {
                            return self.fail_here(format!(
                                "expected an atom argument, found {other}"
                            ));
                        }
                    }
                    if !matches!(self.peek().kind, TokenKind::Comma) {
                        break;
                    }
                    self.advance();
                }
            }
            self.expect_kind(TokenKind::RParen)?;
        }
        Ok(PropExpr::Atom(AtomRef { head, args }))
    }

    // ── suite ────────────────────────────────────────────────────────────

    fn parse_suite(&mut self) -> Result<PendingItem, Reported> {
        self.expect_keyword("suite")?;
        let (name, _) = self.expect_name("a suite name")?;
        self.expect_kind(TokenKind::LBrace)?;
        let mut checks = Vec::new();
        let mut check_pos = Vec::new();
        while self.eat_keyword("check") {
            let (property, pos) = self.expect_name("a property name")?;
            self.expect_keyword("over")?;
            let (space, _) = self.expect_name("a space name")?;
            self.expect_kind(TokenKind::Semi)?;
            checks.push(SuiteCheck { property, space });
            check_pos.push(pos);
        }
        self.expect_kind(TokenKind::RBrace)?;
        Ok(PendingItem::Suite {
            def: SuiteDef { name, checks },
            check_pos,
        })
    }
}
