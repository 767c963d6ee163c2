//! Round-trip and diagnostics tests over the bundled fixture files and over
//! generated bundles.

use ethica_core::causal::ActionMode;
use ethica_core::verifier::{AtomArg, PropExpr, PropertySpec, Quantifier};
use ethica_lang::{
    parse, parse_many, serialize, ParsedBundle, SourceDocument, SpaceDef, SpaceDefKind, SuiteCheck,
    SuiteDef,
};
use ethica_oracle::{gen_annotations, gen_model, gen_plan, gen_policy, ModelShape, Rng};
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

fn fixture(name: &str) -> SourceDocument {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    SourceDocument::new(name, fs::read_to_string(path).expect("fixture readable"))
}

#[test]
fn bundled_fixtures_parse_and_round_trip() {
    for name in ["smarthome.ethica", "asimov.ethica", "ua_landing.ethica"] {
        let doc = fixture(name);
        let bundle = parse(&doc).unwrap_or_else(|e| panic!("{name} failed to parse: {e:?}"));
        let rendered = serialize(&bundle);
        let reparsed = parse(&SourceDocument::new(name, &rendered))
            .unwrap_or_else(|e| panic!("{name} failed to reparse: {e:?}\n{rendered}"));
        assert_eq!(bundle, reparsed, "{name} did not round-trip");
    }
}

#[test]
fn fixtures_parse_together() {
    let docs = vec![
        fixture("smarthome.ethica"),
        fixture("asimov.ethica"),
        fixture("ua_landing.ethica"),
    ];
    let bundle = parse_many(&docs).expect("fixtures are consistent");
    assert_eq!(bundle.models.len(), 1);
    assert_eq!(bundle.suites.len(), 4);
    // the smart-home transcription has the documented shape
    let model = bundle.model("SmartHome").unwrap();
    assert_eq!(model.actions().len(), 2);
    assert_eq!(model.background().len(), 2);
    assert_eq!(model.consequences().len(), 5);
    assert_eq!(model.mechanisms().len(), 5);
    assert_eq!(model.utilities().len(), 2);
    assert_eq!(model.intentions().len(), 2);
}

/// Random but internally consistent bundle: models with spaces and
/// properties over them, a policy with plan sets, annotation spaces, and
/// suites wiring everything together.
fn gen_bundle(rng: &mut Rng) -> ParsedBundle {
    let mut bundle = ParsedBundle::default();

    for i in 0..1 + rng.below(3) {
        let model = gen_model(rng, &ModelShape::default(), &format!("m{i}"));
        bundle.models.push(model);
    }
    for i in 0..1 + rng.below(2) {
        bundle
            .policies
            .push(gen_policy(rng, 4, &format!("pol{i}")));
    }
    for (i, policy) in bundle.policies.clone().iter().enumerate() {
        let plans = (0..1 + rng.below(4))
            .map(|j| gen_plan(rng, policy, format!("plan{i}_{j}")))
            .collect();
        bundle.plan_sets.push(ethica_lang::PlanSet {
            name: format!("ps{i}"),
            policy: policy.name().to_string(),
            plans,
        });
    }
    for i in 0..rng.below(3) {
        let n_tasks = 2 + rng.below(3);
        let n_laws = 1 + rng.below(3);
        bundle.annotation_sets.push(ethica_lang::NamedAnnotations {
            name: format!("ann{i}"),
            annotations: gen_annotations(rng, n_tasks, n_laws),
        });
    }

    // one space per model, plus an annotation space and one per plan set
    for (i, model) in bundle.models.clone().iter().enumerate() {
        let mut fixed = BTreeMap::new();
        for b in model.background() {
            if rng.below(3) == 0 {
                fixed.insert(b.to_string(), rng.bool());
            }
        }
        bundle.spaces.push(SpaceDef {
            name: format!("space_m{i}"),
            kind: SpaceDefKind::Backgrounds {
                model: model.name().to_string(),
                fixed,
            },
        });
        bundle.properties.push(PropertySpec {
            name: format!("prop_m{i}"),
            quantifier: if rng.bool() {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            },
            condition: gen_background_prop(rng, model, 3),
        });
        bundle.suites.push(SuiteDef {
            name: format!("suite_m{i}"),
            checks: vec![SuiteCheck {
                property: format!("prop_m{i}"),
                space: format!("space_m{i}"),
            }],
        });
    }
    bundle.spaces.push(SpaceDef {
        name: "space_ann".to_string(),
        kind: SpaceDefKind::Annotations {
            n_tasks: 2 + rng.below(2),
            n_laws: 1 + rng.below(3),
        },
    });
    for (i, set) in bundle.plan_sets.clone().iter().enumerate() {
        bundle.spaces.push(SpaceDef {
            name: format!("space_ps{i}"),
            kind: SpaceDefKind::Availability {
                plans: set.name.clone(),
            },
        });
        if let Some(plan) = set.plans.first() {
            bundle.properties.push(PropertySpec {
                name: format!("prop_ps{i}"),
                quantifier: Quantifier::Forall,
                condition: PropExpr::implies(
                    PropExpr::atom("selected", vec![AtomArg::Name(plan.id.clone())]),
                    PropExpr::atom("available", vec![AtomArg::Name(plan.id.clone())]),
                ),
            });
            bundle.suites.push(SuiteDef {
                name: format!("suite_ps{i}"),
                checks: vec![SuiteCheck {
                    property: format!("prop_ps{i}"),
                    space: format!("space_ps{i}"),
                }],
            });
        }
    }
    bundle
}

/// Random condition whose atoms are valid for a backgrounds space over
/// `model`.
fn gen_background_prop(
    rng: &mut Rng,
    model: &ethica_core::causal::CausalAgencyModel,
    depth: usize,
) -> PropExpr {
    if depth == 0 || rng.below(3) == 0 {
        let backgrounds = model.background();
        let actions = model.actions();
        let can_permissible = model.action_mode() == ActionMode::PowerSet || !actions.is_empty();
        return match rng.below(3) {
            0 if !backgrounds.is_empty() => {
                PropExpr::atom(rng.pick(&backgrounds).to_string(), vec![])
            }
            1 if can_permissible => {
                let set: Vec<AtomArg> = match model.action_mode() {
                    ActionMode::ExactlyOne => {
                        vec![AtomArg::Name(rng.pick(&actions).to_string())]
                    }
                    ActionMode::PowerSet => actions
                        .iter()
                        .filter(|_| rng.bool())
                        .map(|a| AtomArg::Name(a.to_string()))
                        .collect(),
                };
                PropExpr::atom("permissible", set)
            }
            _ => PropExpr::Const(rng.bool()),
        };
    }
    match rng.below(4) {
        0 => PropExpr::not(gen_background_prop(rng, model, depth - 1)),
        1 => PropExpr::and(
            gen_background_prop(rng, model, depth - 1),
            gen_background_prop(rng, model, depth - 1),
        ),
        2 => PropExpr::or(
            gen_background_prop(rng, model, depth - 1),
            gen_background_prop(rng, model, depth - 1),
        ),
        _ => PropExpr::implies(
            gen_background_prop(rng, model, depth - 1),
            gen_background_prop(rng, model, depth - 1),
        ),
    }
}

#[test]
fn generated_bundles_round_trip() {
    let mut rng = Rng::new(0xb0b);
    for round in 0..50 {
        let bundle = gen_bundle(&mut rng);
        let rendered = serialize(&bundle);
        let reparsed = parse(&SourceDocument::new("generated", &rendered))
            .unwrap_or_else(|e| panic!("round {round} failed to parse: {e:?}\n{rendered}"));
        assert_eq!(bundle, reparsed, "round {round} did not round-trip:\n{rendered}");
    }
}

#[test]
fn error_documents_yield_positioned_diagnostics_and_no_bundle() {
    let cases = [
        "model {",
        "model M { actions a background consequences mechanisms utilities intentions } junk",
        "policy P { principle p : nope; }",
        "plans X for missing { plan a; }",
        "suite S { check nothing over nowhere; }",
        "space S { availability }",
        "annotations A { tasks 2 laws 1 law 5: t1 < t2; }",
        "property P { forall scenario: fire implies }",
    ];
    for text in cases {
        let err = parse(&SourceDocument::new("bad", text)).expect_err(text);
        assert!(!err.is_empty(), "no diagnostics for {text:?}");
        let lines = text.lines().count().max(1) as u32;
        for d in &err {
            assert!(d.pos.line >= 1 && d.pos.line <= lines + 1, "{d}");
            assert!(d.pos.col >= 1, "{d}");
        }
    }
}

#[test]
fn mutated_fixtures_never_panic_and_keep_positions_in_bounds() {
    let text = fixture("ua_landing.ethica").text;
    let mut rng = Rng::new(1234);
    for _ in 0..200 {
        let mut mutated = text.clone();
        let garbage = ["}", "{", "(", "4odd", ";;", "<", "\"", "plan", "~"];
        let at = rng.below(mutated.len());
        let at = mutated
            .char_indices()
            .map(|(i, _)| i)
            .take_while(|&i| i <= at)
            .last()
            .unwrap_or(0);
        mutated.insert_str(at, garbage[rng.below(garbage.len())]);
        if let Err(diagnostics) = parse(&SourceDocument::new("mutated", &mutated)) {
            assert!(!diagnostics.is_empty());
            let lines = mutated.lines().count() as u32;
            for d in diagnostics {
                assert!(d.pos.line >= 1 && d.pos.line <= lines + 1);
            }
        }
    }
}
