//! End-to-end tests of the binary: exit-status contract, overrides,
//! machine-readable output, and worker-count determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn ethica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ethica"))
        .args(args)
        .env("ETHICA_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

#[test]
fn check_exits_one_when_no_world_is_permissible() {
    let out = ethica(&["check", "-f", &fixture("smarthome.ethica"), "SmartHome"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert_eq!(text.matches("IMPERMISSIBLE").count(), 4);
    assert!(text.contains("lights_on \u{21dd} people_are_safe"));
    assert!(text.contains("0 of 4 worlds permissible"));
}

#[test]
fn check_exits_zero_after_the_utility_override() {
    let out = ethica(&[
        "check",
        "-f",
        &fixture("smarthome.ethica"),
        "SmartHome",
        "--set",
        "u.lights_on=0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1 of 4 worlds permissible"));
}

#[test]
fn background_override_changes_the_worlds() {
    // without a fire nothing is dangerous, so doing nothing is permissible
    let out = ethica(&[
        "check",
        "-f",
        &fixture("smarthome.ethica"),
        "SmartHome",
        "--set",
        "background.fire=false",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_holds_and_fails_drive_the_exit_status() {
    let out = ethica(&["verify", "-f", &fixture("asimov.ethica"), "asimov_lex"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("19683 of 19683"));

    let out = ethica(&["verify", "-f", &fixture("smarthome.ethica"), "smarthome"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAILS"));
    assert!(text.contains("counterexample"));
    assert!(text.contains("fire = true"));
    assert!(text.contains("daylight = false"));
}

#[test]
fn unknown_names_exit_two_and_are_named() {
    let out = ethica(&["verify", "-f", &fixture("asimov.ethica"), "no_such_suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no_such_suite"));

    let out = ethica(&["check", "-f", &fixture("smarthome.ethica"), "NoModel"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NoModel"));
}

#[test]
fn parse_errors_exit_two_with_positioned_diagnostics() {
    let dir = std::env::temp_dir().join("ethica-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.ethica");
    std::fs::write(&path, "model M {\n  actions ,\n}\n").unwrap();
    let out = ethica(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.ethica:2:"));
}

#[test]
fn validate_summarises_the_bundle() {
    let out = ethica(&[
        "validate",
        &fixture("smarthome.ethica"),
        &fixture("asimov.ethica"),
        &fixture("ua_landing.ethica"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1 model(s)"));
}

#[test]
fn select_and_govern_report_their_choices() {
    let out = ethica(&[
        "select",
        "-f",
        &fixture("ua_landing.ethica"),
        "ua_policy",
        "ua_plans",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("selected: empty_field"));

    let out = ethica(&["govern", "-f", &fixture("asimov.ethica"), "demo_asimov"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("selected: t1"));
    assert!(text.contains("rejected t2: beaten at law 1"));
}

#[test]
fn explain_names_the_three_outcomes() {
    let world = "turn_lights_on=true,evacuation_attempt=true,fire=true,daylight=false";
    let smarthome = fixture("smarthome.ethica");

    let out = ethica(&["explain", "-f", &smarthome, "SmartHome", world, "lights_on", "people_are_safe"]);
    assert!(stdout(&out).contains("cause"));
    assert!(!stdout(&out).contains("not a cause"));

    // flipping the fire leaves people safe via the evacuation route
    let out = ethica(&["explain", "-f", &smarthome, "SmartHome", world, "danger_in_house", "people_are_safe"]);
    assert!(stdout(&out).contains("not a cause (the effect survives the intervention)"));

    let dark = "turn_lights_on=false,evacuation_attempt=true,fire=true,daylight=false";
    let out = ethica(&["explain", "-f", &smarthome, "SmartHome", dark, "turn_lights_on", "people_are_safe"]);
    assert!(stdout(&out).contains("not a cause (factuality fails"));
}

#[test]
fn json_output_carries_the_envelope() {
    let out = ethica(&[
        "verify",
        "-f",
        &fixture("ua_landing.ethica"),
        "ua_landing",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert!(value["tool_version"].is_string());
    assert_eq!(value["command"], "verify");
    let reports = value["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for report in reports {
        assert_eq!(report["outcome"], "holds");
        assert_eq!(report["scenarios_checked"], 15);
    }

    let out = ethica(&[
        "check",
        "-f",
        &fixture("smarthome.ethica"),
        "SmartHome",
        "--format",
        "json",
    ]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(value["reports"].as_array().unwrap().len(), 4);
    assert_eq!(value["reports"][3]["permissible"], false);
}

/// Reports must be identical for any worker count, elapsed time aside.
#[test]
fn worker_count_does_not_change_the_report() {
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = ethica(&[
            "verify",
            "-f",
            &fixture("asimov.ethica"),
            "asimov_lex",
            "--format",
            "json",
            "--workers",
            workers,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        for report in value["reports"].as_array_mut().unwrap() {
            report.as_object_mut().unwrap().remove("elapsed_secs");
        }
        outputs.push(value);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn set_is_rejected_outside_check_and_explain() {
    let out = ethica(&[
        "verify",
        "-f",
        &fixture("asimov.ethica"),
        "asimov_lex",
        "--set",
        "u.x=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--set"));
}

#[test]
fn color_env_var_controls_styling_only() {
    let args = ["check", "-f", &fixture("smarthome.ethica"), "SmartHome"];
    let plain = Command::new(env!("CARGO_BIN_EXE_ethica"))
        .args(args)
        .env("ETHICA_COLOR", "never")
        .output()
        .unwrap();
    let colored = Command::new(env!("CARGO_BIN_EXE_ethica"))
        .args(args)
        .env("ETHICA_COLOR", "always")
        .output()
        .unwrap();
    let plain_text = stdout(&plain);
    let colored_text = stdout(&colored);
    assert!(!plain_text.contains('\u{1b}'));
    assert!(colored_text.contains("\u{1b}["));
    // stripping the styling recovers the plain output
    let mut stripped = String::new();
    let mut chars = colored_text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\u{1b}' {
            for c in chars.by_ref() {
                if c == 'm' {
                    break;
                }
            }
        } else {
            stripped.push(c);
        }
    }
    assert_eq!(stripped, plain_text);
}

#[test]
fn exactly_one_mode_override_halves_the_worlds() {
    let out = ethica(&[
        "check",
        "-f",
        &fixture("smarthome.ethica"),
        "SmartHome",
        "--set",
        "mode=exactly_one",
    ]);
    assert!(stdout(&out).contains("of 2 worlds permissible"));
}
