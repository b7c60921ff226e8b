use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peircelex")).args(args).env_remove("PEIRCELEX_LEXICON_DIR").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn error_line(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(1), "{args:?}");
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    err.trim_end().to_string()
}

#[test]
fn man_s_not_hot_as_a_formula() {
    assert_eq!(stdout(&["meaning", "Man's Not Hot", "--lexicon", "peirce.json", "--logic"]), "exists x0. man(x0) & ~hot(x0)\n");
}

#[test]
fn montague_lexicon_gives_formulas() {
    assert_eq!(stdout(&["meaning", "Alice sleeps", "--lexicon", "montague", "--logic"]), "sleeps(Alice)\n");
}

#[test]
fn island_uses_the_coercion() {
    let out = stdout(&["parse", "no man is an island", "--lexicon", "peirce.json"]);
    assert!(out.contains("[p<-n]"), "{out}");
    assert!(!out.contains("# reading"));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["parse", "no man is an island", "--format", "json", "--all"])).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 1);
}

#[test]
fn very_big_car_is_a_json_vector() {
    let out = stdout(&["eval", "very big car", "--lexicon", "toy", "--target", "n", "--backend", "vect", "--interp", "toy.json"]);
    let v: Vec<f64> = serde_json::from_str(&out).unwrap();
    assert_eq!(v.len(), 4);
}

#[test]
fn backends_agree_on_the_sample_model() {
    let fol = stdout(&["eval", "Alice kills a mortal", "--backend", "fol", "--model", "model.json"]);
    let rel = stdout(&["eval", "Alice kills a mortal", "--backend", "rel", "--model", "model.json"]);
    assert_eq!(fol, rel);
}

#[test]
fn draw_writes_dot_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.svg");
    stdout(&["draw", "Man's Not Hot", "--format", "svg", "--output", path.to_str().unwrap()]);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("ellipse"), "{svg}");
    let dot = stdout(&["draw", "Man's Not Hot"]);
    assert!(dot.starts_with("digraph") && dot.contains("label=\"cut\""), "{dot}");
}

#[test]
fn meaning_formats() {
    let text = stdout(&["meaning", "Alice sleeps"]);
    assert!(text.starts_with("term: ") && text.contains("\nvalue: "), "{text}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&["meaning", "Alice sleeps", "--format", "json"])).unwrap();
    assert_eq!(json["value"]["kind"], "diagram");
    assert!(stdout(&["meaning", "Alice sleeps", "--format", "dot"]).contains("digraph"));
}

#[test]
fn check_equiv_reports_the_verdict() {
    let out = stdout(&["check-equiv", "every man sleeps", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["equivalent"], true);
}

#[test]
fn lexicon_directory_is_searched() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("mine.json"), peircelex::grammar::builtin_source("peirce").unwrap()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_peircelex"))
        .args(["meaning", "Alice sleeps", "--lexicon", "mine", "--logic"])
        .env("PEIRCELEX_LEXICON_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn error_classes() {
    assert!(error_line(&["parse", "sleeps Alice"]).starts_with("no-parse: "));
    assert!(error_line(&["parse", "blorp sleeps"]).starts_with("missing-symbol: "));
    assert!(error_line(&["meaning", "Alice sleeps", "--lexicon", "nowhere"]).starts_with("missing-symbol: "));
    assert!(error_line(&["parse", "Alice sleeps", "--target", "(s"]).starts_with("syntax-error: "));
    let bad = tempfile::tempdir().unwrap();
    let interp = bad.path().join("bad.json");
    std::fs::write(&interp, r#"{"dims": {"N": 4}, "boxes": {"car": [1, 2]}}"#).unwrap();
    let line = error_line(&["eval", "very big car", "--lexicon", "toy", "--target", "n", "--backend", "vect", "--interp", interp.to_str().unwrap()]);
    assert!(line.starts_with("shape-mismatch: ") || line.starts_with("missing-symbol: "), "{line}");
    assert!(error_line(&["eval", "Man's Not Hot", "--backend", "vect", "--interp", "toy"]).starts_with("missing-symbol: "));
}

#[test]
fn flags_are_checked_before_work() {
    assert!(error_line(&["eval", "Alice sleeps", "--backend", "fol"]).starts_with("usage-error: "));
    assert!(error_line(&["eval", "Alice sleeps", "--backend", "vect", "--lexicon", "nowhere"]).starts_with("usage-error: "));
    assert!(error_line(&["draw", "Alice sleeps", "--format", "json"]).starts_with("usage-error: "));
    assert!(error_line(&["frobnicate"]).starts_with("usage-error: "));
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        &["meaning", "every big man sleeps", "--format", "json"][..],
        &["draw", "concepts with attitude", "--lexicon", "holes", "--target", "n", "--format", "svg"],
        &["eval", "Man's Not Hot", "--model", "model.json"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}
