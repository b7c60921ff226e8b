//! The acceptance battery: one line per criterion, failing if any fails.
//! Determinism is checked in the library and again on the binary.

use std::process::{Command, ExitCode};

use peircelex::acceptance::{self, Outcome};

const INVOCATIONS: &[&[&str]] = &[
    &["meaning", "Man's Not Hot", "--logic"],
    &["meaning", "every big man sleeps", "--format", "json"],
    &["draw", "concepts with attitude", "--lexicon", "holes", "--target", "n", "--format", "svg"],
    &["draw", "Alice loves Bob", "--lexicon", "ccg"],
    &["eval", "very big car", "--lexicon", "toy", "--target", "n", "--backend", "vect", "--interp", "toy.json"],
    &["eval", "Alice kills a mortal", "--backend", "rel", "--model", "model.json"],
];

fn binary_runs() -> Result<usize, String> {
    let mut bytes = 0;
    for args in INVOCATIONS {
        let run = || Command::new(env!("CARGO_BIN_EXE_peircelex")).args(*args).output().map_err(|e| e.to_string());
        let (a, b) = (run()?, run()?);
        if !a.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&a.stderr)));
        }
        if a.stdout != b.stdout {
            return Err(format!("{args:?} printed different bytes"));
        }
        bytes += a.stdout.len();
    }
    Ok(bytes)
}

fn main() -> ExitCode {
    let mut outcomes: Vec<Outcome> = acceptance::run_all();
    if let Some(o) = outcomes.iter_mut().find(|o| o.id == 10) {
        match binary_runs() {
            Ok(bytes) => o.detail.push_str(&format!("; {} binary invocations repeat byte for byte ({bytes} bytes)", INVOCATIONS.len())),
            Err(e) => {
                o.passed = false;
                o.detail.push_str(&format!("; binary: {e}"));
            }
        }
    }
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
