use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use peircelex::acceptance::{self, HOLES_INTERP, SAMPLE_MODEL, TOY_INTERP};
use peircelex::backends::{eval_rel, eval_vect, model_to_relinterp, RelInterp, VectInterp};
use peircelex::diagram::{to_dot, to_svg, Diagram};
use peircelex::grammar::{builtin, first_reading, load_lexicon, pipeline, Lexicon, Reading};
use peircelex::logic::{evaluate, EquivConfig, Formula, Model};
use peircelex::montague::{cross_validate, montague_formula};
use peircelex::peirce::fol_of_sentence;
use peircelex::types::{parse_grammar_type, GrammarType};
use peircelex::Error;

/// Categorial parsing into diagram-valued meanings, existential graphs and
/// first-order logic.
#[derive(Parser)]
#[command(name = "peircelex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Svg,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Fol,
    Rel,
    Vect,
}

#[derive(clap::Args)]
struct Common {
    /// Lexicon file, or the name of a lexicon in $PEIRCELEX_LEXICON_DIR or built in.
    #[arg(long, default_value = "peirce")]
    lexicon: String,
    /// Grammatical type the sentence is parsed at.
    #[arg(long, default_value = "s")]
    target: String,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the syntax trees of a sentence.
    Parse {
        sentence: String,
        #[command(flatten)]
        common: Common,
        /// Every tree rather than the first.
        #[arg(long)]
        all: bool,
    },
    /// Print the normal meaning term and its diagram or formula.
    Meaning {
        sentence: String,
        #[command(flatten)]
        common: Common,
        /// Print the first-order formula instead of the diagram.
        #[arg(long)]
        logic: bool,
        #[arg(long)]
        all: bool,
    },
    /// Render the diagram of a sentence as DOT or SVG.
    Draw {
        sentence: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a sentence against a model or an interpretation.
    Eval {
        sentence: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "rel")]
        backend: Backend,
        /// Model file for the fol and rel backends.
        #[arg(long)]
        model: Option<String>,
        /// Interpretation file for the vect backend, or the rel backend without a model.
        #[arg(long)]
        interp: Option<String>,
    },
    /// Compare the Montague and the diagrammatic reading on small models.
    CheckEquiv {
        sentence: String,
        #[command(flatten)]
        common: Common,
        /// Lexicon of the Montague reading.
        #[arg(long, default_value = "montague")]
        montague: String,
        #[arg(long, default_value_t = 3)]
        max_universe: usize,
    },
    /// Run the acceptance battery.
    Selftest,
}

struct Failure {
    class: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { class: e.class(), message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { class: "usage-error", message: message.into() }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("usage-error: {first}");
            return ExitCode::FAILURE;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}: {}", f.class, f.message.replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Outcome<ExitCode> {
    match command {
        Command::Parse { sentence, common, all } => {
            let format = pick(common.format, Format::Text, &[Format::Text, Format::Json])?;
            let (lex, target) = setup(&common)?;
            let readings = readings(&sentence, &lex, &target, all)?;
            let out = match format {
                Format::Json => {
                    let trees: Vec<Json> = readings.iter().map(|r| r.tree.to_json()).collect();
                    json_text(if all { Json::Array(trees) } else { trees[0].clone() })
                }
                _ => separated(readings.iter().map(|r| r.tree.to_string())),
            };
            emit(&common, &out)?;
        }
        Command::Meaning { sentence, common, logic, all } => {
            let format = if logic {
                pick(common.format, Format::Text, &[Format::Text, Format::Json])?
            } else {
                pick(common.format, Format::Text, &[Format::Text, Format::Json, Format::Dot, Format::Svg])?
            };
            let (lex, target) = setup(&common)?;
            let readings = readings(&sentence, &lex, &target, all)?;
            let out = if logic {
                let f = formula(&sentence, &lex, &readings[0])?;
                match format {
                    Format::Json => json_text(json!({"term": readings[0].term.to_string(), "formula": f.to_string()})),
                    _ => format!("{f}\n"),
                }
            } else {
                match format {
                    Format::Json => {
                        let items: Vec<Json> = readings.iter().map(Reading::to_json).collect();
                        json_text(if all { Json::Array(items) } else { items[0].clone() })
                    }
                    Format::Text => separated(readings.iter().map(|r| format!("term: {}\nvalue: {}\n", r.term, r.value))),
                    Format::Dot => separated(
                        readings.iter().map(|r| Ok(format!("// {}\n{}", r.term, to_dot(diagram(r)?)))).collect::<Outcome<Vec<_>>>()?,
                    ),
                    Format::Svg => separated(readings.iter().map(|r| diagram(r).map(to_svg)).collect::<Outcome<Vec<_>>>()?),
                }
            };
            emit(&common, &out)?;
        }
        Command::Draw { sentence, common } => {
            let format = pick(common.format, Format::Dot, &[Format::Dot, Format::Svg])?;
            let (lex, target) = setup(&common)?;
            let r = first_reading(&sentence, &lex, &target)?;
            let d = diagram(&r)?;
            emit(&common, &if format == Format::Svg { to_svg(d) } else { to_dot(d) })?;
        }
        Command::Eval { sentence, common, backend, model, interp } => {
            pick(common.format, Format::Json, &[Format::Json, Format::Text])?;
            match (backend, &model, &interp) {
                (Backend::Fol, None, _) => return Err(usage("the fol backend needs --model")),
                (Backend::Vect, _, None) => return Err(usage("the vect backend needs --interp")),
                (Backend::Rel, None, None) => return Err(usage("the rel backend needs --model or --interp")),
                (Backend::Vect, Some(_), _) => return Err(usage("the vect backend takes --interp, not --model")),
                _ => {}
            }
            let (lex, target) = setup(&common)?;
            let r = first_reading(&sentence, &lex, &target)?;
            let value = match backend {
                Backend::Fol => {
                    let m = Model::from_json(&read_file(model.as_deref().unwrap_or_default(), "model")?)?;
                    Json::Bool(evaluate(&formula(&sentence, &lex, &r)?, &m, &Default::default())?)
                }
                Backend::Rel => {
                    let d = diagram(&r)?;
                    let i = match &model {
                        Some(path) => model_to_relinterp(&Model::from_json(&read_file(path, "model")?)?, lex.signature())?,
                        None => RelInterp::from_json(&read_file(interp.as_deref().unwrap_or_default(), "interp")?)?,
                    };
                    eval_rel(d, &i)?.to_json()
                }
                Backend::Vect => {
                    let i = VectInterp::from_json(&read_file(interp.as_deref().unwrap_or_default(), "interp")?)?;
                    eval_vect(diagram(&r)?, &i)?.to_json()
                }
            };
            emit(&common, &json_text(value))?;
        }
        Command::CheckEquiv { sentence, common, montague, max_universe } => {
            let format = pick(common.format, Format::Text, &[Format::Text, Format::Json])?;
            let peirce = lexicon(&common.lexicon)?;
            let montague = lexicon(&montague)?;
            let c = cross_validate(&sentence, &montague, &peirce, &EquivConfig::bounded(max_universe))?;
            let out = match format {
                Format::Json => json_text(c.to_json()),
                _ => format!("montague: {}\npeirce: {}\nverdict: {}\n", c.montague, c.peirce, c.verdict),
            };
            emit(&common, &out)?;
            if !c.verdict.is_equivalent() {
                eprintln!("not-equivalent: {}", c.verdict);
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Selftest => {
            // criteria run side by side and report in order
            let outcomes: Vec<_> = std::thread::scope(|s| {
                let handles: Vec<_> = (1..=acceptance::CRITERIA.len()).map(|id| s.spawn(move || acceptance::run(id))).collect();
                handles.into_iter().map(|h| h.join().expect("criteria catch their panics")).collect()
            });
            for o in &outcomes {
                println!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            if passed != outcomes.len() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn pick(format: Option<Format>, default: Format, allowed: &[Format]) -> Outcome<Format> {
    let f = format.unwrap_or(default);
    if !allowed.contains(&f) {
        let name = f.to_possible_value().expect("formats have names").get_name().to_string();
        return Err(usage(format!("--format {name} is not available here")));
    }
    Ok(f)
}

fn setup(common: &Common) -> Outcome<(Lexicon, GrammarType)> {
    let target = parse_grammar_type(&common.target)?;
    Ok((lexicon(&common.lexicon)?, target))
}

/// A path, then a file in `$PEIRCELEX_LEXICON_DIR`, then a built-in name.
fn lexicon(name: &str) -> Outcome<Lexicon> {
    if Path::new(name).is_file() {
        return Ok(load_lexicon(name)?);
    }
    if let Some(dir) = std::env::var_os("PEIRCELEX_LEXICON_DIR") {
        for candidate in [Path::new(&dir).join(name), Path::new(&dir).join(format!("{name}.json"))] {
            if candidate.is_file() {
                return Ok(load_lexicon(candidate)?);
            }
        }
    }
    Ok(builtin(stem(name))?)
}

fn stem(name: &str) -> &str {
    let base = Path::new(name).file_name().and_then(|s| s.to_str()).unwrap_or(name);
    base.strip_suffix(".json").unwrap_or(base)
}

/// A file's contents, or one of the bundled examples by name.
fn read_file(name: &str, what: &str) -> Outcome<String> {
    if Path::new(name).is_file() {
        return std::fs::read_to_string(name).map_err(|e| Error::from(e).into());
    }
    let bundled = match (what, stem(name)) {
        ("interp", "toy") => TOY_INTERP,
        ("interp", "holes") => HOLES_INTERP,
        ("model", "model") => SAMPLE_MODEL,
        _ => return Err(Error::Io(format!("no {what} file {name}")).into()),
    };
    Ok(bundled.to_string())
}

fn readings(sentence: &str, lex: &Lexicon, target: &GrammarType, all: bool) -> Outcome<Vec<Reading>> {
    if !all {
        return Ok(vec![first_reading(sentence, lex, target)?]);
    }
    let rs = pipeline(sentence, lex, target)?;
    if rs.is_empty() {
        return Err(Error::NoParse(sentence.to_string()).into());
    }
    Ok(rs)
}

fn diagram(r: &Reading) -> Outcome<&Diagram> {
    r.value
        .as_diagram()
        .ok_or_else(|| Error::Unsupported("the lexicon produces formulas, not diagrams".into()).into())
}

fn formula(sentence: &str, lex: &Lexicon, r: &Reading) -> Outcome<Formula> {
    Ok(match r.value {
        peircelex::lambda::Value::Formula(_) => montague_formula(sentence, lex)?,
        peircelex::lambda::Value::Diagram(_) => fol_of_sentence(sentence, lex)?,
    })
}

fn json_text(v: Json) -> String {
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
}

fn separated(parts: impl IntoIterator<Item = String>) -> String {
    let parts: Vec<String> = parts.into_iter().collect();
    if parts.len() == 1 {
        return parts.into_iter().next().expect("one part");
    }
    parts.iter().enumerate().map(|(k, p)| format!("# reading {}\n{p}", k + 1)).collect()
}

fn emit(common: &Common, text: &str) -> Outcome<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::from(e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
