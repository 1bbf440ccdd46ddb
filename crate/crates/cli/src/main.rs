use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use toposbench_core::finiteness::{decide, FinMode, Notion};
use toposbench_core::logic::{holds_with, parse_formula, Mode};
use toposbench_core::machines::{tm_closure, tm_computed_relation, ConfigSet, RawTm, TMSpec};
use toposbench_core::model::Model;
use toposbench_core::nat::{enumerate_nat_trans_within, Filter, DEFAULT_BUDGET};
use toposbench_core::suite::{self, SuiteConfig};
use toposbench_core::{Presheaf, ToposError};

const BUDGET_VAR: &str = "TOPOSBENCH_BUDGET";

#[derive(Parser)]
#[command(
    name = "toposbench",
    version,
    about = "Finite presheaf toposes, finiteness deciders and closure-semantics Turing machines"
)]
struct Cli {
    /// Include wall-clock timings in the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every law of a model file.
    Validate { model: PathBuf },
    /// List the monomorphisms between two objects.
    Monos {
        model: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Decide a finiteness notion for an object.
    Finiteness {
        model: PathBuf,
        #[arg(long)]
        object: String,
        /// `dedekind`, `kuratowski` or `lp:<p>`.
        #[arg(long)]
        notion: Notion,
        #[arg(long, value_enum, default_value_t = FinModeArg::Internal)]
        mode: FinModeArg,
    },
    /// Evaluate a sentence of the internal language.
    Holds {
        model: PathBuf,
        #[arg(long)]
        formula: Option<String>,
        /// Read the sentence from a file instead.
        #[arg(long, conflicts_with = "formula")]
        formula_file: Option<PathBuf>,
        /// Bind a ground type name to an object, `var=object`.
        #[arg(long = "bind", value_parser = parse_binding)]
        binds: Vec<(String, String)>,
        #[arg(long, value_enum, default_value_t = EvalMode::Expand)]
        eval: EvalMode,
    },
    /// Run a Turing machine under closure semantics.
    Tm {
        #[arg(value_enum)]
        action: TmAction,
        machine: PathBuf,
        #[arg(long = "input")]
        inputs: Vec<String>,
        /// Maximum number of configurations.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run the seeded property suites.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Model files whose objects are checked besides the random ones.
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 100)]
        objects: usize,
        /// Check a deliberately wrong implication table as well.
        #[arg(long, hide = true)]
        inject_broken_heyting: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FinModeArg {
    Internal,
    External,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMode {
    Expand,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum TmAction {
    Run,
    Closure,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(v, o)| (v.trim().to_string(), o.trim().to_string()))
        .filter(|(v, o)| !v.is_empty() && !o.is_empty())
        .ok_or_else(|| format!("expected var=object, got `{s}`"))
}

enum Failure {
    /// A law or property does not hold.
    Violation(String),
    /// The input could not be read or parsed.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Violation(m) | Failure::Input(m) => m,
        }
    }
}

/// Errors that mean the input itself is unusable.
fn classify(e: ToposError) -> Failure {
    match e {
        ToposError::Malformed(_)
        | ToposError::SyntaxError { .. }
        | ToposError::UnknownSymbol { .. }
        | ToposError::TypeMismatch { .. }
        | ToposError::UnboundGround(_)
        | ToposError::FreeVariable(_)
        | ToposError::UnknownName(_)
        | ToposError::BaseMismatch => Failure::Input(e.to_string()),
        _ => Failure::Violation(e.to_string()),
    }
}

struct Outcome {
    result: Json,
    summary: String,
    exit: u8,
    budget_exhausted: bool,
}

impl Outcome {
    fn ok(result: Json, summary: String) -> Self {
        Self {
            result,
            summary,
            exit: 0,
            budget_exhausted: false,
        }
    }
}

fn budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| Failure::Input(format!("{BUDGET_VAR} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Model, Failure> {
    Model::parse(&read(path)?).map_err(classify)
}

fn object(model: &Model, name: &str) -> Result<Arc<Presheaf>, Failure> {
    model
        .object(name)
        .map_err(|_| Failure::Input(format!("unknown object `{name}`")))
}

fn validate(path: &Path) -> Result<Outcome, Failure> {
    let text = read(path)?;
    let model = match Model::parse(&text) {
        Ok(m) => m,
        Err(ToposError::Malformed(m)) => return Err(Failure::Input(m)),
        Err(e) => return Err(Failure::Violation(e.to_string())),
    };
    let counts = json!({
        "bases": model.bases.len(),
        "presheaves": model.presheaves.len(),
        "morphisms": model.morphisms.len(),
    });
    let summary = format!(
        "valid: {} base(s), {} presheaf(s), {} morphism(s)",
        model.bases.len(),
        model.presheaves.len(),
        model.morphisms.len()
    );
    Ok(Outcome::ok(json!({ "valid": true, "counts": counts }), summary))
}

fn monos(path: &Path, from: &str, to: &str, budget: usize) -> Result<Outcome, Failure> {
    let model = load(path)?;
    let (a, b) = (object(&model, from)?, object(&model, to)?);
    let found = enumerate_nat_trans_within(&a, &b, Filter::Mono, budget).map_err(classify)?;
    let listed: Vec<Json> = found.iter().map(|m| json!(m.describe())).collect();
    let summary = format!("{} mono(s) {from} -> {to}", found.len());
    Ok(Outcome::ok(
        json!({ "from": from, "to": to, "count": found.len(), "monos": listed }),
        summary,
    ))
}

fn finiteness(path: &Path, name: &str, notion: Notion, mode: FinModeArg, budget: usize) -> Result<Outcome, Failure> {
    let model = load(path)?;
    let a = object(&model, name)?;
    let mode = match mode {
        FinModeArg::Internal => FinMode::Internal,
        FinModeArg::External => FinMode::External,
    };
    let v = decide(&a, notion, mode, budget).map_err(classify)?;
    let summary = format!(
        "{name} is {}{notion}-finite ({mode})",
        if v.verdict { "" } else { "not " }
    );
    let mut result = v.to_json();
    result["object"] = json!(name);
    Ok(Outcome::ok(result, summary))
}

/// Pairs of morphisms named in the formula that agree in type but not externally.
fn external_notes(model: &Model, formula: &str) -> Vec<String> {
    let mentioned: BTreeSet<&String> = model.morphisms.keys().filter(|n| mentions(formula, n)).collect();
    let mut notes = Vec::new();
    for f in &mentioned {
        for g in &mentioned {
            let (mf, mg) = (&model.morphisms[*f], &model.morphisms[*g]);
            if f < g && Arc::ptr_eq(mf.source(), mg.source()) && Arc::ptr_eq(mf.target(), mg.target()) && mf != mg {
                notes.push(format!("{f} and {g} are different morphisms externally"));
            }
        }
    }
    notes
}

fn mentions(formula: &str, name: &str) -> bool {
    formula
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .any(|tok| tok == name)
}

fn holds(path: &Path, formula: &str, binds: &[(String, String)], eval: EvalMode) -> Result<Outcome, Failure> {
    let model = load(path)?;
    for (_, name) in binds {
        object(&model, name)?;
    }
    let sig = model.signature(binds).map_err(classify)?;
    let notes = external_notes(&model, formula);
    let sentence = parse_formula(formula).map_err(classify)?;
    let mode = match eval {
        EvalMode::Expand => Mode::Expand,
        EvalMode::Direct => Mode::Direct,
    };
    let (ok, tv) = holds_with(&sentence, &sig, mode).map_err(classify)?;
    let summary = format!("{} ({})", if ok { "holds" } else { "does not hold" }, formula.trim());
    let result = json!({
        "formula": formula.trim(),
        "bindings": binds.iter().map(|(v, o)| (v.clone(), json!(o))).collect::<Map<String, Json>>(),
        "holds": ok,
        "truth_value": tv.sieves(),
        "notes": notes,
    });
    Ok(Outcome::ok(result, summary))
}

fn tm(
    action: TmAction,
    path: &Path,
    inputs: &[String],
    budget: Option<usize>,
    default: usize,
) -> Result<Outcome, Failure> {
    let raw: RawTm = serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(e.to_string()))?;
    let t = TMSpec::from_raw(&raw).map_err(|e| Failure::Input(e.to_string()))?;
    let budget = budget.unwrap_or(default);
    let base = json!({ "fin": t.fin().to_string(), "budget": budget, "inputs": inputs });
    match action {
        TmAction::Run => {
            let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
            match tm_computed_relation(&t, &refs, budget) {
                Ok(rel) => {
                    let pairs: Vec<Json> = rel.iter().map(|(x, y)| json!([x, y])).collect();
                    let mut result = base;
                    result["relation"] = json!(pairs);
                    let summary = rel
                        .iter()
                        .map(|(x, y)| format!("{x:?} -> {y:?}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    Ok(Outcome::ok(result, format!("computed: {summary}")))
                }
                Err(ToposError::BudgetExhausted { .. }) => {
                    let mut result = base;
                    result["relation"] = Json::Null;
                    Ok(Outcome {
                        result,
                        summary: format!("budget of {budget} configurations exhausted"),
                        exit: 0,
                        budget_exhausted: true,
                    })
                }
                Err(e) => Err(classify(e)),
            }
        }
        TmAction::Closure => {
            let mut init = ConfigSet::new();
            for w in inputs {
                init.insert(t.initial(&t.word(w).map_err(|e| Failure::Input(e.to_string()))?));
            }
            let cl = tm_closure(&t, &init, budget).map_err(classify)?;
            let mut result = base;
            result["size"] = json!(cl.configs.len());
            result["configurations"] = json!(cl.configs.iter().map(|c| c.to_json(&t)).collect::<Vec<_>>());
            let summary = format!(
                "{} configuration(s){}",
                cl.configs.len(),
                if cl.exhausted { ", budget exhausted" } else { "" }
            );
            Ok(Outcome {
                result,
                summary,
                exit: 0,
                budget_exhausted: cl.exhausted,
            })
        }
    }
}

fn run_suite(seed: u64, models: &[PathBuf], objects: usize, broken: bool, budget: usize) -> Result<Outcome, Failure> {
    let mut fixtures = Vec::new();
    for m in models {
        fixtures.extend(load(m)?.presheaves.into_values());
    }
    let config = SuiteConfig {
        random_objects: objects,
        budget,
        inject_broken_heyting: broken,
        ..SuiteConfig::new(seed)
    };
    let rep = suite::run(&config, &fixtures).map_err(classify)?;
    let total: usize = rep.checks.values().sum();
    let (exit, summary) = match rep.failures.first() {
        None => (0, format!("{total} checks passed (seed {seed})")),
        Some(first) => (
            1,
            format!("{} of {total} checks failed; first: {first}", rep.failures.len()),
        ),
    };
    Ok(Outcome {
        result: rep.to_json(),
        summary,
        exit,
        budget_exhausted: false,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, models): (&str, Vec<&PathBuf>) = match &cli.command {
        Command::Validate { model } => ("validate", vec![model]),
        Command::Monos { model, .. } => ("monos", vec![model]),
        Command::Finiteness { model, .. } => ("finiteness", vec![model]),
        Command::Holds { model, .. } => ("holds", vec![model]),
        Command::Tm { machine, .. } => ("tm", vec![machine]),
        Command::Suite { models, .. } => ("suite", models.iter().collect()),
    };
    let outcome = budget().and_then(|budget| match &cli.command {
        Command::Validate { model } => validate(model),
        Command::Monos { model, from, to } => monos(model, from, to, budget),
        Command::Finiteness {
            model,
            object,
            notion,
            mode,
        } => finiteness(model, object, *notion, *mode, budget),
        Command::Holds {
            model,
            formula,
            formula_file,
            binds,
            eval,
        } => {
            let text = match (formula, formula_file) {
                (Some(f), _) => f.clone(),
                (None, Some(p)) => read(p)?,
                (None, None) => return Err(Failure::Input("give --formula or --formula-file".into())),
            };
            holds(model, &text, binds, *eval)
        }
        Command::Tm {
            action,
            machine,
            inputs,
            budget: b,
        } => {
            let default = if std::env::var(BUDGET_VAR).is_ok() {
                budget
            } else {
                10_000
            };
            tm(*action, machine, inputs, *b, default)
        }
        Command::Suite {
            seed,
            models,
            objects,
            inject_broken_heyting,
        } => run_suite(*seed, models, *objects, *inject_broken_heyting, budget),
    });
    let mut report = json!({
        "command": name,
        "models": models.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "engine_version": env!("CARGO_PKG_VERSION"),
    });
    let code = match outcome {
        Ok(o) => {
            report["result"] = o.result;
            report["budget_exhausted"] = json!(o.budget_exhausted);
            report["ok"] = json!(o.exit == 0);
            eprintln!("{}", o.summary);
            o.exit
        }
        Err(f) => {
            report["error"] = json!(f.message());
            report["ok"] = json!(false);
            eprintln!("error: {}", f.message());
            f.code()
        }
    };
    if cli.timings {
        report["timings_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(code)
}
