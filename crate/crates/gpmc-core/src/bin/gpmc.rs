//! Command-line front end: loads model and automaton files, runs checks, and
//! prints deterministic JSON reports.
//!
//! Exit codes: 0 on success, 1 when the inputs fail verification (unknown
//! names, unsupported formulas, validation violations, nondeterminism where
//! determinism is required), 2 on I/O or format errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use gpmc_core::format::{self, LoadError};
use gpmc_core::gpks::{Gpks, StateExpr};
use gpmc_core::gpoltl::{self, CheckError, Measure};
use gpmc_core::oracle::{self, OracleConfig, OracleStart};
use gpmc_core::patterns::{self, Pattern, PatternKind};
use gpmc_core::product::{self, CheckTarget};
use gpmc_core::report::{matrix_value, vector_value, ReportBuilder};
use gpmc_core::{FuzzyVector, Poss};

#[derive(Parser)]
#[command(
    name = "gpmc",
    version,
    about = "Quantitative model checker for possibilistic Kripke structures with fuzzy labels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Po,
    Ne,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Po => Measure::Po,
            MeasureArg::Ne => Measure::Ne,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClosureKind {
    Transitive,
    Reflexive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PatternName {
    Now,
    Eventually,
    BoundedEventually,
    Always,
    Until,
    BoundedUntil,
    Repeated,
    Persistence,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file for well-formedness.
    Validate { model: PathBuf },
    /// Print the per-state supremum of path possibilities.
    Rp { model: PathBuf },
    /// Print the transitive or reflexive-transitive closure of the
    /// transition matrix.
    Closure {
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: ClosureKind,
        /// Also verify that the closure is idempotent.
        #[arg(long)]
        verify: bool,
    },
    /// Evaluate a formula or a named pattern over the model.
    Check {
        model: PathBuf,
        #[arg(long, conflicts_with = "pattern")]
        formula: Option<String>,
        #[arg(long, value_enum)]
        pattern: Option<PatternName>,
        /// Fuzzy-state argument for single-argument patterns: a
        /// propositional expression or a `{"state": "degree"}` map.
        #[arg(long)]
        set: Option<String>,
        /// Left argument of until patterns.
        #[arg(long)]
        left: Option<String>,
        /// Right argument of until patterns.
        #[arg(long)]
        right: Option<String>,
        /// Step bound for the bounded patterns.
        #[arg(long)]
        bound: Option<u32>,
        /// Number of next-steps to apply around the pattern.
        #[arg(long, default_value_t = 0)]
        next: u32,
        #[arg(long, conflicts_with = "initial")]
        state: Option<String>,
        /// Aggregate over the initial distribution.
        #[arg(long)]
        initial: bool,
        #[arg(long, value_enum, default_value = "po")]
        measure: MeasureArg,
    },
    /// Check a regular safety property given by a deterministic finite-word
    /// automaton over its good prefixes.
    Safety {
        model: PathBuf,
        automaton: PathBuf,
        #[arg(long, conflicts_with = "initial")]
        state: Option<String>,
        #[arg(long)]
        initial: bool,
        /// Report only one measure instead of both.
        #[arg(long, value_enum)]
        measure: Option<MeasureArg>,
        /// Write the product model to this path.
        #[arg(long)]
        emit_product: Option<PathBuf>,
    },
    /// Check an ω-regular property given by a fuzzy Büchi automaton.
    Omega {
        model: PathBuf,
        automaton: PathBuf,
        #[arg(long, conflicts_with = "initial")]
        state: Option<String>,
        #[arg(long)]
        initial: bool,
        #[arg(long, value_enum)]
        measure: Option<MeasureArg>,
        #[arg(long)]
        emit_product: Option<PathBuf>,
    },
    /// Brute-force evaluation of any formula by lasso enumeration.
    Oracle {
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with = "initial")]
        state: Option<String>,
        #[arg(long)]
        initial: bool,
        #[arg(long)]
        prefix_bound: Option<usize>,
        #[arg(long)]
        cycle_bound: Option<usize>,
        #[arg(long, value_enum, default_value = "po")]
        measure: MeasureArg,
        /// Re-run with doubled bounds and report whether the value agrees.
        #[arg(long)]
        double_check: bool,
    },
}

enum CliError {
    /// Inputs are well-formed but fail verification requirements.
    Input(String),
    /// Unreadable or malformed files and expressions.
    Format(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Format(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Format(m) => m,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> CliError {
        CliError::Format(e.to_string())
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<gpmc_core::ModelError> for CliError {
    fn from(e: gpmc_core::ModelError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<gpmc_core::product::ProductError> for CliError {
    fn from(e: gpmc_core::product::ProductError) -> CliError {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, code)) => {
            print!("{report}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(String, u8), CliError> {
    match command {
        Command::Validate { model } => cmd_validate(model),
        Command::Rp { model } => cmd_rp(model),
        Command::Closure {
            model,
            kind,
            verify,
        } => cmd_closure(model, kind, verify),
        Command::Check {
            model,
            formula,
            pattern,
            set,
            left,
            right,
            bound,
            next,
            state,
            initial,
            measure,
        } => cmd_check(
            model, formula, pattern, set, left, right, bound, next, state, initial, measure,
        ),
        Command::Safety {
            model,
            automaton,
            state,
            initial,
            measure,
            emit_product,
        } => cmd_product_check(model, automaton, state, initial, measure, emit_product, false),
        Command::Omega {
            model,
            automaton,
            state,
            initial,
            measure,
            emit_product,
        } => cmd_product_check(model, automaton, state, initial, measure, emit_product, true),
        Command::Oracle {
            model,
            formula,
            state,
            initial,
            prefix_bound,
            cycle_bound,
            measure,
            double_check,
        } => cmd_oracle(
            model,
            formula,
            state,
            initial,
            prefix_bound,
            cycle_bound,
            measure,
            double_check,
        ),
    }
}

fn load(path: &PathBuf) -> Result<Gpks, CliError> {
    Ok(format::load_model(path)?)
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn cmd_validate(path: PathBuf) -> Result<(String, u8), CliError> {
    let model = load(&path)?;
    let violations = model.validate();
    let report = ReportBuilder::new("validate")
        .field("model", path_str(&path))
        .field(
            "violations",
            Value::Array(
                violations
                    .iter()
                    .map(|v| Value::String(v.to_string()))
                    .collect(),
            ),
        )
        .field("normal", model.is_normal())
        .field("crisp_labels", model.has_crisp_labels())
        .finish();
    Ok((report, u8::from(!violations.is_empty())))
}

fn cmd_rp(path: PathBuf) -> Result<(String, u8), CliError> {
    let model = load(&path)?;
    let report = ReportBuilder::new("rp")
        .field("model", path_str(&path))
        .field("r_p", vector_value(&model, &model.path_sup()))
        .finish();
    Ok((report, 0))
}

fn cmd_closure(path: PathBuf, kind: ClosureKind, verify: bool) -> Result<(String, u8), CliError> {
    let model = load(&path)?;
    let closure = match kind {
        ClosureKind::Transitive => model.trans().transitive_closure(),
        ClosureKind::Reflexive => model.trans().reflexive_transitive_closure(),
    }
    .expect("transition matrix is square");
    let mut report = ReportBuilder::new("closure")
        .field("model", path_str(&path))
        .field(
            "kind",
            match kind {
                ClosureKind::Transitive => "transitive",
                ClosureKind::Reflexive => "reflexive",
            },
        )
        .field("closure", matrix_value(&model, &closure));
    if verify {
        let again = match kind {
            ClosureKind::Transitive => closure.transitive_closure(),
            ClosureKind::Reflexive => closure.reflexive_transitive_closure(),
        }
        .expect("closure is square");
        report = report.field("idempotent", again == closure);
    }
    Ok((report.finish(), 0))
}

/// Parses a fuzzy-state argument: either a `{"state": "degree"}` map or a
/// propositional expression over the model's atomic propositions.
fn fuzzy_state(model: &Gpks, text: &str) -> Result<FuzzyVector, CliError> {
    if text.trim_start().starts_with('{') {
        let map: std::collections::BTreeMap<String, String> = serde_json::from_str(text)
            .map_err(|e| CliError::Format(format!("bad state map: {e}")))?;
        let mut entries = vec![Poss::ZERO; model.state_count()];
        for (state, value) in map {
            let idx = model.require_state(&state)?;
            entries[idx] = Poss::parse(&value)
                .map_err(|e| CliError::Format(format!("bad degree for `{state}`: {e}")))?;
        }
        return Ok(FuzzyVector::new(entries));
    }
    let formula =
        gpoltl::parse(text).map_err(|e| CliError::Format(format!("bad state expression: {e}")))?;
    let expr: StateExpr = gpoltl::as_state_expr(&formula).ok_or_else(|| {
        CliError::Input(format!(
            "`{text}` contains temporal operators; fuzzy-state arguments must be propositional"
        ))
    })?;
    Ok(model.eval_state_expr(&expr)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    path: PathBuf,
    formula: Option<String>,
    pattern: Option<PatternName>,
    set: Option<String>,
    left: Option<String>,
    right: Option<String>,
    bound: Option<u32>,
    next: u32,
    state: Option<String>,
    initial: bool,
    measure: MeasureArg,
) -> Result<(String, u8), CliError> {
    let model = load(&path)?;
    let mut report = ReportBuilder::new("check").field("model", path_str(&path));

    let vector = match (&formula, pattern) {
        (Some(text), None) => {
            let phi =
                gpoltl::parse(text).map_err(|e| CliError::Format(format!("bad formula: {e}")))?;
            report = report.field("formula", text.as_str());
            gpoltl::check_vector(&model, &phi, measure.into())?
        }
        (None, Some(name)) => {
            let require = |opt: &Option<String>, flag: &str| -> Result<String, CliError> {
                opt.clone()
                    .ok_or_else(|| CliError::Input(format!("pattern requires {flag}")))
            };
            let pattern_name;
            let kind = match name {
                PatternName::Now => {
                    pattern_name = "now";
                    PatternKind::Now(fuzzy_state(&model, &require(&set, "--set")?)?)
                }
                PatternName::Eventually => {
                    pattern_name = "eventually";
                    PatternKind::Eventually(fuzzy_state(&model, &require(&set, "--set")?)?)
                }
                PatternName::Always => {
                    pattern_name = "always";
                    PatternKind::Always(fuzzy_state(&model, &require(&set, "--set")?)?)
                }
                PatternName::Repeated => {
                    pattern_name = "repeated";
                    PatternKind::RepeatedlyEventually(fuzzy_state(&model, &require(&set, "--set")?)?)
                }
                PatternName::Persistence => {
                    pattern_name = "persistence";
                    PatternKind::EventuallyForever(fuzzy_state(&model, &require(&set, "--set")?)?)
                }
                PatternName::BoundedEventually => {
                    pattern_name = "bounded-eventually";
                    PatternKind::BoundedEventually(
                        fuzzy_state(&model, &require(&set, "--set")?)?,
                        bound.ok_or_else(|| CliError::Input("pattern requires --bound".into()))?,
                    )
                }
                PatternName::Until => {
                    pattern_name = "until";
                    PatternKind::Until(
                        fuzzy_state(&model, &require(&left, "--left")?)?,
                        fuzzy_state(&model, &require(&right, "--right")?)?,
                    )
                }
                PatternName::BoundedUntil => {
                    pattern_name = "bounded-until";
                    PatternKind::BoundedUntil(
                        fuzzy_state(&model, &require(&left, "--left")?)?,
                        fuzzy_state(&model, &require(&right, "--right")?)?,
                        bound.ok_or_else(|| CliError::Input("pattern requires --bound".into()))?,
                    )
                }
            };
            report = report.field("pattern", pattern_name);
            if let Some(s) = &set {
                report = report.field("set", s.as_str());
            }
            if let Some(l) = &left {
                report = report.field("left", l.as_str());
            }
            if let Some(r) = &right {
                report = report.field("right", r.as_str());
            }
            if let Some(n) = bound {
                report = report.field("bound", n);
            }
            if next > 0 {
                report = report.field("next", next);
            }
            let pattern = Pattern { shifts: next, kind };
            let result = match Measure::from(measure) {
                Measure::Po => patterns::possibility(&model, &pattern),
                Measure::Ne => patterns::necessity(&model, &pattern),
            };
            result.map_err(|e| CliError::Input(e.to_string()))?
        }
        _ => {
            return Err(CliError::Input(
                "exactly one of --formula or --pattern is required".into(),
            ))
        }
    };

    report = report.field(
        "measure",
        match measure {
            MeasureArg::Po => "po",
            MeasureArg::Ne => "ne",
        },
    );
    report = report.field("values", vector_value(&model, &vector));
    if let Some(name) = &state {
        let idx = model.require_state(name)?;
        report = report
            .field("state", name.as_str())
            .field("value", vector.get(idx).to_string());
    }
    if initial {
        let aggregated =
            patterns::aggregate_initial(&model, &vector).expect("vector spans the state space");
        report = report.field("initial", aggregated.to_string());
    }
    Ok((report.finish(), 0))
}

fn product_target(state: &Option<String>, initial: bool) -> Result<CheckTarget, CliError> {
    match (state, initial) {
        (Some(name), false) => Ok(CheckTarget::State(name.clone())),
        (None, true) => Ok(CheckTarget::Initial),
        _ => Err(CliError::Input(
            "exactly one of --state or --initial is required".into(),
        )),
    }
}

fn cmd_product_check(
    model_path: PathBuf,
    automaton_path: PathBuf,
    state: Option<String>,
    initial: bool,
    measure: Option<MeasureArg>,
    emit_product: Option<PathBuf>,
    omega: bool,
) -> Result<(String, u8), CliError> {
    let model = load(&model_path)?;
    let automaton = format::load_automaton(&automaton_path)?;
    let target = product_target(&state, initial)?;
    let property = automaton_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path_str(&automaton_path));

    let mut report = ReportBuilder::new(if omega { "omega" } else { "safety" })
        .field("model", path_str(&model_path))
        .field("automaton", path_str(&automaton_path))
        .field("property", property.as_str());
    match &target {
        CheckTarget::State(name) => report = report.field("state", name.as_str()),
        CheckTarget::Initial => report = report.field("initial", true),
    }

    let want_po = measure != Some(MeasureArg::Ne);
    let want_ne = measure != Some(MeasureArg::Po);

    let check = if omega {
        product::omega_report(&model, &automaton, &target, &property)?
    } else {
        match &target {
            CheckTarget::State(name) => {
                product::safety_report(&model, &automaton, name, &property)?
            }
            CheckTarget::Initial => {
                // Safety at the initial distribution: aggregate the
                // per-state values, necessity through the implication.
                let mut po = Poss::ZERO;
                let mut ne = Poss::ONE;
                let mut accepting = Vec::new();
                for (idx, name) in model.states().iter().enumerate() {
                    let weight = model.initial().get(idx);
                    if weight.is_zero() {
                        continue;
                    }
                    let state = product::safety_report(&model, &automaton, name, &property)?;
                    po = po.max(weight.min(state.possibility));
                    ne = ne.min(weight.implies(state.necessity));
                    accepting = state.accepting;
                }
                product::CheckReport {
                    property: property.clone(),
                    target: target.clone(),
                    possibility: po,
                    necessity: ne,
                    accepting,
                }
            }
        }
    };
    if want_po {
        report = report.field("po", check.possibility.to_string());
    }
    if want_ne {
        report = report.field("ne", check.necessity.to_string());
    }
    let mut accepting = serde_json::Map::new();
    for (name, degree) in &check.accepting {
        accepting.insert(name.clone(), Value::String(degree.to_string()));
    }
    report = report.field("accepting", Value::Object(accepting));

    if let Some(out) = emit_product {
        // For an ω check at one state, the product of the rebased model is
        // the one that was analyzed.
        let based = match (&target, omega) {
            (CheckTarget::State(name), true) => model.rebase_initial(name)?,
            _ => model.clone(),
        };
        let prod = product::product(&based, &automaton)?;
        let text = format::model_to_json(prod.gpks());
        std::fs::write(&out, text)
            .map_err(|e| CliError::Format(format!("cannot write `{}`: {e}", out.display())))?;
        report = report.field("product_written", path_str(&out));
    }

    Ok((report.finish(), 0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    path: PathBuf,
    formula: String,
    state: Option<String>,
    initial: bool,
    prefix_bound: Option<usize>,
    cycle_bound: Option<usize>,
    measure: MeasureArg,
    double_check: bool,
) -> Result<(String, u8), CliError> {
    let model = load(&path)?;
    let phi = gpoltl::parse(&formula).map_err(|e| CliError::Format(format!("bad formula: {e}")))?;
    let mut cfg = match (&state, initial) {
        (Some(name), false) => OracleConfig::for_state(&model, model.require_state(name)?),
        (None, true) => OracleConfig::for_initial(&model),
        _ => {
            return Err(CliError::Input(
                "exactly one of --state or --initial is required".into(),
            ))
        }
    };
    if let Some(k) = prefix_bound {
        cfg.max_prefix = k;
    }
    if let Some(m) = cycle_bound {
        cfg.max_cycle = m;
    }

    let evaluate = |cfg: &OracleConfig| -> Result<Poss, CliError> {
        let result = match measure {
            MeasureArg::Po => {
                oracle::oracle_po(&model, cfg, |l| gpoltl::path_eval(&model, &phi, l))
            }
            MeasureArg::Ne => {
                oracle::oracle_ne(&model, cfg, |l| gpoltl::path_eval(&model, &phi, l))
            }
        };
        result.map_err(|e| CliError::Input(e.to_string()))
    };

    let value = evaluate(&cfg)?;
    let mut report = ReportBuilder::new("oracle")
        .field("model", path_str(&path))
        .field("formula", formula.as_str());
    match cfg.start {
        OracleStart::State(s) => report = report.field("state", model.states()[s].as_str()),
        OracleStart::Initial => report = report.field("initial", true),
    }
    report = report
        .field(
            "measure",
            match measure {
                MeasureArg::Po => "po",
                MeasureArg::Ne => "ne",
            },
        )
        .field("prefix_bound", cfg.max_prefix as u64)
        .field("cycle_bound", cfg.max_cycle as u64)
        .field("value", value.to_string());

    if double_check {
        let doubled = cfg.doubled();
        let again = evaluate(&doubled)?;
        let mut inner = serde_json::Map::new();
        inner.insert(
            "prefix_bound".into(),
            Value::from(doubled.max_prefix as u64),
        );
        inner.insert("cycle_bound".into(), Value::from(doubled.max_cycle as u64));
        inner.insert("value".into(), Value::String(again.to_string()));
        inner.insert("agrees".into(), Value::Bool(again == value));
        report = report.field("double_check", Value::Object(inner));
    }

    Ok((report.finish(), 0))
}
