//! `actcause`: actual-cause queries over `.hpc` model files.
//!
//! Exit codes: 0 when the answer is yes, 1 when it is no, 2 for usage
//! errors (including an exceeded `--max-vars`), 3 for model, query or
//! precondition errors.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use actcause_core::formula::{eval_traced, TraceStep};
use actcause_core::{CauseError, Context, DefinitionVariant, EventFormula, PrimitiveEvent};
use actcause_dsl::{
    load_model, parse_causal, parse_cause, parse_event, parse_query, run_query_in, select_context, Command,
    ContrastSpec, LoadedModel, Outcome, QueryDocument, RunError,
};
use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Report;

#[derive(Parser)]
#[command(name = "actcause", version, about = "Decide actual causation in finite structural causal models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Is the cause an actual cause of the effect?
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: CauseEffect,
        #[command(flatten)]
        mode: Mode,
    },
    /// List every actual cause of the effect.
    Causes {
        #[command(flatten)]
        common: Common,
        /// Effect formula, e.g. "BS=1".
        #[arg(long)]
        effect: String,
        #[command(flatten)]
        mode: Mode,
    },
    /// List every witness for the cause.
    Witnesses {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: CauseEffect,
        #[command(flatten)]
        mode: Mode,
    },
    /// Show the active causal processes of a cause.
    Process {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: CauseEffect,
        #[command(flatten)]
        mode: Mode,
    },
    /// Evaluate a causal formula such as "[ML1<-0](FB=0)".
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        formula: String,
        /// Print the solution of every intervened submodel.
        #[arg(long)]
        trace: bool,
    },
    /// Contrastive causation: the effect instead of another outcome, or the
    /// cause rather than another value.
    Contrast {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: CauseEffect,
        #[command(flatten)]
        mode: Mode,
        /// Alternative effect, incompatible with the effect.
        #[arg(long, conflicts_with = "rather_than", required_unless_present = "rather_than")]
        instead_of: Option<String>,
        /// Alternative cause value, as "v" or "X=v".
        #[arg(long)]
        rather_than: Option<String>,
        /// With --rather-than: only require the alternative to keep AC2(b).
        #[arg(long, requires = "rather_than")]
        weak: bool,
    },
    /// Run a query written in the model language, e.g.
    /// "check cause ST=1 of BS=1 definition legacy".
    Query {
        #[command(flatten)]
        common: Common,
        query: String,
    },
}

#[derive(Args)]
struct Common {
    /// Path to a `.hpc` model file.
    model: PathBuf,
    /// Context name, or inline settings such as "U1=1, U2=0".
    #[arg(long)]
    context: Option<String>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Refuse cause searches over more endogenous variables than this.
    #[arg(long, default_value_t = 16)]
    max_vars: usize,
}

#[derive(Args)]
struct CauseEffect {
    /// Conjunction of primitive events, e.g. "ML1=1 & ML2=1".
    #[arg(long)]
    cause: String,
    #[arg(long)]
    effect: String,
}

#[derive(Args)]
struct Mode {
    #[arg(long, value_enum, default_value_t = Definition::Updated)]
    definition: Definition,
    /// Honour the model's `allow` constraints.
    #[arg(long)]
    extended: bool,
    /// Skip causes that entail the effect on their own.
    #[arg(long)]
    exclude_self: bool,
    /// Largest conjunction listed by `causes`.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    max_conjuncts: Option<u16>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Definition {
    Updated,
    Legacy,
    Strong,
}

impl From<Definition> for DefinitionVariant {
    fn from(d: Definition) -> Self {
        match d {
            Definition::Updated => DefinitionVariant::Updated,
            Definition::Legacy => DefinitionVariant::LegacyBPrime,
            Definition::Strong => DefinitionVariant::Strong,
        }
    }
}

/// An error with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, error: error.into() }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Cause(CauseError::TooManyVariables { count, cap }) => Failure::usage(anyhow::anyhow!(
                "the model has {count} endogenous variables but --max-vars is {cap}; rerun with --max-vars {count} \
                 (the search grows exponentially in this number)"
            )),
            other => Failure::input(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(yes) => ExitCode::from(if yes { 0 } else { 1 }),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &PathBuf) -> Result<LoadedModel, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)?;
    load_model(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::input)
}

fn document(command: Command, mode: Option<&Mode>) -> QueryDocument {
    QueryDocument {
        model: None,
        command,
        context: None,
        variant: mode.map_or(DefinitionVariant::Updated, |m| m.definition.into()),
        extended: mode.is_some_and(|m| m.extended),
        exclude_self: mode.is_some_and(|m| m.exclude_self),
        max_conjuncts: mode.and_then(|m| m.max_conjuncts).map(usize::from),
    }
}

fn pair_query(
    common: Common,
    pair: &CauseEffect,
    mode: &Mode,
    make: fn(Vec<PrimitiveEvent>, EventFormula) -> Command,
) -> Result<(Common, LoadedModel, QueryDocument), Failure> {
    let model = load(&common.model)?;
    let sig = model.model.signature();
    let cause = parse_cause(&pair.cause, Some(sig)).map_err(Failure::input)?;
    let effect = parse_event(&pair.effect, Some(sig)).map_err(Failure::input)?;
    let q = document(make(cause, effect), Some(mode));
    Ok((common, model, q))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (common, model, q) = match cli.command {
        Cmd::Query { common, query } => {
            let model = load(&common.model)?;
            let q = parse_query(&query, &model).map_err(Failure::input)?;
            (common, model, q)
        }
        Cmd::Check { common, pair, mode } => {
            pair_query(common, &pair, &mode, |cause, effect| Command::Check { cause, effect })?
        }
        Cmd::Witnesses { common, pair, mode } => {
            pair_query(common, &pair, &mode, |cause, effect| Command::Witnesses { cause, effect })?
        }
        Cmd::Process { common, pair, mode } => {
            pair_query(common, &pair, &mode, |cause, effect| Command::Process { cause, effect })?
        }
        Cmd::Causes { common, effect, mode } => {
            let model = load(&common.model)?;
            let effect = parse_event(&effect, Some(model.model.signature())).map_err(Failure::input)?;
            let q = document(Command::Causes { effect }, Some(&mode));
            (common, model, q)
        }
        Cmd::Eval { common, formula, trace } => {
            let model = load(&common.model)?;
            let psi = parse_causal(&formula, Some(model.model.signature())).map_err(Failure::input)?;
            let q = document(Command::Eval(psi), None);
            if trace && model.model.is_recursive() {
                return traced_eval(&common, &model, &q);
            }
            if trace {
                eprintln!("note: --trace is only available for recursive models");
            }
            (common, model, q)
        }
        Cmd::Contrast { common, pair, mode, instead_of, rather_than, weak } => {
            let model = load(&common.model)?;
            let sig = model.model.signature();
            let cause = parse_cause(&pair.cause, Some(sig)).map_err(Failure::input)?;
            let effect = parse_event(&pair.effect, Some(sig)).map_err(Failure::input)?;
            let contrast = match (instead_of, rather_than) {
                (Some(alt), _) => ContrastSpec::InsteadOf(parse_event(&alt, Some(sig)).map_err(Failure::input)?),
                (None, Some(text)) => {
                    let [x] = cause.as_slice() else {
                        return Err(Failure::usage(anyhow::anyhow!("--rather-than needs a single-conjunct --cause")));
                    };
                    let text = if text.contains('=') { text } else { format!("{}={text}", x.variable) };
                    let alt = parse_cause(&text, Some(sig)).map_err(Failure::input)?;
                    match alt.as_slice() {
                        [a] if a.variable == x.variable => ContrastSpec::RatherThan { value: a.value.clone(), weak },
                        _ => {
                            return Err(Failure::usage(anyhow::anyhow!(
                                "--rather-than must give another value of {}",
                                x.variable
                            )))
                        }
                    }
                }
                (None, None) => unreachable!("clap requires one of --instead-of and --rather-than"),
            };
            let q = document(Command::Contrast { cause, effect, contrast }, Some(&mode));
            (common, model, q)
        }
    };
    let ctx = context(&common, &model, &q)?;
    let start = Instant::now();
    let outcome = run_query_in(&model, &q, &ctx, common.max_vars)?;
    let report = Report::new(&q.command, &outcome, start.elapsed());
    emit(&common, &report);
    Ok(outcome.holds())
}

/// The `--context` flag wins over a context named inside a query.
fn context(common: &Common, model: &LoadedModel, q: &QueryDocument) -> Result<Context, Failure> {
    match (&common.context, &q.context) {
        (Some(sel), _) => select_context(model, Some(sel)).map_err(Failure::input),
        (None, Some(_)) => actcause_dsl::query_context(model, q).map_err(Failure::input),
        (None, None) => select_context(model, None).map_err(Failure::input),
    }
}

fn traced_eval(common: &Common, model: &LoadedModel, q: &QueryDocument) -> Result<bool, Failure> {
    let Command::Eval(psi) = &q.command else { unreachable!("traced_eval is only called for eval") };
    let ctx = context(common, model, q)?;
    let start = Instant::now();
    let mut trace: Vec<TraceStep> = Vec::new();
    let holds = eval_traced(&model.model, &ctx, psi, &mut trace).map_err(|e| Failure::from(RunError::from(e)))?;
    let outcome = Outcome::Eval(holds);
    let report = Report::new(&q.command, &outcome, start.elapsed()).with_trace(&trace);
    emit(common, &report);
    Ok(holds)
}

fn emit(common: &Common, report: &Report) {
    if common.json {
        println!("{}", report.json());
    } else {
        print!("{}", report.text());
    }
}
