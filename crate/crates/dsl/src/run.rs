//! Executing parsed queries against a loaded model.

use actcause_core::{
    active_processes, contrastive_cause, enumerate_causes, enumerate_witnesses, eval, eval_nonrecursive,
    is_actual_cause, CandidateCause, CauseError, Context, CauseOptions, CauseQuery, CauseVerdict, ContrastMode,
    ExtendedCausalModel, FormulaError, QueryModel, VariableId, Witness,
};

use crate::ast::{Command, ContrastSpec, QueryDocument};
use crate::error::DslError;
use crate::load::LoadedModel;
use crate::query_context;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Cause(#[from] CauseError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Result of one query.
#[derive(Clone, Debug)]
pub enum Outcome {
    Verdict(CauseVerdict),
    Causes(Vec<CandidateCause>),
    Witnesses {
        verdict: CauseVerdict,
        witnesses: Vec<Witness>,
    },
    Processes {
        verdict: CauseVerdict,
        processes: Vec<Vec<VariableId>>,
    },
    Eval(bool),
}

impl Outcome {
    /// The yes/no answer: the verdict for cause queries, a non-empty
    /// result for `causes`, the truth value for `eval`.
    pub fn holds(&self) -> bool {
        match self {
            Outcome::Verdict(v) | Outcome::Witnesses { verdict: v, .. } | Outcome::Processes { verdict: v, .. } => {
                v.overall
            }
            Outcome::Causes(cs) => !cs.is_empty(),
            Outcome::Eval(b) => *b,
        }
    }

    pub fn verdict(&self) -> Option<&CauseVerdict> {
        match self {
            Outcome::Verdict(v) | Outcome::Witnesses { verdict: v, .. } | Outcome::Processes { verdict: v, .. } => Some(v),
            _ => None,
        }
    }
}

/// Runs `q` with the default search limits.
pub fn run_query(model: &LoadedModel, q: &QueryDocument) -> Result<Outcome, RunError> {
    run_query_with(model, q, CauseOptions::default().max_endogenous)
}

/// Runs `q`, refusing cause searches over more than `max_vars` endogenous
/// variables.
pub fn run_query_with(model: &LoadedModel, q: &QueryDocument, max_vars: usize) -> Result<Outcome, RunError> {
    let ctx = query_context(model, q)?;
    run_query_in(model, q, &ctx, max_vars)
}

/// Runs `q` in `ctx`, ignoring any context the query names.
pub fn run_query_in(model: &LoadedModel, q: &QueryDocument, ctx: &Context, max_vars: usize) -> Result<Outcome, RunError> {
    let ext: Option<ExtendedCausalModel> = q.extended.then(|| model.extended());
    let qm: QueryModel = match &ext {
        Some(e) => e.into(),
        None => (&model.model).into(),
    };
    let options = CauseOptions {
        exclude_self: q.exclude_self,
        max_conjuncts: q.max_conjuncts.unwrap_or(1),
        max_endogenous: max_vars,
    };
    let query = |cause: &[actcause_core::PrimitiveEvent], effect: &actcause_core::EventFormula| {
        Ok::<_, CauseError>(
            CauseQuery::new(qm, ctx.clone(), CandidateCause::new(cause.to_vec())?, effect.clone())
                .with_variant(q.variant)
                .with_options(options),
        )
    };
    Ok(match &q.command {
        Command::Check { cause, effect } => Outcome::Verdict(is_actual_cause(&query(cause, effect)?)?),
        Command::Causes { effect } => Outcome::Causes(enumerate_causes(qm, ctx, effect, q.variant, &options)?),
        Command::Witnesses { cause, effect } => {
            let cq = query(cause, effect)?;
            Outcome::Witnesses {
                verdict: is_actual_cause(&cq)?,
                witnesses: enumerate_witnesses(&cq)?,
            }
        }
        Command::Process { cause, effect } => {
            let cq = query(cause, effect)?;
            let processes = match active_processes(&cq) {
                Ok(p) => p,
                Err(CauseError::NoCause) => Vec::new(),
                Err(e) => return Err(e.into()),
            };
            Outcome::Processes {
                verdict: is_actual_cause(&cq)?,
                processes,
            }
        }
        Command::Eval(psi) if model.model.is_recursive() => Outcome::Eval(eval(&model.model, ctx, psi)?),
        // Cyclic models: the formula must hold at every solution of the context.
        Command::Eval(psi) => {
            let mut all = true;
            for actual in model.model.solve_all(ctx).map_err(FormulaError::from)? {
                all &= eval_nonrecursive(&model.model, ctx, &actual, psi)?;
            }
            Outcome::Eval(all)
        }
        Command::Contrast { cause, effect, contrast } => {
            let mode = match contrast {
                ContrastSpec::InsteadOf(alt) => ContrastMode::Consequent(alt.clone()),
                ContrastSpec::RatherThan { value, weak: false } => ContrastMode::AntecedentStrong(value.clone()),
                ContrastSpec::RatherThan { value, weak: true } => ContrastMode::AntecedentWeak(value.clone()),
            };
            Outcome::Verdict(contrastive_cause(&query(cause, effect)?, &mode)?)
        }
    })
}
