use thiserror::Error;

use crate::signature::VariableId;
use crate::value::Value;

/// Rendered `name=value` pairs used in error messages.
fn render(pairs: &[(VariableId, Value)]) -> String {
    pairs
        .iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("domain must contain at least one value")]
    EmptyDomain,
    #[error("domain lists value `{0}` more than once")]
    DuplicateDomainValue(Value),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(VariableId),
    #[error("a model needs at least one endogenous variable")]
    NoEndogenous,
    #[error("more than one mechanism for `{0}`")]
    DuplicateMechanism(VariableId),
    #[error("no mechanism for endogenous variable `{0}`")]
    MissingMechanism(VariableId),
    #[error("`{0}` is exogenous and cannot have a mechanism")]
    MechanismForExogenous(VariableId),
    #[error("mechanism for `{target}` depends on undeclared variable `{dependency}`")]
    UndeclaredDependency {
        target: VariableId,
        dependency: String,
    },
    #[error("mechanism for `{target}` lists `{variable}` twice")]
    DuplicateDependency {
        target: VariableId,
        variable: VariableId,
    },
    #[error("mechanism for `{0}` lists itself as a dependency")]
    SelfDependency(VariableId),
    #[error("mechanism for `{target}` reads `{variable}` which is not among its dependencies")]
    UnlistedDependency {
        target: VariableId,
        variable: String,
    },
    #[error("table for `{target}` has {found} rows, expected {expected}")]
    TableSize {
        target: VariableId,
        expected: usize,
        found: usize,
    },
    #[error("mechanism for `{target}` yields `{output}` outside its range on input [{}]", render(.input))]
    OutOfRangeOutput {
        target: VariableId,
        input: Vec<(VariableId, Value)>,
        output: Value,
    },
    #[error("mechanism for `{target}` is undefined on input [{}]: {reason}", render(.input))]
    UndefinedOutput {
        target: VariableId,
        input: Vec<(VariableId, Value)>,
        reason: String,
    },
    #[error("value `{value}` is not in the range of `{variable}`")]
    OutOfRangeValue { variable: VariableId, value: Value },
    #[error("unknown endogenous variable `{0}`")]
    UnknownVariable(String),
    #[error("context does not assign exogenous variable `{0}`")]
    IncompleteContext(VariableId),
    #[error("context assigns `{0}`, which is not exogenous")]
    NotExogenous(String),
    #[error("model is not recursive; use the fixed-point solver instead")]
    NotRecursive,
    #[error("search space of {size} assignments exceeds the configured cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("unknown variable `{0}` in formula")]
    UnknownVariable(String),
    #[error("`{0}` is exogenous; formulas may only mention endogenous variables")]
    NotEndogenous(String),
    #[error("value `{value}` is not in the range of `{variable}`")]
    OutOfRangeValue { variable: String, value: Value },
    #[error("variable `{0}` is intervened on more than once")]
    DuplicateIntervention(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CauseError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("actual-cause search needs a recursive model")]
    NotRecursive,
    #[error("model has {count} endogenous variables; the search is capped at {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("invalid candidate cause: {0}")]
    InvalidCause(String),
    #[error("the effect does not hold in the actual world")]
    EffectNotActual,
    #[error("the actual world is not an allowable setting")]
    ActualNotAllowable,
    #[error("no witness exists: the cause fails AC2")]
    NoCause,
    #[error("the effect and its contrast are compatible")]
    NotContrastive,
    #[error("invalid contrast: {0}")]
    InvalidContrast(String),
}
