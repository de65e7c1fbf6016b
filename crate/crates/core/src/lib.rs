//! Finite structural causal models and actual-cause checking.
//!
//! A [`CausalModel`] pairs a [`Signature`] with one [`Mechanism`] per
//! endogenous variable. Recursive models have a unique solution per
//! [`Context`]; cyclic ones are handled by fixed-point enumeration.
//! The [`cause`] module decides whether a conjunction of primitive events
//! is a cause of an event formula.

pub mod cause;
pub mod error;
pub mod expr;
pub mod extended;
pub mod formula;
pub mod model;
pub mod random;
pub mod search_space;
pub mod signature;
pub mod solve;
pub mod value;

pub use cause::{
    active_processes, classify_contributory, contrastive_cause, enumerate_causes, enumerate_witnesses,
    is_actual_cause, is_strong_cause, is_weak_cause, CandidateCause, CauseOptions, CauseQuery,
    CauseVerdict, ContrastMode, DefinitionVariant, ContributoryClass, QueryModel, SearchStats, Witness,
};
pub use error::{CauseError, FormulaError, ModelError};
pub use expr::{BinOp, Expr};
pub use extended::{Allowable, ExtendedCausalModel};
pub use formula::{
    eval, eval_nonrecursive, CausalFormula, EventFormula, IndexedEvent, Modality, PrimitiveEvent,
};
pub use model::{CausalModel, Mechanism, ModelConfig, Rule, World};
pub use signature::{Signature, VarKind, Variable, VariableId};
pub use solve::{Assignment, Context};
pub use value::{Domain, Value};
