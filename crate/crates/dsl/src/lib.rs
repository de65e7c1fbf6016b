//! Text format for causal models, formulas and queries.
//!
//! A model file declares variables, one equation per endogenous variable,
//! optional `allow` constraints and named contexts:
//!
//! ```text
//! model forest_fire {
//!   exo U : {u00, u10, u01, u11};
//!   var L : {0, 1};
//!   var ML : {0, 1};
//!   var F : {0, 1};
//!   eq L = U = u10 | U = u11;
//!   eq ML = U = u01 | U = u11;
//!   eq F = L | ML;
//!   context both { U = u11 }
//! }
//! ```
//!
//! Identifiers in equations name variables when one is declared with that
//! name and symbolic values otherwise. Boolean connectives only accept 0/1
//! operands. A query names a command, then optional clauses:
//!
//! ```text
//! check cause L=1 of F=1 context both definition strong
//! eval [L<-0](F=0) context both
//! ```

pub mod ast;
pub mod error;
pub mod lexer;
pub mod load;
mod parser;
pub mod print;
mod run;

use actcause_core::{CausalFormula, Context, EventFormula, PrimitiveEvent, Signature};

pub use ast::{Command, ContextRef, ContrastSpec, EqBody, Item, ModelDocument, QueryDocument};
pub use error::DslError;
pub use lexer::Pos;
pub use load::{load_document, LoadedModel};
pub use parser::{normalize, parse_variant, RESERVED};
pub use print::{expr_to_string, serialize_model, to_document};
pub use run::{run_query, run_query_in, run_query_with, Outcome, RunError};

use parser::Parser;

/// Parses a model file without validating it against the model semantics.
pub fn parse_model(text: &str) -> Result<ModelDocument, DslError> {
    Parser::new(text, None)?.model_document()
}

/// Parses and validates a model file.
pub fn load_model(text: &str) -> Result<LoadedModel, DslError> {
    load_document(&parse_model(text)?)
}

/// Parses an event formula, checking atoms against `sig` when given.
pub fn parse_event(text: &str, sig: Option<&Signature>) -> Result<EventFormula, DslError> {
    let mut p = Parser::new(text, sig)?;
    let f = p.event()?;
    p.finish()?;
    Ok(f)
}

/// Parses a causal formula such as `[X<-1](Y=0) | <X<-0>Y=1`.
pub fn parse_causal(text: &str, sig: Option<&Signature>) -> Result<CausalFormula, DslError> {
    let mut p = Parser::new(text, sig)?;
    let f = p.causal()?;
    p.finish()?;
    Ok(f)
}

/// Parses a candidate cause `X=x & Y=y`.
pub fn parse_cause(text: &str, sig: Option<&Signature>) -> Result<Vec<PrimitiveEvent>, DslError> {
    let mut p = Parser::new(text, sig)?;
    let c = p.cause()?;
    p.finish()?;
    Ok(c)
}

/// Parses and type-checks a query against a loaded model.
pub fn parse_query(text: &str, model: &LoadedModel) -> Result<QueryDocument, DslError> {
    let mut p = Parser::new(text, Some(model.model.signature()))?;
    let q = p.query(&model.context_names())?;
    if let Some(name) = &q.model {
        if name != model.name() {
            return Err(DslError::UnknownIdentifier {
                pos: Pos { line: 1, col: 1 },
                name: name.clone(),
            });
        }
    }
    Ok(q)
}

/// Resolves a context given by name or as `U=1, V=0`. With no selector
/// the model's only context is used.
pub fn select_context(model: &LoadedModel, selector: Option<&str>) -> Result<Context, DslError> {
    let start = Pos { line: 1, col: 1 };
    match selector {
        None => match model.contexts.as_slice() {
            [(_, c)] => Ok(c.clone()),
            [] => Err(DslError::Invalid {
                pos: start,
                message: "the model defines no context; give one explicitly".into(),
            }),
            _ => Err(DslError::Invalid {
                pos: start,
                message: format!("the model defines several contexts ({}); pick one", model.context_names().join(", ")),
            }),
        },
        Some(s) => {
            if let Some(c) = model.context(s.trim()) {
                return Ok(c.clone());
            }
            let mut p = Parser::new(s, None)?;
            if p.peek_is_lone_ident() {
                return Err(DslError::UnknownIdentifier {
                    pos: start,
                    name: s.trim().to_string(),
                });
            }
            let values = p.inline_settings()?;
            p.finish()?;
            load::make_context(&model.model, &values, start)
        }
    }
}

/// The context a query names, or the model's only context.
pub fn query_context(model: &LoadedModel, q: &QueryDocument) -> Result<Context, DslError> {
    match &q.context {
        None => select_context(model, None),
        Some(ContextRef::Named(n)) => select_context(model, Some(n)),
        Some(ContextRef::Inline(values)) => load::make_context(&model.model, values, Pos { line: 1, col: 1 }),
    }
}
