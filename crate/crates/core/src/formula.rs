//! Event formulas, causal formulas and their evaluation.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FormulaError, ModelError};
use crate::model::CausalModel;
use crate::signature::{Signature, VariableId};
use crate::solve::{Assignment, Context};
use crate::value::Value;

/// `X = x` for an endogenous `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimitiveEvent {
    pub variable: VariableId,
    pub value: Value,
}

impl PrimitiveEvent {
    pub fn new(variable: &str, value: impl Into<Value>) -> Result<Self, ModelError> {
        Ok(PrimitiveEvent {
            variable: VariableId::new(variable)?,
            value: value.into(),
        })
    }
}

impl fmt::Display for PrimitiveEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.value)
    }
}

/// Boolean combination of primitive events.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventFormula {
    True,
    False,
    Prim(PrimitiveEvent),
    Not(Box<EventFormula>),
    And(Vec<EventFormula>),
    Or(Vec<EventFormula>),
}

impl EventFormula {
    pub fn prim(variable: &str, value: impl Into<Value>) -> Result<Self, ModelError> {
        Ok(EventFormula::Prim(PrimitiveEvent::new(variable, value)?))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        EventFormula::Not(Box::new(self))
    }

    pub fn and(children: Vec<EventFormula>) -> Self {
        EventFormula::And(children)
    }

    pub fn or(children: Vec<EventFormula>) -> Self {
        EventFormula::Or(children)
    }

    /// The conjunction of primitive events, or the event itself when single.
    pub fn conjunction(events: &[PrimitiveEvent]) -> Self {
        match events {
            [e] => EventFormula::Prim(e.clone()),
            _ => EventFormula::And(events.iter().cloned().map(EventFormula::Prim).collect()),
        }
    }

    /// Mentioned variables, first occurrence first.
    pub fn variables(&self) -> Vec<&VariableId> {
        let mut out = Vec::new();
        self.walk(&mut |p| {
            if !out.contains(&&p.variable) {
                out.push(&p.variable);
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a PrimitiveEvent)) {
        match self {
            EventFormula::True | EventFormula::False => {}
            EventFormula::Prim(p) => f(p),
            EventFormula::Not(e) => e.walk(f),
            EventFormula::And(cs) | EventFormula::Or(cs) => cs.iter().for_each(|c| c.walk(f)),
        }
    }

    /// Truth in an assignment that covers every mentioned variable.
    pub fn eval(&self, assignment: &Assignment) -> Result<bool, FormulaError> {
        Ok(match self {
            EventFormula::True => true,
            EventFormula::False => false,
            EventFormula::Prim(p) => {
                let v = assignment
                    .values()
                    .get(&p.variable)
                    .ok_or_else(|| FormulaError::UnknownVariable(p.variable.to_string()))?;
                *v == p.value
            }
            EventFormula::Not(e) => !e.eval(assignment)?,
            EventFormula::And(cs) => {
                for c in cs {
                    if !c.eval(assignment)? {
                        return Ok(false);
                    }
                }
                true
            }
            EventFormula::Or(cs) => {
                for c in cs {
                    if c.eval(assignment)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Resolves names against the signature for evaluation on worlds.
    pub fn resolve(&self, sig: &Signature) -> Result<IndexedEvent, FormulaError> {
        Ok(match self {
            EventFormula::True => IndexedEvent::Const(true),
            EventFormula::False => IndexedEvent::Const(false),
            EventFormula::Prim(p) => {
                let (var, val) = resolve_setting(sig, &p.variable, &p.value)?;
                IndexedEvent::Prim(var, val)
            }
            EventFormula::Not(e) => IndexedEvent::Not(Box::new(e.resolve(sig)?)),
            EventFormula::And(cs) => {
                IndexedEvent::And(cs.iter().map(|c| c.resolve(sig)).collect::<Result<_, _>>()?)
            }
            EventFormula::Or(cs) => {
                IndexedEvent::Or(cs.iter().map(|c| c.resolve(sig)).collect::<Result<_, _>>()?)
            }
        })
    }
}

/// Checks that `variable` is endogenous and `value` in its range.
pub fn resolve_setting(
    sig: &Signature,
    variable: &VariableId,
    value: &Value,
) -> Result<(usize, usize), FormulaError> {
    let i = sig
        .index_of(variable.as_str())
        .ok_or_else(|| FormulaError::UnknownVariable(variable.to_string()))?;
    if !sig.variable(i).is_endogenous() {
        return Err(FormulaError::NotEndogenous(variable.to_string()));
    }
    let v = sig
        .domain(i)
        .index_of(value)
        .ok_or_else(|| FormulaError::OutOfRangeValue {
            variable: variable.to_string(),
            value: value.clone(),
        })?;
    Ok((i, v))
}

/// An event formula over variable and value indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexedEvent {
    Const(bool),
    Prim(usize, usize),
    Not(Box<IndexedEvent>),
    And(Vec<IndexedEvent>),
    Or(Vec<IndexedEvent>),
}

impl IndexedEvent {
    pub fn holds(&self, world: &[usize]) -> bool {
        match self {
            IndexedEvent::Const(b) => *b,
            IndexedEvent::Prim(var, val) => world[*var] == *val,
            IndexedEvent::Not(e) => !e.holds(world),
            IndexedEvent::And(cs) => cs.iter().all(|c| c.holds(world)),
            IndexedEvent::Or(cs) => cs.iter().any(|c| c.holds(world)),
        }
    }

    pub fn negate(self) -> IndexedEvent {
        IndexedEvent::Not(Box::new(self))
    }

    /// Variable indices read by the formula.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            IndexedEvent::Const(_) => {}
            IndexedEvent::Prim(v, _) => out.push(*v),
            IndexedEvent::Not(e) => e.collect(out),
            IndexedEvent::And(cs) | IndexedEvent::Or(cs) => cs.iter().for_each(|c| c.collect(out)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    /// `[Y<-y] phi`: phi in every solution.
    Box,
    /// `<Y<-y> phi`: phi in some solution.
    Diamond,
}

/// Boolean combination of event formulas and basic causal formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalFormula {
    /// A plain event formula, read in the actual world.
    Event(EventFormula),
    Basic {
        intervention: Vec<(VariableId, Value)>,
        body: EventFormula,
        modality: Modality,
    },
    Not(Box<CausalFormula>),
    And(Vec<CausalFormula>),
    Or(Vec<CausalFormula>),
}

impl CausalFormula {
    pub fn boxed(intervention: Vec<(VariableId, Value)>, body: EventFormula) -> Self {
        CausalFormula::Basic {
            intervention,
            body,
            modality: Modality::Box,
        }
    }

    pub fn diamond(intervention: Vec<(VariableId, Value)>, body: EventFormula) -> Self {
        CausalFormula::Basic {
            intervention,
            body,
            modality: Modality::Diamond,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CausalFormula::Not(Box::new(self))
    }
}

/// Submodel solution consulted while evaluating a causal formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub intervention: Vec<(VariableId, Value)>,
    pub solutions: Vec<Assignment>,
}

/// Resolves an intervention into per-variable clamps.
pub fn resolve_intervention(
    sig: &Signature,
    intervention: &[(VariableId, Value)],
) -> Result<Vec<Option<usize>>, FormulaError> {
    let mut clamps = vec![None; sig.len()];
    let mut seen = HashSet::new();
    for (var, value) in intervention {
        if !seen.insert(var) {
            return Err(FormulaError::DuplicateIntervention(var.to_string()));
        }
        let (i, v) = resolve_setting(sig, var, value)?;
        clamps[i] = Some(v);
    }
    Ok(clamps)
}

/// `(M, u) |= psi` for a recursive model. Box and diamond coincide.
pub fn eval(model: &CausalModel, ctx: &Context, psi: &CausalFormula) -> Result<bool, FormulaError> {
    eval_traced(model, ctx, psi, &mut Vec::new())
}

/// As [`eval`], recording each solved submodel.
pub fn eval_traced(
    model: &CausalModel,
    ctx: &Context,
    psi: &CausalFormula,
    trace: &mut Vec<TraceStep>,
) -> Result<bool, FormulaError> {
    if !model.is_recursive() {
        return Err(ModelError::NotRecursive.into());
    }
    let base = model.context_world(ctx)?;
    let actual = model.solve_world(&base, &[])?;
    eval_rec(model, &base, &actual, psi, trace)
}

fn eval_rec(
    model: &CausalModel,
    base: &[usize],
    actual: &[usize],
    psi: &CausalFormula,
    trace: &mut Vec<TraceStep>,
) -> Result<bool, FormulaError> {
    let sig = model.signature();
    Ok(match psi {
        CausalFormula::Event(phi) => phi.resolve(sig)?.holds(actual),
        CausalFormula::Basic {
            intervention, body, ..
        } => {
            let clamps = resolve_intervention(sig, intervention)?;
            let body = body.resolve(sig)?;
            let w = model.solve_world(base, &clamps)?;
            trace.push(TraceStep {
                intervention: intervention.clone(),
                solutions: vec![model.assignment_of(&w)],
            });
            body.holds(&w)
        }
        CausalFormula::Not(e) => !eval_rec(model, base, actual, e, trace)?,
        CausalFormula::And(cs) => {
            let mut all = true;
            for c in cs {
                all &= eval_rec(model, base, actual, c, trace)?;
            }
            all
        }
        CausalFormula::Or(cs) => {
            let mut any = false;
            for c in cs {
                any |= eval_rec(model, base, actual, c, trace)?;
            }
            any
        }
    })
}

/// `(M, u, v) |= psi` for possibly cyclic models. `actual` must be a
/// solution in the context; plain events are read there, basic formulas
/// quantify over all solutions of the intervened model (box over no
/// solutions is true, diamond false).
pub fn eval_nonrecursive(
    model: &CausalModel,
    ctx: &Context,
    actual: &Assignment,
    psi: &CausalFormula,
) -> Result<bool, FormulaError> {
    eval_nonrecursive_traced(model, ctx, actual, psi, &mut Vec::new())
}

pub fn eval_nonrecursive_traced(
    model: &CausalModel,
    ctx: &Context,
    actual: &Assignment,
    psi: &CausalFormula,
    trace: &mut Vec<TraceStep>,
) -> Result<bool, FormulaError> {
    let base = model.context_world(ctx)?;
    if !actual.is_total(model) {
        return Err(FormulaError::Model(ModelError::UnknownVariable(
            model
                .signature()
                .endogenous()
                .find(|(_, v)| actual.get(v.name.as_str()).is_none())
                .map(|(_, v)| v.name.to_string())
                .unwrap_or_default(),
        )));
    }
    let actual = model.world_with(&base, actual)?;
    eval_nr(model, &base, &actual, psi, trace)
}

fn eval_nr(
    model: &CausalModel,
    base: &[usize],
    actual: &[usize],
    psi: &CausalFormula,
    trace: &mut Vec<TraceStep>,
) -> Result<bool, FormulaError> {
    let sig = model.signature();
    Ok(match psi {
        CausalFormula::Event(phi) => phi.resolve(sig)?.holds(actual),
        CausalFormula::Basic {
            intervention,
            body,
            modality,
        } => {
            let clamps = resolve_intervention(sig, intervention)?;
            let body = body.resolve(sig)?;
            let sols = model.fixed_points_world(base, &clamps)?;
            trace.push(TraceStep {
                intervention: intervention.clone(),
                solutions: sols.iter().map(|w| model.assignment_of(w)).collect(),
            });
            match modality {
                Modality::Box => sols.iter().all(|w| body.holds(w)),
                Modality::Diamond => sols.iter().any(|w| body.holds(w)),
            }
        }
        CausalFormula::Not(e) => !eval_nr(model, base, actual, e, trace)?,
        CausalFormula::And(cs) => {
            let mut all = true;
            for c in cs {
                all &= eval_nr(model, base, actual, c, trace)?;
            }
            all
        }
        CausalFormula::Or(cs) => {
            let mut any = false;
            for c in cs {
                any |= eval_nr(model, base, actual, c, trace)?;
            }
            any
        }
    })
}

/// True iff some assignment of the mentioned variables over their domains
/// satisfies the formula.
pub fn satisfiable(sig: &Signature, phi: &IndexedEvent) -> bool {
    let vars = phi.variables();
    let mut world = vec![0; sig.len()];
    loop {
        if phi.holds(&world) {
            return true;
        }
        let mut k = vars.len();
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            let i = vars[k];
            world[i] += 1;
            if world[i] < sig.domain(i).len() {
                break;
            }
            world[i] = 0;
        }
    }
}

fn needs_parens_in_and(e: &EventFormula) -> bool {
    matches!(e, EventFormula::And(_) | EventFormula::Or(_))
}

fn needs_parens_in_or(e: &EventFormula) -> bool {
    matches!(e, EventFormula::Or(_))
}

fn is_event_atom(e: &EventFormula) -> bool {
    match e {
        EventFormula::True | EventFormula::False | EventFormula::Prim(_) => true,
        EventFormula::Not(inner) => matches!(**inner, EventFormula::Prim(_)) || is_event_atom(inner),
        _ => false,
    }
}

/// Canonical text: `!` binds tightest, then `&`, then `|`. A negated
/// primitive prints as `X!=v`.
impl fmt::Display for EventFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventFormula::True => f.write_str("true"),
            EventFormula::False => f.write_str("false"),
            EventFormula::Prim(p) => write!(f, "{p}"),
            EventFormula::Not(inner) => match &**inner {
                EventFormula::Prim(p) => write!(f, "{}!={}", p.variable, p.value),
                e if is_event_atom(e) => write!(f, "!{e}"),
                e => write!(f, "!({e})"),
            },
            EventFormula::And(cs) if cs.is_empty() => f.write_str("true"),
            EventFormula::Or(cs) if cs.is_empty() => f.write_str("false"),
            EventFormula::And(cs) => join(f, cs, " & ", needs_parens_in_and),
            EventFormula::Or(cs) => join(f, cs, " | ", needs_parens_in_or),
        }
    }
}

fn join<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    cs: &[T],
    sep: &str,
    parens: impl Fn(&T) -> bool,
) -> fmt::Result {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        if parens(c) {
            write!(f, "({c})")?;
        } else {
            write!(f, "{c}")?;
        }
    }
    Ok(())
}

fn causal_is_atom(c: &CausalFormula) -> bool {
    match c {
        CausalFormula::Event(e) => is_event_atom(e),
        CausalFormula::Basic { .. } => true,
        CausalFormula::Not(inner) => causal_is_atom(inner),
        _ => false,
    }
}

fn causal_is_or(c: &CausalFormula) -> bool {
    matches!(c, CausalFormula::Or(_) | CausalFormula::Event(EventFormula::Or(_)))
}

fn causal_is_and(c: &CausalFormula) -> bool {
    matches!(c, CausalFormula::And(_) | CausalFormula::Event(EventFormula::And(_)))
}

impl fmt::Display for CausalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalFormula::Event(e) => write!(f, "{e}"),
            CausalFormula::Basic {
                intervention,
                body,
                modality,
            } => {
                let (open, close) = match modality {
                    Modality::Box => ("[", "]"),
                    Modality::Diamond => ("<", ">"),
                };
                f.write_str(open)?;
                for (i, (var, val)) in intervention.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{var}<-{val}")?;
                }
                f.write_str(close)?;
                if is_event_atom(body) {
                    write!(f, "{body}")
                } else {
                    write!(f, "({body})")
                }
            }
            CausalFormula::Not(inner) => {
                if causal_is_atom(inner) {
                    write!(f, "!{inner}")
                } else {
                    write!(f, "!({inner})")
                }
            }
            CausalFormula::And(cs) => join(f, cs, " & ", |c| causal_is_and(c) || causal_is_or(c)),
            CausalFormula::Or(cs) => join(f, cs, " | ", causal_is_or),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_eval_on_assignment() {
        let a = Assignment::from_pairs([("F", 2)]).unwrap();
        let phi = EventFormula::or(vec![
            EventFormula::prim("F", 1).unwrap(),
            EventFormula::prim("F", 2).unwrap(),
        ]);
        assert!(phi.eval(&a).unwrap());
        let missing = EventFormula::prim("G", 1).unwrap();
        assert!(matches!(missing.eval(&a), Err(FormulaError::UnknownVariable(_))));
    }

    #[test]
    fn display_is_precedence_aware() {
        let a = EventFormula::prim("A", 1).unwrap();
        let b = EventFormula::prim("B", 0).unwrap();
        let c = EventFormula::prim("C", 1).unwrap();
        let f = EventFormula::and(vec![
            EventFormula::or(vec![a.clone(), b.clone()]),
            c.clone().not(),
        ]);
        assert_eq!(f.to_string(), "(A=1 | B=0) & C!=1");
        let g = EventFormula::or(vec![EventFormula::and(vec![a, b]), c]).not();
        assert_eq!(g.to_string(), "!(A=1 & B=0 | C=1)");
    }
}
