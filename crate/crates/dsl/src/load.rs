//! Turning documents into validated models.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use actcause_core::{
    Allowable, BinOp, CausalModel, Context, Domain, EventFormula, Expr, ExtendedCausalModel,
    Mechanism, ModelError, Rule, Signature, Value, VarKind, Variable, VariableId,
};

use crate::ast::{EqBody, Item, ModelDocument};
use crate::error::DslError;
use crate::lexer::Pos;
use crate::parser::RESERVED;

/// A document together with the model, contexts and allowability
/// constraint it describes.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub document: ModelDocument,
    pub model: CausalModel,
    pub contexts: Vec<(String, Context)>,
    /// Conjunction of the `allow` clauses, if any.
    pub allow: Option<EventFormula>,
}

impl LoadedModel {
    pub fn name(&self) -> &str {
        &self.document.name
    }

    pub fn context(&self, name: &str) -> Option<&Context> {
        self.contexts.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn context_names(&self) -> Vec<&str> {
        self.contexts.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// The model with its `allow` clauses as allowable settings; every
    /// setting is allowable when there are none.
    pub fn extended(&self) -> ExtendedCausalModel {
        match &self.allow {
            Some(f) => ExtendedCausalModel::new(self.model.clone(), Allowable::Constraint(f.clone()))
                .expect("allow clauses are checked at load time"),
            None => ExtendedCausalModel::all_settings(self.model.clone()),
        }
    }
}

struct Loader<'d> {
    doc: &'d ModelDocument,
    /// Position of the declaration and of the equation of each variable.
    decl_pos: BTreeMap<String, Pos>,
    eq_pos: BTreeMap<String, Pos>,
}

impl Loader<'_> {
    fn pos_of(&self, var: &str) -> Pos {
        self.eq_pos
            .get(var)
            .or_else(|| self.decl_pos.get(var))
            .copied()
            .unwrap_or_default()
    }

    fn model_error(&self, e: ModelError) -> DslError {
        let at = |v: &VariableId| self.pos_of(v.as_str());
        match &e {
            ModelError::OutOfRangeOutput { target, .. }
            | ModelError::UndefinedOutput { target, .. }
            | ModelError::TableSize { target, .. } => DslError::type_error(at(target), e.to_string()),
            ModelError::UndeclaredDependency { target, dependency } => DslError::UnknownIdentifier {
                pos: at(target),
                name: dependency.clone(),
            },
            ModelError::SelfDependency(t) | ModelError::DuplicateDependency { target: t, .. } => {
                DslError::Invalid {
                    pos: at(t),
                    message: e.to_string(),
                }
            }
            _ => DslError::Invalid {
                pos: self.doc.pos(0),
                message: e.to_string(),
            },
        }
    }
}

/// Validates a document and builds its model.
pub fn load_document(doc: &ModelDocument) -> Result<LoadedModel, DslError> {
    let mut loader = Loader {
        doc,
        decl_pos: BTreeMap::new(),
        eq_pos: BTreeMap::new(),
    };
    let mut vars = Vec::new();
    for (k, item) in doc.items.iter().enumerate() {
        if let Item::Var { kind, name, domain } = item {
            let pos = doc.pos(k);
            if RESERVED.contains(&name.as_str()) {
                return Err(DslError::Invalid {
                    pos,
                    message: format!("`{name}` is a reserved word"),
                });
            }
            if loader.decl_pos.insert(name.to_string(), pos).is_some() {
                return Err(DslError::Invalid {
                    pos,
                    message: format!("variable `{name}` is declared more than once"),
                });
            }
            for v in domain {
                if let Value::Sym(s) = v {
                    if RESERVED.contains(&s.as_str()) || !actcause_core::signature::is_identifier(s) {
                        return Err(DslError::Invalid {
                            pos,
                            message: format!("`{s}` cannot be used as a value"),
                        });
                    }
                }
            }
            let domain = Domain::new(domain.clone()).map_err(|e| DslError::Invalid {
                pos,
                message: format!("domain of `{name}`: {e}"),
            })?;
            vars.push(Variable {
                name: name.clone(),
                kind: *kind,
                domain,
            });
        }
    }
    for (k, item) in doc.items.iter().enumerate() {
        if let Item::Var { domain, .. } = item {
            for v in domain {
                if let Value::Sym(s) = v {
                    if loader.decl_pos.contains_key(s) {
                        return Err(DslError::type_error(
                            doc.pos(k),
                            format!("value `{s}` has the same name as a variable"),
                        ));
                    }
                }
            }
        }
    }
    let sig = Signature::new(vars).map_err(|e| DslError::Syntax {
        pos: doc.pos(doc.items.len().saturating_sub(1)),
        message: e.to_string(),
        expected: Vec::new(),
    })?;
    let symbols: HashSet<&str> = sig
        .variables()
        .iter()
        .flat_map(|v| v.domain.values())
        .filter_map(|v| match v {
            Value::Sym(s) => Some(s.as_str()),
            Value::Int(_) => None,
        })
        .collect();

    let mut mechanisms = Vec::new();
    for (k, item) in doc.items.iter().enumerate() {
        let Item::Eq { target, body } = item else { continue };
        let pos = doc.pos(k);
        let Some(var) = sig.get(target.as_str()) else {
            return Err(DslError::UnknownIdentifier {
                pos,
                name: target.to_string(),
            });
        };
        if var.kind == VarKind::Exogenous {
            return Err(DslError::type_error(
                pos,
                format!("`{target}` is exogenous and cannot have an equation"),
            ));
        }
        if loader.eq_pos.insert(target.to_string(), pos).is_some() {
            return Err(DslError::Invalid {
                pos,
                message: format!("more than one equation for `{target}`"),
            });
        }
        let mech = match body {
            EqBody::Expr(e) => {
                let checker = Checker {
                    sig: &sig,
                    symbols: &symbols,
                    pos,
                };
                checker.values(e)?;
                let read = e.variables();
                let deps: Vec<VariableId> = sig
                    .variables()
                    .iter()
                    .filter(|v| read.contains(&v.name))
                    .map(|v| v.name.clone())
                    .collect();
                Mechanism {
                    target: target.clone(),
                    dependencies: deps,
                    rule: Rule::Expr(e.clone()),
                }
            }
            EqBody::Table {
                inputs,
                rows,
                otherwise,
            } => table_mechanism(&sig, target, inputs, rows, otherwise.as_ref(), pos)?,
        };
        mechanisms.push(mech);
    }
    for (_, v) in sig.endogenous() {
        if !loader.eq_pos.contains_key(v.name.as_str()) {
            return Err(DslError::Invalid {
                pos: loader.decl_pos[v.name.as_str()],
                message: format!("no equation for endogenous variable `{}`", v.name),
            });
        }
    }
    let model = CausalModel::build(sig, mechanisms).map_err(|e| loader.model_error(e))?;
    let sig = model.signature();

    let mut clauses = Vec::new();
    for (k, item) in doc.items.iter().enumerate() {
        if let Item::Allow(f) = item {
            check_event(f, sig, doc.pos(k))?;
            clauses.push(f.clone());
        }
    }
    let allow = match clauses.len() {
        0 => None,
        1 => clauses.pop(),
        _ => Some(EventFormula::And(clauses)),
    };

    let mut contexts: Vec<(String, Context)> = Vec::new();
    for (k, item) in doc.items.iter().enumerate() {
        let Item::Context { name, values } = item else { continue };
        let pos = doc.pos(k);
        if contexts.iter().any(|(n, _)| n == name) {
            return Err(DslError::Invalid {
                pos,
                message: format!("context `{name}` is defined more than once"),
            });
        }
        contexts.push((name.clone(), make_context(&model, values, pos)?));
    }
    Ok(LoadedModel {
        document: doc.clone(),
        model,
        contexts,
        allow,
    })
}

/// Validates an inline context against `model`.
pub fn make_context(model: &CausalModel, values: &[(VariableId, Value)], pos: Pos) -> Result<Context, DslError> {
    let mut map = BTreeMap::new();
    for (n, v) in values {
        if map.insert(n.clone(), v.clone()).is_some() {
            return Err(DslError::Invalid {
                pos,
                message: format!("context assigns `{n}` twice"),
            });
        }
        if model.signature().get(n.as_str()).is_none() {
            return Err(DslError::UnknownIdentifier {
                pos,
                name: n.to_string(),
            });
        }
    }
    let ctx = Context::new(map);
    model.context_world(&ctx).map_err(|e| match e {
        ModelError::OutOfRangeValue { .. } | ModelError::NotExogenous(_) => DslError::type_error(pos, e.to_string()),
        other => DslError::Invalid {
            pos,
            message: other.to_string(),
        },
    })?;
    Ok(ctx)
}

/// Checks that every atom of `f` names an endogenous variable and an
/// in-range value.
pub fn check_event(f: &EventFormula, sig: &Signature, pos: Pos) -> Result<(), DslError> {
    match f {
        EventFormula::True | EventFormula::False => Ok(()),
        EventFormula::Prim(p) => {
            let Some(v) = sig.get(p.variable.as_str()) else {
                return Err(DslError::UnknownIdentifier {
                    pos,
                    name: p.variable.to_string(),
                });
            };
            if !v.is_endogenous() {
                return Err(DslError::type_error(pos, format!("`{}` is exogenous", p.variable)));
            }
            if !v.domain.contains(&p.value) {
                return Err(DslError::type_error(
                    pos,
                    format!("value `{}` is not in the range of `{}`", p.value, p.variable),
                ));
            }
            Ok(())
        }
        EventFormula::Not(a) => check_event(a, sig, pos),
        EventFormula::And(cs) | EventFormula::Or(cs) => cs.iter().try_for_each(|c| check_event(c, sig, pos)),
    }
}

fn table_mechanism(
    sig: &Signature,
    target: &VariableId,
    inputs: &[VariableId],
    rows: &[(Vec<Value>, Value)],
    otherwise: Option<&Value>,
    pos: Pos,
) -> Result<Mechanism, DslError> {
    let mut domains = Vec::new();
    for (k, i) in inputs.iter().enumerate() {
        let Some(v) = sig.get(i.as_str()) else {
            return Err(DslError::UnknownIdentifier {
                pos,
                name: i.to_string(),
            });
        };
        if inputs[..k].contains(i) {
            return Err(DslError::Invalid {
                pos,
                message: format!("table for `{target}` lists input `{i}` twice"),
            });
        }
        domains.push(v.domain.values());
    }
    let range = &sig.get(target.as_str()).expect("checked by caller").domain;
    let check_out = |o: &Value| {
        if range.contains(o) {
            Ok(())
        } else {
            Err(DslError::type_error(
                pos,
                format!("value `{o}` is not in the range of `{target}`"),
            ))
        }
    };
    let mut table: BTreeMap<&[Value], &Value> = BTreeMap::new();
    for (key, out) in rows {
        if key.len() != inputs.len() {
            return Err(DslError::type_error(
                pos,
                format!("table row has {} entries but `{target}` has {} inputs", key.len(), inputs.len()),
            ));
        }
        for ((v, dom), input) in key.iter().zip(&domains).zip(inputs) {
            if !dom.contains(v) {
                return Err(DslError::type_error(
                    pos,
                    format!("value `{v}` is not in the range of `{input}`"),
                ));
            }
        }
        check_out(out)?;
        if table.insert(key.as_slice(), out).is_some() {
            return Err(DslError::Invalid {
                pos,
                message: format!("table for `{target}` has more than one row for ({})", render(key)),
            });
        }
    }
    if let Some(o) = otherwise {
        check_out(o)?;
    }
    let mut outputs = Vec::new();
    let mut key: Vec<Value> = domains.iter().map(|d| d[0].clone()).collect();
    let mut idx = vec![0usize; domains.len()];
    loop {
        match table.get(key.as_slice()).copied().or(otherwise) {
            Some(o) => outputs.push(o.clone()),
            None => {
                return Err(DslError::type_error(
                    pos,
                    format!("table for `{target}` has no row for ({}) and no `else`", render(&key)),
                ))
            }
        }
        let mut k = domains.len();
        loop {
            if k == 0 {
                return Ok(Mechanism {
                    target: target.clone(),
                    dependencies: inputs.to_vec(),
                    rule: Rule::Table(outputs),
                });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                key[k] = domains[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            key[k] = domains[k][0].clone();
        }
    }
}

fn render(vals: &[Value]) -> String {
    vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Static check of an expression: computes the set of values it can take
/// (over-approximated), rejecting Boolean connectives on non-0/1 operands,
/// arithmetic on symbols, and comparisons that can never succeed because a
/// literal lies outside a variable's range.
struct Checker<'a> {
    sig: &'a Signature,
    symbols: &'a HashSet<&'a str>,
    pos: Pos,
}

fn bits() -> BTreeSet<Value> {
    BTreeSet::from([Value::Int(0), Value::Int(1)])
}

impl Checker<'_> {
    fn err(&self, message: String) -> DslError {
        DslError::type_error(self.pos, message)
    }

    fn require_bits(&self, s: &BTreeSet<Value>, what: &str) -> Result<(), DslError> {
        if s.iter().all(Value::is_bit) {
            Ok(())
        } else {
            Err(self.err(format!("{what} needs 0/1-valued operands")))
        }
    }

    fn require_ints(&self, s: &BTreeSet<Value>, what: &str) -> Result<Vec<i64>, DslError> {
        s.iter()
            .map(|v| v.as_int().ok_or_else(|| self.err(format!("{what} needs integer operands, found `{v}`"))))
            .collect()
    }

    fn values(&self, e: &Expr) -> Result<BTreeSet<Value>, DslError> {
        Ok(match e {
            Expr::Lit(v) => {
                if let Value::Sym(s) = v {
                    if !self.symbols.contains(s.as_str()) {
                        return Err(DslError::UnknownIdentifier {
                            pos: self.pos,
                            name: s.clone(),
                        });
                    }
                }
                BTreeSet::from([v.clone()])
            }
            Expr::Var(v) => match self.sig.get(v.as_str()) {
                Some(var) => var.domain.values().iter().cloned().collect(),
                None => {
                    return Err(DslError::UnknownIdentifier {
                        pos: self.pos,
                        name: v.to_string(),
                    })
                }
            },
            Expr::Not(a) => {
                let s = self.values(a)?;
                self.require_bits(&s, "`!`")?;
                s.iter().map(|v| Value::Int(1 - v.as_int().unwrap())).collect()
            }
            Expr::Bin(op, a, b) => {
                let (sa, sb) = (self.values(a)?, self.values(b)?);
                match op {
                    BinOp::And | BinOp::Or => {
                        let name = if *op == BinOp::And { "`&`" } else { "`|`" };
                        self.require_bits(&sa, name)?;
                        self.require_bits(&sb, name)?;
                        bits()
                    }
                    BinOp::Eq | BinOp::Ne => {
                        let all_int = |s: &BTreeSet<Value>| s.iter().all(Value::is_int);
                        let all_sym = |s: &BTreeSet<Value>| s.iter().all(|v| !v.is_int());
                        if (all_int(&sa) && all_sym(&sb)) || (all_sym(&sa) && all_int(&sb)) {
                            return Err(self.err("comparison between integers and symbols".into()));
                        }
                        for (x, y) in [(a, b), (b, a)] {
                            if let (Expr::Var(v), Expr::Lit(l)) = (&**x, &**y) {
                                let var = self.sig.get(v.as_str()).expect("checked above");
                                if !var.domain.contains(l) {
                                    return Err(self.err(format!("value `{l}` is not in the range of `{v}`")));
                                }
                            }
                        }
                        bits()
                    }
                    BinOp::Add | BinOp::Sub | BinOp::Min | BinOp::Max => {
                        let name = match op {
                            BinOp::Add => "`+`",
                            BinOp::Sub => "`-`",
                            BinOp::Min => "`min`",
                            _ => "`max`",
                        };
                        let (xa, xb) = (self.require_ints(&sa, name)?, self.require_ints(&sb, name)?);
                        let mut out = BTreeSet::new();
                        for &x in &xa {
                            for &y in &xb {
                                let r = match op {
                                    BinOp::Add => x.checked_add(y),
                                    BinOp::Sub => x.checked_sub(y),
                                    BinOp::Min => Some(x.min(y)),
                                    _ => Some(x.max(y)),
                                };
                                out.insert(Value::Int(r.ok_or_else(|| self.err("integer overflow".into()))?));
                            }
                        }
                        out
                    }
                }
            }
            Expr::If { cond, then, otherwise } => {
                self.require_bits(&self.values(cond)?, "`if` condition")?;
                let mut s = self.values(then)?;
                s.extend(self.values(otherwise)?);
                s
            }
            Expr::Case { arms, otherwise } => {
                let mut s = BTreeSet::new();
                for (g, v) in arms {
                    self.require_bits(&self.values(g)?, "`case` guard")?;
                    s.extend(self.values(v)?);
                }
                if let Some(o) = otherwise {
                    s.extend(self.values(o)?);
                }
                s
            }
        })
    }
}
