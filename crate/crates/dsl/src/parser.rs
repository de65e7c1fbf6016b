//! Recursive-descent parser for model files, formulas and queries.
//!
//! Expression precedence, loosest first: `if`, `|`, `&`, `=`/`!=`,
//! `+`/`-`, `!`. Formula precedence, loosest first: `<->`, `->` (right
//! associative), `|`, `&`, then `!` and the modal prefixes `[..]`/`<..>`,
//! whose body is a single atom, negation or parenthesized event formula.

use std::collections::HashSet;

use actcause_core::{
    BinOp, CausalFormula, DefinitionVariant, EventFormula, Expr, Modality, PrimitiveEvent,
    Signature, Value, VarKind, VariableId,
};

use crate::ast::{Command, ContextRef, ContrastSpec, EqBody, Item, ModelDocument, QueryDocument};
use crate::error::DslError;
use crate::lexer::{lex, Pos, Tok, Token};

/// Words that cannot name variables or symbolic values.
pub const RESERVED: &[&str] = &[
    "model", "exo", "var", "eq", "allow", "context", "case", "if", "then", "else", "min", "max",
    "true", "false",
];

pub(crate) struct Parser<'s> {
    toks: Vec<Token>,
    i: usize,
    /// When present, formula atoms are checked against it as they are read.
    sig: Option<&'s Signature>,
}

impl<'s> Parser<'s> {
    pub fn new(text: &str, sig: Option<&'s Signature>) -> Result<Self, DslError> {
        Ok(Parser {
            toks: lex(text)?,
            i: 0,
            sig,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> DslError {
        DslError::Syntax {
            pos: self.pos(),
            message: format!("unexpected {}", self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Pos, DslError> {
        if self.at(&t) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&[&t.to_string()]))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Pos, DslError> {
        if self.at_kw(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    pub fn finish(&self) -> Result<(), DslError> {
        if self.at(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    /// Any identifier, reserved or not.
    fn ident(&mut self, what: &str) -> Result<(String, Pos), DslError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().pos)),
            _ => Err(self.unexpected(&[what])),
        }
    }

    /// A non-reserved identifier naming a variable.
    fn name(&mut self) -> Result<(VariableId, Pos), DslError> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let pos = self.bump().pos;
                let id = VariableId::new(s).map_err(|e| DslError::Invalid {
                    pos,
                    message: e.to_string(),
                })?;
                Ok((id, pos))
            }
            Tok::Ident(s) => Err(DslError::Syntax {
                pos: self.pos(),
                message: format!("`{s}` is a reserved word"),
                expected: vec!["variable name".into()],
            }),
            _ => Err(self.unexpected(&["variable name"])),
        }
    }

    /// An integer (optionally negative) or a bare symbol.
    fn value(&mut self) -> Result<(Value, Pos), DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok((Value::Int(i), pos))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        Ok((Value::Int(-i), pos))
                    }
                    _ => Err(self.unexpected(&["integer"])),
                }
            }
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok((Value::Sym(s), pos))
            }
            _ => Err(self.unexpected(&["value"])),
        }
    }

    // ---- models ----

    pub fn model_document(&mut self) -> Result<ModelDocument, DslError> {
        self.expect_kw("model")?;
        let (name, _) = self.ident("model name")?;
        self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        let mut positions = Vec::new();
        while !self.at(&Tok::RBrace) {
            let pos = self.pos();
            let item = if self.at_kw("exo") || self.at_kw("var") {
                let kind = if self.eat_kw("exo") {
                    VarKind::Exogenous
                } else {
                    self.bump();
                    VarKind::Endogenous
                };
                let (name, _) = self.name()?;
                self.expect(Tok::Colon)?;
                self.expect(Tok::LBrace)?;
                let mut domain = vec![self.value()?.0];
                while self.eat(&Tok::Comma) {
                    domain.push(self.value()?.0);
                }
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Semi)?;
                Item::Var { kind, name, domain }
            } else if self.eat_kw("eq") {
                let (target, _) = self.name()?;
                self.expect(Tok::Eq)?;
                let body = self.eq_body()?;
                self.expect(Tok::Semi)?;
                Item::Eq { target, body }
            } else if self.eat_kw("allow") {
                let f = self.event()?;
                self.expect(Tok::Semi)?;
                Item::Allow(f)
            } else if self.eat_kw("context") {
                let (name, _) = self.ident("context name")?;
                let values = self.settings(Tok::Eq)?;
                self.eat(&Tok::Semi);
                Item::Context { name, values }
            } else {
                return Err(self.unexpected(&["`exo`", "`var`", "`eq`", "`allow`", "`context`", "`}`"]));
            };
            items.push(item);
            positions.push(pos);
        }
        let close = self.expect(Tok::RBrace)?;
        self.finish()?;
        let has_endogenous = items
            .iter()
            .any(|i| matches!(i, Item::Var { kind: VarKind::Endogenous, .. }));
        if !has_endogenous {
            return Err(DslError::Syntax {
                pos: close,
                message: "a model needs at least one endogenous variable".into(),
                expected: vec!["`var`".into()],
            });
        }
        let declared: HashSet<String> = items
            .iter()
            .filter_map(|i| match i {
                Item::Var { name, .. } => Some(name.to_string()),
                _ => None,
            })
            .collect();
        for item in &mut items {
            if let Item::Eq {
                body: EqBody::Expr(e),
                ..
            } = item
            {
                *e = resolve_symbols(std::mem::replace(e, Expr::int(0)), &declared);
            }
        }
        Ok(ModelDocument {
            name,
            items,
            positions,
        })
    }

    /// `{ A = v, B = w }`, with `sep` between name and value.
    fn settings(&mut self, sep: Tok) -> Result<Vec<(VariableId, Value)>, DslError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if !self.at(&Tok::RBrace) {
            loop {
                let (n, _) = self.name()?;
                self.expect(sep.clone())?;
                out.push((n, self.value()?.0));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn eq_body(&mut self) -> Result<EqBody, DslError> {
        if self.at_kw("case") && matches!(self.peek_at(1), Tok::LParen | Tok::Ident(_)) {
            self.bump();
            let inputs = if self.eat(&Tok::LParen) {
                let mut v = vec![self.name()?.0];
                while self.eat(&Tok::Comma) {
                    v.push(self.name()?.0);
                }
                self.expect(Tok::RParen)?;
                v
            } else {
                vec![self.name()?.0]
            };
            self.expect(Tok::LBrace)?;
            let mut rows = Vec::new();
            let mut otherwise = None;
            while !self.at(&Tok::RBrace) {
                if self.eat_kw("else") {
                    self.expect(Tok::FatArrow)?;
                    otherwise = Some(self.value()?.0);
                } else {
                    let key = if self.eat(&Tok::LParen) {
                        let mut v = vec![self.value()?.0];
                        while self.eat(&Tok::Comma) {
                            v.push(self.value()?.0);
                        }
                        self.expect(Tok::RParen)?;
                        v
                    } else {
                        vec![self.value()?.0]
                    };
                    self.expect(Tok::FatArrow)?;
                    rows.push((key, self.value()?.0));
                }
                if !self.eat(&Tok::Semi) && !self.at(&Tok::RBrace) {
                    return Err(self.unexpected(&["`;`", "`}`"]));
                }
            }
            self.expect(Tok::RBrace)?;
            Ok(EqBody::Table {
                inputs,
                rows,
                otherwise,
            })
        } else {
            Ok(EqBody::Expr(self.expr()?))
        }
    }

    pub fn expr(&mut self) -> Result<Expr, DslError> {
        if self.eat_kw("if") {
            let cond = self.expr()?;
            self.expect_kw("then")?;
            let then = self.expr()?;
            self.expect_kw("else")?;
            let otherwise = self.expr()?;
            return Ok(Expr::If {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        let mut lhs = self.expr_and()?;
        while self.eat(&Tok::Pipe) {
            lhs = Expr::bin(BinOp::Or, lhs, self.expr_and()?);
        }
        Ok(lhs)
    }

    fn expr_and(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.expr_cmp()?;
        while self.eat(&Tok::Amp) {
            lhs = Expr::bin(BinOp::And, lhs, self.expr_cmp()?);
        }
        Ok(lhs)
    }

    fn expr_cmp(&mut self) -> Result<Expr, DslError> {
        let lhs = self.expr_add()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::bin(op, lhs, self.expr_add()?))
    }

    fn expr_add(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.expr_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.expr_unary()?);
        }
    }

    fn expr_unary(&mut self) -> Result<Expr, DslError> {
        if self.eat(&Tok::Bang) {
            return Ok(Expr::not(self.expr_unary()?));
        }
        match self.peek().clone() {
            Tok::Int(_) | Tok::Minus => Ok(Expr::Lit(self.value()?.0)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.bump();
                    Ok(Expr::int(1))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::int(0))
                }
                "min" | "max" => {
                    self.bump();
                    let op = if s == "min" { BinOp::Min } else { BinOp::Max };
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::bin(op, a, b))
                }
                "case" => {
                    self.bump();
                    self.expect(Tok::LBrace)?;
                    let mut arms = Vec::new();
                    let mut otherwise = None;
                    while !self.at(&Tok::RBrace) {
                        if self.eat_kw("else") {
                            self.expect(Tok::FatArrow)?;
                            otherwise = Some(Box::new(self.expr()?));
                        } else {
                            let guard = self.expr()?;
                            self.expect(Tok::FatArrow)?;
                            arms.push((guard, self.expr()?));
                        }
                        if !self.eat(&Tok::Semi) && !self.at(&Tok::RBrace) {
                            return Err(self.unexpected(&["`;`", "`}`"]));
                        }
                    }
                    self.expect(Tok::RBrace)?;
                    Ok(Expr::Case { arms, otherwise })
                }
                _ => Ok(Expr::Var(self.name()?.0)),
            },
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    // ---- formulas ----

    fn check_setting(&self, var: &VariableId, value: &Value, vpos: Pos, pos: Pos) -> Result<(), DslError> {
        let Some(sig) = self.sig else { return Ok(()) };
        let Some(v) = sig.get(var.as_str()) else {
            return Err(DslError::UnknownIdentifier {
                pos,
                name: var.to_string(),
            });
        };
        if !v.is_endogenous() {
            return Err(DslError::type_error(
                pos,
                format!("`{var}` is exogenous; only endogenous variables may appear here"),
            ));
        }
        if !v.domain.contains(value) {
            return Err(DslError::type_error(
                vpos,
                format!("value `{value}` is not in the range of `{var}`"),
            ));
        }
        Ok(())
    }

    fn primitive(&mut self) -> Result<(PrimitiveEvent, bool), DslError> {
        let (var, pos) = self.name()?;
        let negated = match self.peek() {
            Tok::Eq => false,
            Tok::Ne => true,
            _ => return Err(self.unexpected(&["`=`", "`!=`"])),
        };
        self.bump();
        let (value, vpos) = self.value()?;
        self.check_setting(&var, &value, vpos, pos)?;
        Ok((
            PrimitiveEvent {
                variable: var,
                value,
            },
            negated,
        ))
    }

    /// A full event formula, including `->` and `<->`.
    pub fn event(&mut self) -> Result<EventFormula, DslError> {
        let lhs = self.event_imp()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.event_imp()?;
            return Ok(EventFormula::Or(vec![
                EventFormula::And(vec![lhs.clone(), rhs.clone()]),
                EventFormula::And(vec![lhs.not(), rhs.not()]),
            ]));
        }
        Ok(lhs)
    }

    fn event_imp(&mut self) -> Result<EventFormula, DslError> {
        let lhs = self.event_or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.event_imp()?;
            return Ok(EventFormula::Or(vec![lhs.not(), rhs]));
        }
        Ok(lhs)
    }

    fn event_or(&mut self) -> Result<EventFormula, DslError> {
        let mut cs = vec![self.event_and()?];
        while self.eat(&Tok::Pipe) {
            cs.push(self.event_and()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { EventFormula::Or(cs) })
    }

    fn event_and(&mut self) -> Result<EventFormula, DslError> {
        let mut cs = vec![self.event_unary()?];
        while self.eat(&Tok::Amp) {
            cs.push(self.event_unary()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { EventFormula::And(cs) })
    }

    fn event_unary(&mut self) -> Result<EventFormula, DslError> {
        if self.eat(&Tok::Bang) {
            return Ok(self.event_unary()?.not());
        }
        if self.eat(&Tok::LParen) {
            let f = self.event()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if self.eat_kw("true") {
            return Ok(EventFormula::True);
        }
        if self.eat_kw("false") {
            return Ok(EventFormula::False);
        }
        if !matches!(self.peek(), Tok::Ident(_)) {
            return Err(self.unexpected(&["`!`", "`(`", "variable name", "`true`", "`false`"]));
        }
        let (p, negated) = self.primitive()?;
        let f = EventFormula::Prim(p);
        Ok(if negated { f.not() } else { f })
    }

    /// A causal formula; subformulas without modal operators become
    /// [`CausalFormula::Event`] nodes.
    pub fn causal(&mut self) -> Result<CausalFormula, DslError> {
        Ok(normalize(self.causal_iff()?))
    }

    fn causal_iff(&mut self) -> Result<CausalFormula, DslError> {
        let lhs = self.causal_imp()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.causal_imp()?;
            return Ok(CausalFormula::Or(vec![
                CausalFormula::And(vec![lhs.clone(), rhs.clone()]),
                CausalFormula::And(vec![lhs.not(), rhs.not()]),
            ]));
        }
        Ok(lhs)
    }

    fn causal_imp(&mut self) -> Result<CausalFormula, DslError> {
        let lhs = self.causal_or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.causal_imp()?;
            return Ok(CausalFormula::Or(vec![lhs.not(), rhs]));
        }
        Ok(lhs)
    }

    fn causal_or(&mut self) -> Result<CausalFormula, DslError> {
        let mut cs = vec![self.causal_and()?];
        while self.eat(&Tok::Pipe) {
            cs.push(self.causal_and()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { CausalFormula::Or(cs) })
    }

    fn causal_and(&mut self) -> Result<CausalFormula, DslError> {
        let mut cs = vec![self.causal_unary()?];
        while self.eat(&Tok::Amp) {
            cs.push(self.causal_unary()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { CausalFormula::And(cs) })
    }

    fn causal_unary(&mut self) -> Result<CausalFormula, DslError> {
        if self.eat(&Tok::Bang) {
            return Ok(self.causal_unary()?.not());
        }
        if self.eat(&Tok::LParen) {
            let f = self.causal_iff()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let modality = match self.peek() {
            Tok::LBracket => Modality::Box,
            Tok::Lt => Modality::Diamond,
            _ => return Ok(CausalFormula::Event(self.event_unary()?)),
        };
        self.bump();
        let close = if modality == Modality::Box { Tok::RBracket } else { Tok::Gt };
        let mut intervention: Vec<(VariableId, Value)> = Vec::new();
        if !self.at(&close) {
            loop {
                let (var, pos) = self.name()?;
                self.expect(Tok::Assign)?;
                let (value, vpos) = self.value()?;
                self.check_setting(&var, &value, vpos, pos)?;
                if intervention.iter().any(|(v, _)| *v == var) {
                    return Err(DslError::type_error(pos, format!("`{var}` is intervened on twice")));
                }
                intervention.push((var, value));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(close)?;
        let body = self.event_unary()?;
        Ok(CausalFormula::Basic {
            intervention,
            body,
            modality,
        })
    }

    /// `X=x & Y=y`: a conjunction of primitive events with distinct
    /// variables.
    pub fn cause(&mut self) -> Result<Vec<PrimitiveEvent>, DslError> {
        let mut out: Vec<PrimitiveEvent> = Vec::new();
        loop {
            let pos = self.pos();
            if self.at_kw("of") {
                return Err(self.unexpected(&["variable name"]));
            }
            let (p, negated) = self.primitive()?;
            if negated {
                return Err(DslError::Syntax {
                    pos,
                    message: "a cause is a conjunction of `X=x` events".into(),
                    expected: vec!["`=`".into()],
                });
            }
            if out.iter().any(|q| q.variable == p.variable) {
                return Err(DslError::type_error(pos, format!("`{}` appears twice in the cause", p.variable)));
            }
            out.push(p);
            if !self.eat(&Tok::Amp) {
                return Ok(out);
            }
        }
    }

    // ---- queries ----

    /// Parses a query; `contexts` lists the context names the model defines.
    pub fn query(&mut self, contexts: &[&str]) -> Result<QueryDocument, DslError> {
        let model = if self.eat_kw("model") {
            Some(self.ident("model name")?.0)
        } else {
            None
        };
        let command = if self.eat_kw("check") {
            if self.at_kw("cause") && !matches!(self.peek_at(1), Tok::Eq | Tok::Ne) {
                self.bump();
            }
            let cause = self.cause()?;
            self.expect_kw("of")?;
            Command::Check {
                cause,
                effect: self.event()?,
            }
        } else if self.eat_kw("causes") {
            self.expect_kw("of")?;
            Command::Causes { effect: self.event()? }
        } else if self.eat_kw("witnesses") {
            let cause = self.cause()?;
            self.expect_kw("of")?;
            Command::Witnesses {
                cause,
                effect: self.event()?,
            }
        } else if self.eat_kw("process") {
            let cause = self.cause()?;
            self.expect_kw("of")?;
            Command::Process {
                cause,
                effect: self.event()?,
            }
        } else if self.eat_kw("eval") {
            Command::Eval(self.causal()?)
        } else if self.eat_kw("contrast") {
            let cause = self.cause()?;
            self.expect_kw("of")?;
            let effect = self.event()?;
            let contrast = if self.eat_kw("instead") {
                self.expect_kw("of")?;
                ContrastSpec::InsteadOf(self.event()?)
            } else if self.eat_kw("rather") {
                self.expect_kw("than")?;
                let (value, vpos) = self.value()?;
                if let [p] = cause.as_slice() {
                    self.check_setting(&p.variable, &value, vpos, vpos)?;
                }
                ContrastSpec::RatherThan {
                    value,
                    weak: self.eat_kw("weak"),
                }
            } else {
                return Err(self.unexpected(&["`instead`", "`rather`"]));
            };
            Command::Contrast {
                cause,
                effect,
                contrast,
            }
        } else {
            return Err(self.unexpected(&["`check`", "`causes`", "`witnesses`", "`process`", "`eval`", "`contrast`"]));
        };
        let mut q = QueryDocument {
            model,
            command,
            context: None,
            variant: DefinitionVariant::Updated,
            extended: false,
            exclude_self: false,
            max_conjuncts: None,
        };
        while !self.at(&Tok::Eof) {
            if self.eat_kw("context") {
                if self.at(&Tok::LBrace) {
                    let values = self.settings(Tok::Eq)?;
                    q.context = Some(ContextRef::Inline(values));
                } else {
                    let (name, pos) = self.ident("context name")?;
                    if !contexts.contains(&name.as_str()) {
                        return Err(DslError::UnknownIdentifier { pos, name });
                    }
                    q.context = Some(ContextRef::Named(name));
                }
            } else if self.eat_kw("definition") {
                let (name, pos) = self.ident("`updated`, `legacy` or `strong`")?;
                q.variant = parse_variant(&name).ok_or_else(|| DslError::Syntax {
                    pos,
                    message: format!("unknown definition `{name}`"),
                    expected: vec!["`updated`".into(), "`legacy`".into(), "`strong`".into()],
                })?;
            } else if self.eat_kw("extended") {
                q.extended = true;
            } else if self.eat_kw("exclude_self") {
                q.exclude_self = true;
            } else if self.eat_kw("max_conjuncts") {
                match self.peek().clone() {
                    Tok::Int(n) if n >= 1 => {
                        self.bump();
                        q.max_conjuncts = Some(n as usize);
                    }
                    _ => return Err(self.unexpected(&["positive integer"])),
                }
            } else {
                return Err(self.unexpected(&[
                    "`context`",
                    "`definition`",
                    "`extended`",
                    "`exclude_self`",
                    "`max_conjuncts`",
                    "end of input",
                ]));
            }
        }
        Ok(q)
    }

    /// True when the input is a single identifier.
    pub fn peek_is_lone_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Eof
    }

    /// `U=1, V=0` or `{U=1, V=0}`.
    pub fn inline_settings(&mut self) -> Result<Vec<(VariableId, Value)>, DslError> {
        if self.at(&Tok::LBrace) {
            return self.settings(Tok::Eq);
        }
        let mut out = Vec::new();
        loop {
            let (n, _) = self.name()?;
            self.expect(Tok::Eq)?;
            out.push((n, self.value()?.0));
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }
}

/// `updated`, `legacy` (or `legacy_b_prime`) and `strong`.
pub fn parse_variant(name: &str) -> Option<DefinitionVariant> {
    match name {
        "updated" => Some(DefinitionVariant::Updated),
        "legacy" | "legacy_b_prime" => Some(DefinitionVariant::LegacyBPrime),
        "strong" => Some(DefinitionVariant::Strong),
        _ => None,
    }
}

/// Identifiers that name no declared variable are symbolic values.
fn resolve_symbols(e: Expr, declared: &HashSet<String>) -> Expr {
    let r = |e: Expr| resolve_symbols(e, declared);
    match e {
        Expr::Var(v) if !declared.contains(v.as_str()) => Expr::Lit(Value::Sym(v.to_string())),
        Expr::Var(v) => Expr::Var(v),
        Expr::Lit(v) => Expr::Lit(v),
        Expr::Not(a) => Expr::not(r(*a)),
        Expr::Bin(op, a, b) => Expr::bin(op, r(*a), r(*b)),
        Expr::If { cond, then, otherwise } => Expr::If {
            cond: Box::new(r(*cond)),
            then: Box::new(r(*then)),
            otherwise: Box::new(r(*otherwise)),
        },
        Expr::Case { arms, otherwise } => Expr::Case {
            arms: arms.into_iter().map(|(g, v)| (r(g), r(v))).collect(),
            otherwise: otherwise.map(|o| Box::new(r(*o))),
        },
    }
}

fn is_pure(c: &CausalFormula) -> bool {
    match c {
        CausalFormula::Event(_) => true,
        CausalFormula::Basic { .. } => false,
        CausalFormula::Not(a) => is_pure(a),
        CausalFormula::And(cs) | CausalFormula::Or(cs) => cs.iter().all(is_pure),
    }
}

fn to_event(c: CausalFormula) -> EventFormula {
    match c {
        CausalFormula::Event(e) => e,
        CausalFormula::Not(a) => to_event(*a).not(),
        CausalFormula::And(cs) => EventFormula::And(cs.into_iter().map(to_event).collect()),
        CausalFormula::Or(cs) => EventFormula::Or(cs.into_iter().map(to_event).collect()),
        CausalFormula::Basic { .. } => unreachable!("checked by is_pure"),
    }
}

/// Collapses every maximal modal-free subtree into a single
/// [`CausalFormula::Event`]. Parsed formulas are always in this form.
pub fn normalize(c: CausalFormula) -> CausalFormula {
    if is_pure(&c) {
        return CausalFormula::Event(to_event(c));
    }
    match c {
        CausalFormula::Not(a) => normalize(*a).not(),
        CausalFormula::And(cs) => CausalFormula::And(cs.into_iter().map(normalize).collect()),
        CausalFormula::Or(cs) => CausalFormula::Or(cs.into_iter().map(normalize).collect()),
        other => other,
    }
}
