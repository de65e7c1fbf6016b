//! Expression language for mechanism rules.
//!
//! Expressions are evaluated over [`Value`]s. Boolean connectives operate on
//! the integers 0 and 1 (`&` is min, `|` is max, `!` is 1 - x); equality
//! tests yield 0 or 1. Mixing symbols and integers is an evaluation error,
//! never a coercion.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::signature::VariableId;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Eq,
    Ne,
    And,
    Or,
    Add,
    Sub,
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Lit(Value),
    Var(VariableId),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    /// Guarded alternatives tried in order; the first guard equal to 1 wins.
    Case {
        arms: Vec<(Expr, Expr)>,
        otherwise: Option<Box<Expr>>,
    },
}

impl Expr {
    pub fn var(name: &VariableId) -> Expr {
        Expr::Var(name.clone())
    }

    pub fn int(i: i64) -> Expr {
        Expr::Lit(Value::Int(i))
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// Variables read anywhere in the expression.
    pub fn variables(&self) -> BTreeSet<&VariableId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a VariableId>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                cond.collect_vars(out);
                then.collect_vars(out);
                otherwise.collect_vars(out);
            }
            Expr::Case { arms, otherwise } => {
                for (g, e) in arms {
                    g.collect_vars(out);
                    e.collect_vars(out);
                }
                if let Some(e) = otherwise {
                    e.collect_vars(out);
                }
            }
        }
    }

    /// Replaces variables by fixed values.
    pub fn substitute(&self, fixed: &BTreeMap<VariableId, Value>) -> Expr {
        match self {
            Expr::Lit(_) => self.clone(),
            Expr::Var(v) => match fixed.get(v) {
                Some(val) => Expr::Lit(val.clone()),
                None => self.clone(),
            },
            Expr::Not(e) => Expr::not(e.substitute(fixed)),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(fixed), b.substitute(fixed)),
            Expr::If {
                cond,
                then,
                otherwise,
            } => Expr::If {
                cond: Box::new(cond.substitute(fixed)),
                then: Box::new(then.substitute(fixed)),
                otherwise: Box::new(otherwise.substitute(fixed)),
            },
            Expr::Case { arms, otherwise } => Expr::Case {
                arms: arms
                    .iter()
                    .map(|(g, e)| (g.substitute(fixed), e.substitute(fixed)))
                    .collect(),
                otherwise: otherwise.as_ref().map(|e| Box::new(e.substitute(fixed))),
            },
        }
    }

    /// Evaluates the expression, reading variables through `env`.
    pub fn eval<F>(&self, env: &F) -> Result<Value, String>
    where
        F: Fn(&VariableId) -> Option<Value>,
    {
        match self {
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Var(name) => env(name).ok_or_else(|| format!("`{name}` is unbound")),
            Expr::Not(e) => {
                let b = bit(e.eval(env)?, "!")?;
                Ok(Value::Int(1 - b))
            }
            Expr::Bin(op, a, b) => {
                let a = a.eval(env)?;
                let b = b.eval(env)?;
                apply(*op, a, b)
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                if bit(cond.eval(env)?, "if")? == 1 {
                    then.eval(env)
                } else {
                    otherwise.eval(env)
                }
            }
            Expr::Case { arms, otherwise } => {
                for (guard, e) in arms {
                    if bit(guard.eval(env)?, "case guard")? == 1 {
                        return e.eval(env);
                    }
                }
                match otherwise {
                    Some(e) => e.eval(env),
                    None => Err("no case arm matched".to_string()),
                }
            }
        }
    }
}

fn bit(v: Value, ctx: &str) -> Result<i64, String> {
    match v {
        Value::Int(i @ (0 | 1)) => Ok(i),
        other => Err(format!("`{ctx}` expects 0 or 1, got `{other}`")),
    }
}

fn int(v: Value, ctx: &str) -> Result<i64, String> {
    v.as_int()
        .ok_or_else(|| format!("`{ctx}` expects an integer, got `{v}`"))
}

pub(crate) fn apply(op: BinOp, a: Value, b: Value) -> Result<Value, String> {
    let truth = |t: bool| Value::Int(t as i64);
    match op {
        BinOp::Eq | BinOp::Ne => {
            if a.is_int() != b.is_int() {
                return Err(format!("cannot compare `{a}` with `{b}`"));
            }
            Ok(truth((a == b) == (op == BinOp::Eq)))
        }
        BinOp::And => Ok(Value::Int(bit(a, "&")?.min(bit(b, "&")?))),
        BinOp::Or => Ok(Value::Int(bit(a, "|")?.max(bit(b, "|")?))),
        BinOp::Add => int(a, "+")?
            .checked_add(int(b, "+")?)
            .map(Value::Int)
            .ok_or_else(|| "integer overflow".to_string()),
        BinOp::Sub => int(a, "-")?
            .checked_sub(int(b, "-")?)
            .map(Value::Int)
            .ok_or_else(|| "integer overflow".to_string()),
        BinOp::Min => Ok(Value::Int(int(a, "min")?.min(int(b, "min")?))),
        BinOp::Max => Ok(Value::Int(int(a, "max")?.max(int(b, "max")?))),
    }
}
