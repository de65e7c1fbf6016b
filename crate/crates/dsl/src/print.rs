//! Canonical text for model documents.

use std::fmt::Write;

use actcause_core::{BinOp, CausalModel, Context, EventFormula, Expr, Rule, Value, VarKind};

use crate::ast::{EqBody, Item, ModelDocument};

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::If { .. } => 0,
        Expr::Bin(BinOp::Or, ..) => 1,
        Expr::Bin(BinOp::And, ..) => 2,
        Expr::Bin(BinOp::Eq | BinOp::Ne, ..) => 3,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 4,
        Expr::Not(_) => 5,
        Expr::Lit(_) | Expr::Var(_) | Expr::Case { .. } | Expr::Bin(BinOp::Min | BinOp::Max, ..) => 6,
    }
}

/// Writes `e` so that it reparses to the same tree, parenthesizing only
/// where precedence or associativity requires it.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let p = prec(e);
    if p < min {
        out.push('(');
        write_expr(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        Expr::Lit(v) => write!(out, "{v}").unwrap(),
        Expr::Var(v) => out.push_str(v.as_str()),
        Expr::Not(a) => {
            out.push('!');
            write_expr(out, a, 5);
        }
        Expr::Bin(op @ (BinOp::Min | BinOp::Max), a, b) => {
            out.push_str(if *op == BinOp::Min { "min(" } else { "max(" });
            write_expr(out, a, 0);
            out.push_str(", ");
            write_expr(out, b, 0);
            out.push(')');
        }
        Expr::Bin(op, a, b) => {
            let sym = match op {
                BinOp::Or => "|",
                BinOp::And => "&",
                BinOp::Eq => "=",
                BinOp::Ne => "!=",
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Min | BinOp::Max => unreachable!(),
            };
            let left = if matches!(op, BinOp::Eq | BinOp::Ne) { p + 1 } else { p };
            write_expr(out, a, left);
            write!(out, " {sym} ").unwrap();
            write_expr(out, b, p + 1);
        }
        Expr::If { cond, then, otherwise } => {
            out.push_str("if ");
            write_expr(out, cond, 0);
            out.push_str(" then ");
            write_expr(out, then, 0);
            out.push_str(" else ");
            write_expr(out, otherwise, 0);
        }
        Expr::Case { arms, otherwise } => {
            out.push_str("case {");
            for (g, v) in arms {
                out.push(' ');
                write_expr(out, g, 0);
                out.push_str(" => ");
                write_expr(out, v, 0);
                out.push(';');
            }
            if let Some(o) = otherwise {
                out.push_str(" else => ");
                write_expr(out, o, 0);
                out.push(';');
            }
            out.push_str(" }");
        }
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text of a model document. Parsing the result yields a
/// document equal to `doc`.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut s = format!("model {} {{\n", doc.name);
    for item in &doc.items {
        match item {
            Item::Var { kind, name, domain } => {
                let kw = if *kind == VarKind::Exogenous { "exo" } else { "var" };
                writeln!(s, "  {kw} {name} : {{{}}};", join(domain)).unwrap();
            }
            Item::Eq { target, body: EqBody::Expr(e) } => {
                writeln!(s, "  eq {target} = {};", expr_to_string(e)).unwrap();
            }
            Item::Eq {
                target,
                body: EqBody::Table { inputs, rows, otherwise },
            } => {
                let single = inputs.len() == 1;
                let head = if single { inputs[0].to_string() } else { format!("({})", join(inputs)) };
                writeln!(s, "  eq {target} = case {head} {{").unwrap();
                for (key, out) in rows {
                    let key = if single && key.len() == 1 { key[0].to_string() } else { format!("({})", join(key)) };
                    writeln!(s, "    {key} => {out};").unwrap();
                }
                if let Some(o) = otherwise {
                    writeln!(s, "    else => {o};").unwrap();
                }
                s.push_str("  };\n");
            }
            Item::Allow(f) => writeln!(s, "  allow {f};").unwrap(),
            Item::Context { name, values } => {
                let vals: Vec<String> = values.iter().map(|(n, v)| format!("{n} = {v}")).collect();
                writeln!(s, "  context {name} {{ {} }}", vals.join(", ")).unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

/// A document describing `model`. Table rules become exhaustive `case`
/// tables over their dependencies; a table with no dependencies becomes a
/// constant.
pub fn to_document(
    name: &str,
    model: &CausalModel,
    contexts: &[(String, Context)],
    allow: Option<&EventFormula>,
) -> ModelDocument {
    let sig = model.signature();
    let mut items: Vec<Item> = sig
        .variables()
        .iter()
        .map(|v| Item::Var {
            kind: v.kind,
            name: v.name.clone(),
            domain: v.domain.values().to_vec(),
        })
        .collect();
    for m in model.mechanisms() {
        let body = match &m.rule {
            Rule::Expr(e) => EqBody::Expr(e.clone()),
            Rule::Table(rows) if m.dependencies.is_empty() => EqBody::Expr(Expr::Lit(rows[0].clone())),
            Rule::Table(rows) => {
                let domains: Vec<&[Value]> = m
                    .dependencies
                    .iter()
                    .map(|d| sig.get(d.as_str()).expect("validated dependency").domain.values())
                    .collect();
                let mut keys: Vec<Vec<Value>> = vec![Vec::new()];
                for dom in &domains {
                    keys = keys
                        .into_iter()
                        .flat_map(|k| {
                            dom.iter().map(move |v| {
                                let mut k = k.clone();
                                k.push(v.clone());
                                k
                            })
                        })
                        .collect();
                }
                EqBody::Table {
                    inputs: m.dependencies.clone(),
                    rows: keys.into_iter().zip(rows.iter().cloned()).collect(),
                    otherwise: None,
                }
            }
        };
        items.push(Item::Eq {
            target: m.target.clone(),
            body,
        });
    }
    if let Some(f) = allow {
        items.push(Item::Allow(f.clone()));
    }
    for (n, c) in contexts {
        items.push(Item::Context {
            name: n.clone(),
            values: c.values().iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        });
    }
    ModelDocument::new(name, items)
}
