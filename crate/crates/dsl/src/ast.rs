//! Syntax trees for model files and queries.

use actcause_core::{
    CausalFormula, DefinitionVariant, EventFormula, Expr, PrimitiveEvent, Value, VarKind,
    VariableId,
};

use crate::lexer::Pos;

/// Right-hand side of an `eq` item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqBody {
    Expr(Expr),
    /// `case (A, B) { (0, 1) => 1; ...; else => 0 }`. Rows need not be
    /// exhaustive when an `else` value is given.
    Table {
        inputs: Vec<VariableId>,
        rows: Vec<(Vec<Value>, Value)>,
        otherwise: Option<Value>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Var {
        kind: VarKind,
        name: VariableId,
        domain: Vec<Value>,
    },
    Eq {
        target: VariableId,
        body: EqBody,
    },
    Allow(EventFormula),
    Context {
        name: String,
        values: Vec<(VariableId, Value)>,
    },
}

/// A parsed `.hpc` file. Equality ignores source positions.
#[derive(Clone, Debug)]
pub struct ModelDocument {
    pub name: String,
    pub items: Vec<Item>,
    /// Start of each item, parallel to `items`; empty for documents built
    /// in code.
    pub positions: Vec<Pos>,
}

impl PartialEq for ModelDocument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.items == other.items
    }
}

impl Eq for ModelDocument {}

impl ModelDocument {
    pub fn new(name: impl Into<String>, items: Vec<Item>) -> Self {
        ModelDocument {
            name: name.into(),
            items,
            positions: Vec::new(),
        }
    }

    pub(crate) fn pos(&self, item: usize) -> Pos {
        self.positions.get(item).copied().unwrap_or_default()
    }

    pub fn variables(&self) -> impl Iterator<Item = (VarKind, &VariableId, &[Value])> {
        self.items.iter().filter_map(|i| match i {
            Item::Var { kind, name, domain } => Some((*kind, name, domain.as_slice())),
            _ => None,
        })
    }

    pub fn contexts(&self) -> impl Iterator<Item = (&str, &[(VariableId, Value)])> {
        self.items.iter().filter_map(|i| match i {
            Item::Context { name, values } => Some((name.as_str(), values.as_slice())),
            _ => None,
        })
    }

    pub fn allow_clauses(&self) -> impl Iterator<Item = &EventFormula> {
        self.items.iter().filter_map(|i| match i {
            Item::Allow(f) => Some(f),
            _ => None,
        })
    }
}

/// Which context a query runs in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContextRef {
    Named(String),
    Inline(Vec<(VariableId, Value)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContrastSpec {
    /// `instead of psi`: the effect as opposed to `psi`.
    InsteadOf(EventFormula),
    /// `rather than v`: the cause value rather than `v`. `weak` selects the
    /// reading that only requires some witness to survive the swap.
    RatherThan { value: Value, weak: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Check {
        cause: Vec<PrimitiveEvent>,
        effect: EventFormula,
    },
    Causes {
        effect: EventFormula,
    },
    Witnesses {
        cause: Vec<PrimitiveEvent>,
        effect: EventFormula,
    },
    Process {
        cause: Vec<PrimitiveEvent>,
        effect: EventFormula,
    },
    Eval(CausalFormula),
    Contrast {
        cause: Vec<PrimitiveEvent>,
        effect: EventFormula,
        contrast: ContrastSpec,
    },
}

/// A parsed and type-checked query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryDocument {
    pub model: Option<String>,
    pub command: Command,
    pub context: Option<ContextRef>,
    pub variant: DefinitionVariant,
    pub extended: bool,
    pub exclude_self: bool,
    pub max_conjuncts: Option<usize>,
}
