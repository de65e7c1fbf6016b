//! Mechanisms, validated causal models and submodels.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::expr::Expr;
use crate::signature::{Signature, VariableId};
use crate::value::Value;

/// Value indices for every variable of a signature, in declaration order.
pub type World = Vec<usize>;

/// How a mechanism computes its target.
///
/// A table lists one output per input row. Rows enumerate the dependency
/// domains as an odometer: the last dependency varies fastest, each domain
/// in its declared order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    Table(Vec<Value>),
    Expr(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mechanism {
    pub target: VariableId,
    pub dependencies: Vec<VariableId>,
    pub rule: Rule,
}

impl Mechanism {
    pub fn table(target: &str, deps: &[&str], rows: Vec<Value>) -> Result<Self, ModelError> {
        Ok(Mechanism {
            target: VariableId::new(target)?,
            dependencies: ids(deps)?,
            rule: Rule::Table(rows),
        })
    }

    pub fn expr(target: &str, deps: &[&str], expr: Expr) -> Result<Self, ModelError> {
        Ok(Mechanism {
            target: VariableId::new(target)?,
            dependencies: ids(deps)?,
            rule: Rule::Expr(expr),
        })
    }

    pub fn constant(target: &str, value: Value) -> Result<Self, ModelError> {
        Self::expr(target, &[], Expr::Lit(value))
    }
}

fn ids(names: &[&str]) -> Result<Vec<VariableId>, ModelError> {
    names.iter().map(|n| VariableId::new(*n)).collect()
}

/// Exhaustive-search limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    /// Largest dependency cross-product tabulated and checked at build time.
    pub totality_bound: u128,
    /// Largest assignment space the fixed-point enumerator will walk.
    pub fixed_point_cap: u128,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            totality_bound: 1 << 20,
            fixed_point_cap: 1 << 24,
        }
    }
}

#[derive(Clone, Debug)]
struct Compiled {
    deps: Vec<usize>,
    strides: Vec<usize>,
    eval: Eval,
}

#[derive(Clone, Debug)]
enum Eval {
    Table(Vec<usize>),
    /// Too large to tabulate; evaluated on demand.
    Lazy(Expr),
}

/// A validated structural model, possibly with some endogenous variables
/// clamped by an intervention.
///
/// Clamped variables keep their slot in the signature so that worlds of a
/// model and of its submodels share one indexing; they simply have no
/// mechanism and always take their clamped value.
#[derive(Clone, Debug)]
pub struct CausalModel {
    sig: Signature,
    config: ModelConfig,
    mechanisms: Vec<Option<Mechanism>>,
    compiled: Vec<Option<Compiled>>,
    clamps: Vec<Option<usize>>,
    order: Option<Vec<usize>>,
    verified: bool,
}

impl CausalModel {
    pub fn build(sig: Signature, mechanisms: Vec<Mechanism>) -> Result<Self, ModelError> {
        Self::build_with(sig, mechanisms, ModelConfig::default())
    }

    pub fn build_with(
        sig: Signature,
        mechanisms: Vec<Mechanism>,
        config: ModelConfig,
    ) -> Result<Self, ModelError> {
        let mut slots: Vec<Option<Mechanism>> = vec![None; sig.len()];
        for m in mechanisms {
            let i = sig
                .index_of(m.target.as_str())
                .ok_or_else(|| ModelError::UnknownVariable(m.target.to_string()))?;
            if !sig.variable(i).is_endogenous() {
                return Err(ModelError::MechanismForExogenous(m.target));
            }
            if slots[i].is_some() {
                return Err(ModelError::DuplicateMechanism(m.target));
            }
            slots[i] = Some(m);
        }
        for (i, v) in sig.endogenous() {
            if slots[i].is_none() {
                return Err(ModelError::MissingMechanism(v.name.clone()));
            }
        }
        let clamps = vec![None; sig.len()];
        Self::assemble(sig, config, slots, clamps)
    }

    fn assemble(
        sig: Signature,
        config: ModelConfig,
        mechanisms: Vec<Option<Mechanism>>,
        clamps: Vec<Option<usize>>,
    ) -> Result<Self, ModelError> {
        let mut verified = true;
        let mut compiled = Vec::with_capacity(sig.len());
        for m in &mechanisms {
            compiled.push(match m {
                Some(m) => {
                    let (c, exhaustive) = compile(&sig, &config, m)?;
                    verified &= exhaustive;
                    Some(c)
                }
                None => None,
            });
        }
        let mut model = CausalModel {
            sig,
            config,
            mechanisms,
            compiled,
            clamps,
            order: None,
            verified,
        };
        model.order = model.order_with(&[]);
        Ok(model)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// True iff the dependency graph over unclamped endogenous variables is
    /// acyclic.
    pub fn is_recursive(&self) -> bool {
        self.order.is_some()
    }

    /// False if some mechanism was too large to check exhaustively and was
    /// only spot-checked.
    pub fn totality_verified(&self) -> bool {
        self.verified
    }

    /// Unclamped endogenous variables in evaluation order; ties go to the
    /// earlier declaration. `None` for cyclic models.
    pub fn topological_order(&self) -> Option<Vec<&VariableId>> {
        self.order
            .as_ref()
            .map(|o| o.iter().map(|&i| self.sig.name(i)).collect())
    }

    pub(crate) fn order_indices(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    /// Dependency edges `(from, to)`, grouped by target in declaration order.
    pub fn edges(&self) -> Vec<(&VariableId, &VariableId)> {
        let mut out = Vec::new();
        for (i, c) in self.compiled.iter().enumerate() {
            if let Some(c) = c {
                for &d in &c.deps {
                    out.push((self.sig.name(d), self.sig.name(i)));
                }
            }
        }
        out
    }

    pub fn mechanism(&self, name: &str) -> Option<&Mechanism> {
        self.sig
            .index_of(name)
            .and_then(|i| self.mechanisms[i].as_ref())
    }

    pub fn mechanisms(&self) -> impl Iterator<Item = &Mechanism> {
        self.mechanisms.iter().flatten()
    }

    /// Variables fixed by an intervention, with their values.
    pub fn clamped(&self) -> BTreeMap<VariableId, Value> {
        self.clamps
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (self.sig.name(i).clone(), self.value(i, c).clone())))
            .collect()
    }

    pub(crate) fn clamped_index(&self, i: usize) -> Option<usize> {
        self.clamps[i]
    }

    /// Endogenous variables that still have a mechanism.
    pub fn free_endogenous(&self) -> Vec<usize> {
        (0..self.sig.len())
            .filter(|&i| self.compiled[i].is_some())
            .collect()
    }

    /// Dependency indices of variable `i` (empty for exogenous and clamped).
    pub fn dependencies_of(&self, i: usize) -> &[usize] {
        self.compiled[i].as_ref().map_or(&[], |c| &c.deps)
    }

    /// Marks every variable reachable from `i` along dependency edges,
    /// excluding `i` itself unless it lies on a cycle.
    pub fn descendants(&self, i: usize) -> Vec<bool> {
        let n = self.sig.len();
        let mut children = vec![Vec::new(); n];
        for (t, c) in self.compiled.iter().enumerate() {
            if let Some(c) = c {
                for &d in &c.deps {
                    children[d].push(t);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack = children[i].clone();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(children[v].iter().copied());
            }
        }
        seen
    }

    pub(crate) fn value(&self, var: usize, idx: usize) -> &Value {
        &self.sig.domain(var).values()[idx]
    }

    /// Output index of the mechanism of `var` on `world`. Clamped variables
    /// yield their clamp and exogenous variables their world value.
    pub fn mechanism_output(&self, var: usize, world: &[usize]) -> Result<usize, ModelError> {
        let Some(c) = &self.compiled[var] else {
            return Ok(self.clamps[var].unwrap_or(world[var]));
        };
        let mut row = 0;
        for (d, s) in c.deps.iter().zip(&c.strides) {
            row += world[*d] * s;
        }
        match &c.eval {
            Eval::Table(t) => Ok(t[row]),
            Eval::Lazy(e) => {
                let input: Vec<usize> = c.deps.iter().map(|&d| world[d]).collect();
                eval_row(&self.sig, var, &c.deps, e, &input)
            }
        }
    }

    /// Evaluation order of the free variables once `extra` clamps are
    /// applied, or `None` if a cycle remains.
    pub(crate) fn order_with(&self, extra: &[Option<usize>]) -> Option<Vec<usize>> {
        let n = self.sig.len();
        let free = |i: usize| self.compiled[i].is_some() && extra.get(i).copied().flatten().is_none();
        let mut indegree = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        for i in (0..n).filter(|&i| free(i)) {
            for &d in &self.compiled[i].as_ref().unwrap().deps {
                if free(d) {
                    indegree[i] += 1;
                    children[d].push(i);
                }
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| free(i) && indegree[i] == 0).collect();
        let mut order = Vec::new();
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        let total = (0..n).filter(|&i| free(i)).count();
        (order.len() == total).then_some(order)
    }

    /// The submodel in which the given endogenous variables are fixed.
    pub fn submodel(&self, intervention: &BTreeMap<VariableId, Value>) -> Result<Self, ModelError> {
        let mut clamps = self.clamps.clone();
        let mut fixed = BTreeMap::new();
        for (name, value) in intervention {
            let i = self
                .sig
                .index_of(name.as_str())
                .filter(|&i| self.compiled[i].is_some())
                .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))?;
            let idx = self.sig.domain(i).index_of(value).ok_or_else(|| {
                ModelError::OutOfRangeValue {
                    variable: name.clone(),
                    value: value.clone(),
                }
            })?;
            clamps[i] = Some(idx);
            fixed.insert(i, idx);
        }
        let mut mechanisms = self.mechanisms.clone();
        for (i, slot) in mechanisms.iter_mut().enumerate() {
            if fixed.contains_key(&i) {
                *slot = None;
            } else if let Some(m) = slot {
                *m = self.restrict(m, &fixed);
            }
        }
        Self::assemble(self.sig.clone(), self.config, mechanisms, clamps)
    }

    /// Substitutes fixed values into a mechanism and drops them from its
    /// dependency list.
    fn restrict(&self, m: &Mechanism, fixed: &BTreeMap<usize, usize>) -> Mechanism {
        let dep_idx: Vec<usize> = m
            .dependencies
            .iter()
            .map(|d| self.sig.index_of(d.as_str()).unwrap())
            .collect();
        if !dep_idx.iter().any(|d| fixed.contains_key(d)) {
            return m.clone();
        }
        let kept: Vec<usize> = dep_idx.iter().copied().filter(|d| !fixed.contains_key(d)).collect();
        let dependencies = kept.iter().map(|&d| self.sig.name(d).clone()).collect();
        let rule = match &m.rule {
            Rule::Table(rows) => {
                let old_strides = strides(&self.sig, &dep_idx);
                let mut out = Vec::new();
                for_each_row(&self.sig, &kept, |input| {
                    let mut row = 0;
                    for (d, s) in dep_idx.iter().zip(&old_strides) {
                        let idx = match fixed.get(d) {
                            Some(&v) => v,
                            None => input[kept.iter().position(|x| x == d).unwrap()],
                        };
                        row += idx * s;
                    }
                    out.push(rows[row].clone());
                });
                Rule::Table(out)
            }
            Rule::Expr(e) => {
                let values = fixed
                    .iter()
                    .map(|(&i, &v)| (self.sig.name(i).clone(), self.value(i, v).clone()))
                    .collect();
                Rule::Expr(e.substitute(&values))
            }
        };
        Mechanism {
            target: m.target.clone(),
            dependencies,
            rule,
        }
    }
}

fn strides(sig: &Signature, deps: &[usize]) -> Vec<usize> {
    let mut out = vec![1; deps.len()];
    for k in (0..deps.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * sig.domain(deps[k + 1]).len();
    }
    out
}

/// Calls `f` on every assignment of `deps` in table-row order.
fn for_each_row(sig: &Signature, deps: &[usize], mut f: impl FnMut(&[usize])) {
    let sizes: Vec<usize> = deps.iter().map(|&d| sig.domain(d).len()).collect();
    let mut input = vec![0; deps.len()];
    loop {
        f(&input);
        let mut k = deps.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            input[k] += 1;
            if input[k] < sizes[k] {
                break;
            }
            input[k] = 0;
        }
    }
}

fn render_input(sig: &Signature, deps: &[usize], input: &[usize]) -> Vec<(VariableId, Value)> {
    deps.iter()
        .zip(input)
        .map(|(&d, &v)| (sig.name(d).clone(), sig.domain(d).values()[v].clone()))
        .collect()
}

fn eval_row(
    sig: &Signature,
    target: usize,
    deps: &[usize],
    expr: &Expr,
    input: &[usize],
) -> Result<usize, ModelError> {
    let env = |name: &VariableId| {
        deps.iter()
            .position(|&d| sig.name(d) == name)
            .map(|k| sig.domain(deps[k]).values()[input[k]].clone())
    };
    let out = expr.eval(&env).map_err(|reason| ModelError::UndefinedOutput {
        target: sig.name(target).clone(),
        input: render_input(sig, deps, input),
        reason,
    })?;
    sig.domain(target)
        .index_of(&out)
        .ok_or_else(|| ModelError::OutOfRangeOutput {
            target: sig.name(target).clone(),
            input: render_input(sig, deps, input),
            output: out,
        })
}

/// Validates a mechanism and tabulates it when small enough. The flag is
/// false when totality could only be spot-checked.
fn compile(sig: &Signature, config: &ModelConfig, m: &Mechanism) -> Result<(Compiled, bool), ModelError> {
    let target = sig.index_of(m.target.as_str()).unwrap();
    let mut deps = Vec::with_capacity(m.dependencies.len());
    for d in &m.dependencies {
        let i = sig
            .index_of(d.as_str())
            .ok_or_else(|| ModelError::UndeclaredDependency {
                target: m.target.clone(),
                dependency: d.to_string(),
            })?;
        if i == target {
            return Err(ModelError::SelfDependency(m.target.clone()));
        }
        if deps.contains(&i) {
            return Err(ModelError::DuplicateDependency {
                target: m.target.clone(),
                variable: d.clone(),
            });
        }
        deps.push(i);
    }
    let rows: u128 = deps
        .iter()
        .map(|&d| sig.domain(d).len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b));
    let strides = strides(sig, &deps);
    match &m.rule {
        Rule::Table(values) => {
            if rows != values.len() as u128 {
                return Err(ModelError::TableSize {
                    target: m.target.clone(),
                    expected: usize::try_from(rows).unwrap_or(usize::MAX),
                    found: values.len(),
                });
            }
            let mut table = Vec::with_capacity(values.len());
            let mut err = None;
            for_each_row(sig, &deps, |input| {
                if err.is_some() {
                    return;
                }
                let v = &values[table.len()];
                match sig.domain(target).index_of(v) {
                    Some(i) => table.push(i),
                    None => {
                        err = Some(ModelError::OutOfRangeOutput {
                            target: m.target.clone(),
                            input: render_input(sig, &deps, input),
                            output: v.clone(),
                        })
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok((
                    Compiled {
                        deps,
                        strides,
                        eval: Eval::Table(table),
                    },
                    true,
                )),
            }
        }
        Rule::Expr(expr) => {
            for v in expr.variables() {
                if !m.dependencies.contains(v) {
                    return Err(if sig.index_of(v.as_str()).is_some() {
                        ModelError::UnlistedDependency {
                            target: m.target.clone(),
                            variable: v.to_string(),
                        }
                    } else {
                        ModelError::UndeclaredDependency {
                            target: m.target.clone(),
                            dependency: v.to_string(),
                        }
                    });
                }
            }
            if rows <= config.totality_bound {
                let mut table = Vec::with_capacity(rows as usize);
                let mut err = None;
                for_each_row(sig, &deps, |input| {
                    if err.is_none() {
                        match eval_row(sig, target, &deps, expr, input) {
                            Ok(i) => table.push(i),
                            Err(e) => err = Some(e),
                        }
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                Ok((
                    Compiled {
                        deps,
                        strides,
                        eval: Eval::Table(table),
                    },
                    true,
                ))
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                for _ in 0..1024 {
                    let input: Vec<usize> = deps
                        .iter()
                        .map(|&d| rng.gen_range(0..sig.domain(d).len()))
                        .collect();
                    eval_row(sig, target, &deps, expr, &input)?;
                }
                Ok((
                    Compiled {
                        deps,
                        strides,
                        eval: Eval::Lazy(expr.clone()),
                    },
                    false,
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinOp;
    use crate::signature::Variable;
    use crate::value::Domain;

    fn forest_fire() -> CausalModel {
        let b = Domain::binary;
        let sig = Signature::new(vec![
            Variable::exogenous("U", Domain::range(0, 3).unwrap()).unwrap(),
            Variable::endogenous("L", b()).unwrap(),
            Variable::endogenous("ML", b()).unwrap(),
            Variable::endogenous("F", b()).unwrap(),
        ])
        .unwrap();
        let l = VariableId::new("L").unwrap();
        let ml = VariableId::new("ML").unwrap();
        let u = VariableId::new("U").unwrap();
        let bit = |k: i64| {
            Expr::bin(
                BinOp::Or,
                Expr::bin(BinOp::Eq, Expr::var(&u), Expr::int(k)),
                Expr::bin(BinOp::Eq, Expr::var(&u), Expr::int(3)),
            )
        };
        CausalModel::build(
            sig,
            vec![
                Mechanism::expr("F", &["L", "ML"], Expr::bin(BinOp::Or, Expr::var(&l), Expr::var(&ml)))
                    .unwrap(),
                Mechanism::expr("L", &["U"], bit(1)).unwrap(),
                Mechanism::expr("ML", &["U"], bit(2)).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn builds_graph_and_order() {
        let m = forest_fire();
        assert!(m.is_recursive());
        let edges: Vec<(String, String)> = m
            .edges()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert!(edges.contains(&("L".into(), "F".into())));
        assert!(edges.contains(&("ML".into(), "F".into())));
        let order: Vec<&str> = m.topological_order().unwrap().into_iter().map(|v| v.as_str()).collect();
        assert_eq!(order, ["L", "ML", "F"]);
        assert!(m.totality_verified());
    }

    #[test]
    fn submodel_substitutes_clamp() {
        let m = forest_fire();
        let l = VariableId::new("L").unwrap();
        let sub = m.submodel(&BTreeMap::from([(l, Value::Int(0))])).unwrap();
        let f = sub.mechanism("F").unwrap();
        assert_eq!(f.dependencies, vec![VariableId::new("ML").unwrap()]);
        assert!(sub.mechanism("L").is_none());
        let fi = sub.signature().index_of("F").unwrap();
        let ml = sub.signature().index_of("ML").unwrap();
        for v in 0..2 {
            let mut w = vec![0; 4];
            w[ml] = v;
            assert_eq!(sub.mechanism_output(fi, &w).unwrap(), v);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        let sig = Signature::new(vec![
            Variable::endogenous("A", Domain::binary()).unwrap(),
            Variable::endogenous("B", Domain::binary()).unwrap(),
        ])
        .unwrap();
        let a = Mechanism::constant("A", Value::Int(1)).unwrap();
        let short = Mechanism::table("B", &["A"], vec![Value::Int(0)]).unwrap();
        assert!(matches!(
            CausalModel::build(sig.clone(), vec![a.clone(), short]),
            Err(ModelError::TableSize { expected: 2, found: 1, .. })
        ));
        let wide = Mechanism::table("B", &["A"], vec![Value::Int(0), Value::Int(2)]).unwrap();
        assert!(matches!(
            CausalModel::build(sig.clone(), vec![a.clone(), wide]),
            Err(ModelError::OutOfRangeOutput { .. })
        ));
        assert!(matches!(
            CausalModel::build(sig.clone(), vec![a.clone()]),
            Err(ModelError::MissingMechanism(_))
        ));
        assert!(matches!(
            CausalModel::build(sig, vec![a.clone(), a]),
            Err(ModelError::DuplicateMechanism(_))
        ));
    }

    #[test]
    fn detects_cycles() {
        let sig = Signature::new(vec![
            Variable::endogenous("X", Domain::binary()).unwrap(),
            Variable::endogenous("Y", Domain::binary()).unwrap(),
        ])
        .unwrap();
        let x = VariableId::new("X").unwrap();
        let y = VariableId::new("Y").unwrap();
        let m = CausalModel::build(
            sig,
            vec![
                Mechanism::expr("X", &["Y"], Expr::var(&y)).unwrap(),
                Mechanism::expr("Y", &["X"], Expr::var(&x)).unwrap(),
            ],
        )
        .unwrap();
        assert!(!m.is_recursive());
        let sub = m.submodel(&BTreeMap::from([(x, Value::Int(1))])).unwrap();
        assert!(sub.is_recursive());
    }

    #[test]
    fn unlisted_dependency_is_rejected() {
        let sig = Signature::new(vec![
            Variable::endogenous("A", Domain::binary()).unwrap(),
            Variable::endogenous("B", Domain::binary()).unwrap(),
        ])
        .unwrap();
        let a = VariableId::new("A").unwrap();
        let r = CausalModel::build(
            sig,
            vec![
                Mechanism::constant("A", Value::Int(1)).unwrap(),
                Mechanism::expr("B", &[], Expr::var(&a)).unwrap(),
            ],
        );
        assert!(matches!(r, Err(ModelError::UnlistedDependency { .. })));
    }
}
