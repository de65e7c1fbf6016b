//! Contexts, assignments and solving.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{CausalModel, World};
use crate::signature::VariableId;
use crate::value::Value;

/// Values for the exogenous variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    values: BTreeMap<VariableId, Value>,
}

impl Context {
    pub fn new(values: BTreeMap<VariableId, Value>) -> Self {
        Context { values }
    }

    pub fn from_pairs<V: Into<Value>>(
        pairs: impl IntoIterator<Item = (&'static str, V)>,
    ) -> Result<Self, ModelError> {
        let mut values = BTreeMap::new();
        for (k, v) in pairs {
            values.insert(VariableId::new(k)?, v.into());
        }
        Ok(Context { values })
    }

    pub fn values(&self) -> &BTreeMap<VariableId, Value> {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| k.as_str() == name).map(|(_, v)| v)
    }
}

/// Values for some or all endogenous variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    values: BTreeMap<VariableId, Value>,
}

impl Assignment {
    pub fn new(values: BTreeMap<VariableId, Value>) -> Self {
        Assignment { values }
    }

    pub fn from_pairs<V: Into<Value>>(
        pairs: impl IntoIterator<Item = (&'static str, V)>,
    ) -> Result<Self, ModelError> {
        let mut values = BTreeMap::new();
        for (k, v) in pairs {
            values.insert(VariableId::new(k)?, v.into());
        }
        Ok(Assignment { values })
    }

    pub fn values(&self) -> &BTreeMap<VariableId, Value> {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| k.as_str() == name).map(|(_, v)| v)
    }

    pub fn insert(&mut self, name: VariableId, value: Value) {
        self.values.insert(name, value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Covers every endogenous variable of the model.
    pub fn is_total(&self, model: &CausalModel) -> bool {
        model
            .signature()
            .endogenous()
            .all(|(_, v)| self.values.contains_key(&v.name))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

impl CausalModel {
    /// A world holding the context's exogenous values; endogenous slots are
    /// zero until solved.
    pub fn context_world(&self, ctx: &Context) -> Result<World, ModelError> {
        let sig = self.signature();
        let mut world = vec![0; sig.len()];
        for (name, value) in ctx.values() {
            let i = sig
                .index_of(name.as_str())
                .filter(|&i| !sig.variable(i).is_endogenous())
                .ok_or_else(|| ModelError::NotExogenous(name.to_string()))?;
            world[i] = sig.domain(i).index_of(value).ok_or_else(|| {
                ModelError::OutOfRangeValue {
                    variable: name.clone(),
                    value: value.clone(),
                }
            })?;
        }
        for (_, v) in sig.exogenous() {
            if !ctx.values().contains_key(&v.name) {
                return Err(ModelError::IncompleteContext(v.name.clone()));
            }
        }
        Ok(world)
    }

    /// Overwrites the endogenous slots of `world` with the given values.
    pub fn world_with(&self, base: &[usize], assignment: &Assignment) -> Result<World, ModelError> {
        let sig = self.signature();
        let mut world = base.to_vec();
        for (name, value) in assignment.values() {
            let i = sig
                .index_of(name.as_str())
                .filter(|&i| sig.variable(i).is_endogenous())
                .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))?;
            world[i] = sig.domain(i).index_of(value).ok_or_else(|| {
                ModelError::OutOfRangeValue {
                    variable: name.clone(),
                    value: value.clone(),
                }
            })?;
        }
        Ok(world)
    }

    /// The endogenous part of a world.
    pub fn assignment_of(&self, world: &[usize]) -> Assignment {
        let sig = self.signature();
        Assignment::new(
            sig.endogenous()
                .map(|(i, v)| (v.name.clone(), self.value(i, world[i]).clone()))
                .collect(),
        )
    }

    /// Solves in place along the evaluation order. `extra` clamps further
    /// variables (indexed like the world; missing entries mean unclamped).
    pub fn solve_into(&self, world: &mut [usize], extra: &[Option<usize>]) -> Result<(), ModelError> {
        for i in 0..world.len() {
            if let Some(c) = extra.get(i).copied().flatten() {
                world[i] = c;
            } else if let Some(v) = self.clamped_index(i) {
                world[i] = v;
            }
        }
        let computed;
        let order: &[usize] = match self.order_indices() {
            Some(o) => o,
            None => {
                computed = self.order_with(extra).ok_or(ModelError::NotRecursive)?;
                &computed
            }
        };
        for &i in order {
            if extra.get(i).copied().flatten().is_none() {
                world[i] = self.mechanism_output(i, world)?;
            }
        }
        Ok(())
    }

    pub fn solve_world(&self, base: &[usize], extra: &[Option<usize>]) -> Result<World, ModelError> {
        let mut w = base.to_vec();
        self.solve_into(&mut w, extra)?;
        Ok(w)
    }

    /// The unique solution of a recursive model.
    pub fn solve(&self, ctx: &Context) -> Result<Assignment, ModelError> {
        if !self.is_recursive() {
            return Err(ModelError::NotRecursive);
        }
        let w = self.solve_world(&self.context_world(ctx)?, &[])?;
        Ok(self.assignment_of(&w))
    }

    /// Every world extending `base` in which all unclamped mechanisms hold,
    /// found by enumerating the unclamped endogenous variables. Recursive
    /// systems too large to enumerate fall back to the unique solution.
    pub fn fixed_points_world(
        &self,
        base: &[usize],
        extra: &[Option<usize>],
    ) -> Result<Vec<World>, ModelError> {
        let sig = self.signature();
        let free: Vec<usize> = self
            .free_endogenous()
            .into_iter()
            .filter(|&i| extra.get(i).copied().flatten().is_none())
            .collect();
        let size = free
            .iter()
            .map(|&i| sig.domain(i).len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b));
        if size > self.config().fixed_point_cap {
            if self.order_with(extra).is_some() {
                return Ok(vec![self.solve_world(base, extra)?]);
            }
            return Err(ModelError::SearchSpaceTooLarge {
                size,
                cap: self.config().fixed_point_cap,
            });
        }
        let mut world = base.to_vec();
        for i in 0..world.len() {
            if let Some(c) = extra.get(i).copied().flatten() {
                world[i] = c;
            } else if let Some(v) = self.clamped_index(i) {
                world[i] = v;
            }
        }
        for &i in &free {
            world[i] = 0;
        }
        let mut out = Vec::new();
        loop {
            let mut ok = true;
            for &i in &free {
                if self.mechanism_output(i, &world)? != world[i] {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(world.clone());
            }
            let mut k = free.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                let i = free[k];
                world[i] += 1;
                if world[i] < sig.domain(i).len() {
                    break;
                }
                world[i] = 0;
            }
        }
    }

    /// All solutions in the context, in enumeration order.
    pub fn solve_all(&self, ctx: &Context) -> Result<Vec<Assignment>, ModelError> {
        let base = self.context_world(ctx)?;
        Ok(self
            .fixed_points_world(&base, &[])?
            .iter()
            .map(|w| self.assignment_of(w))
            .collect())
    }

    /// True iff every mechanism reproduces the value assigned to its target.
    pub fn check_fixed_point(&self, ctx: &Context, assignment: &Assignment) -> Result<bool, ModelError> {
        let world = self.world_with(&self.context_world(ctx)?, assignment)?;
        for (i, _) in self.signature().endogenous() {
            if !assignment.values().contains_key(self.signature().name(i)) {
                return Err(ModelError::UnknownVariable(self.signature().name(i).to_string()));
            }
            if self.mechanism_output(i, &world)? != world[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp, Expr};
    use crate::model::Mechanism;
    use crate::signature::{Signature, Variable};
    use crate::value::Domain;

    fn pair(neg: bool) -> CausalModel {
        let sig = Signature::new(vec![
            Variable::exogenous("U", Domain::binary()).unwrap(),
            Variable::endogenous("X", Domain::binary()).unwrap(),
            Variable::endogenous("Y", Domain::binary()).unwrap(),
        ])
        .unwrap();
        let x = VariableId::new("X").unwrap();
        let y = VariableId::new("Y").unwrap();
        let wrap = |e: Expr| if neg { Expr::not(e) } else { e };
        CausalModel::build(
            sig,
            vec![
                Mechanism::expr("X", &["Y"], wrap(Expr::var(&y))).unwrap(),
                Mechanism::expr("Y", &["X"], wrap(Expr::var(&x))).unwrap(),
            ],
        )
        .unwrap()
    }

    fn ctx() -> Context {
        Context::from_pairs([("U", 0)]).unwrap()
    }

    #[test]
    fn copying_pair_has_two_fixed_points() {
        let m = pair(false);
        assert!(matches!(m.solve(&ctx()), Err(ModelError::NotRecursive)));
        let all = m.solve_all(&ctx()).unwrap();
        assert_eq!(
            all,
            vec![
                Assignment::from_pairs([("X", 0), ("Y", 0)]).unwrap(),
                Assignment::from_pairs([("X", 1), ("Y", 1)]).unwrap(),
            ]
        );
    }

    #[test]
    fn negating_pair_has_two_fixed_points() {
        let all = pair(true).solve_all(&ctx()).unwrap();
        assert_eq!(
            all,
            vec![
                Assignment::from_pairs([("X", 0), ("Y", 1)]).unwrap(),
                Assignment::from_pairs([("X", 1), ("Y", 0)]).unwrap(),
            ]
        );
    }

    #[test]
    fn fully_clamped_model_returns_clamp() {
        let m = pair(false);
        let clamp = Assignment::from_pairs([("X", 1), ("Y", 0)]).unwrap();
        let sub = m.submodel(clamp.values()).unwrap();
        assert!(sub.mechanisms().next().is_none());
        assert_eq!(sub.solve(&ctx()).unwrap(), clamp);
        assert_eq!(sub.solve_all(&ctx()).unwrap(), vec![clamp.clone()]);
        assert!(sub.check_fixed_point(&ctx(), &clamp).unwrap());
    }

    #[test]
    fn context_validation() {
        let m = pair(false);
        assert!(matches!(
            m.context_world(&Context::default()),
            Err(ModelError::IncompleteContext(_))
        ));
        assert!(matches!(
            m.context_world(&Context::from_pairs([("U", 0), ("X", 1)]).unwrap()),
            Err(ModelError::NotExogenous(_))
        ));
        assert!(matches!(
            m.context_world(&Context::from_pairs([("U", 3)]).unwrap()),
            Err(ModelError::OutOfRangeValue { .. })
        ));
    }

    #[test]
    fn cap_is_enforced_for_cyclic_models() {
        let sig = Signature::new(vec![
            Variable::endogenous("X", Domain::binary()).unwrap(),
            Variable::endogenous("Y", Domain::binary()).unwrap(),
        ])
        .unwrap();
        let x = VariableId::new("X").unwrap();
        let y = VariableId::new("Y").unwrap();
        let m = CausalModel::build_with(
            sig,
            vec![
                Mechanism::expr("X", &["Y"], Expr::var(&y)).unwrap(),
                Mechanism::expr("Y", &["X"], Expr::bin(BinOp::And, Expr::var(&x), Expr::int(1))).unwrap(),
            ],
            crate::model::ModelConfig {
                fixed_point_cap: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            m.solve_all(&Context::default()),
            Err(ModelError::SearchSpaceTooLarge { size: 4, cap: 2 })
        ));
    }
}
