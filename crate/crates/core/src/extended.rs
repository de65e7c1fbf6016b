//! Models restricted to a set of allowable endogenous settings.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{FormulaError, ModelError};
use crate::formula::{EventFormula, IndexedEvent};
use crate::model::CausalModel;
use crate::solve::Assignment;

/// The allowable settings, either listed or described by a constraint that
/// a total setting must satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Allowable {
    Explicit(Vec<Assignment>),
    Constraint(EventFormula),
}

#[derive(Clone, Debug)]
enum Resolved {
    Explicit(HashSet<Vec<usize>>),
    Constraint(IndexedEvent),
}

#[derive(Clone, Debug)]
pub struct ExtendedCausalModel {
    base: CausalModel,
    allowable: Allowable,
    resolved: Resolved,
}

impl ExtendedCausalModel {
    pub fn new(base: CausalModel, allowable: Allowable) -> Result<Self, FormulaError> {
        let sig = base.signature();
        let resolved = match &allowable {
            Allowable::Constraint(phi) => Resolved::Constraint(phi.resolve(sig)?),
            Allowable::Explicit(members) => {
                let mut set = HashSet::new();
                for m in members {
                    if let Some((_, v)) = sig.endogenous().find(|(_, v)| m.get(v.name.as_str()).is_none()) {
                        return Err(FormulaError::UnknownVariable(v.name.to_string()));
                    }
                    let world = base.world_with(&vec![0; sig.len()], m)?;
                    set.insert(endogenous_key(&base, &world));
                }
                Resolved::Explicit(set)
            }
        };
        Ok(ExtendedCausalModel {
            base,
            allowable,
            resolved,
        })
    }

    /// Every setting is allowable; behaves exactly like the plain model.
    pub fn all_settings(base: CausalModel) -> Self {
        Self::new(base, Allowable::Constraint(EventFormula::True)).expect("constant constraint")
    }

    pub fn base(&self) -> &CausalModel {
        &self.base
    }

    pub fn allowable(&self) -> &Allowable {
        &self.allowable
    }

    /// Whether the endogenous part of a world is allowable.
    pub fn allows_world(&self, world: &[usize]) -> bool {
        match &self.resolved {
            Resolved::Constraint(phi) => phi.holds(world),
            Resolved::Explicit(set) => set.contains(&endogenous_key(&self.base, world)),
        }
    }

    /// Whether a total setting is allowable.
    pub fn is_allowable(&self, setting: &Assignment) -> Result<bool, FormulaError> {
        let sig = self.base.signature();
        if let Some((_, v)) = sig.endogenous().find(|(_, v)| setting.get(v.name.as_str()).is_none()) {
            return Err(FormulaError::UnknownVariable(v.name.to_string()));
        }
        let world = self.base.world_with(&vec![0; sig.len()], setting)?;
        Ok(self.allows_world(&world))
    }

    /// Whether a partial setting extends to an allowable total one.
    pub fn extends_to_allowable(&self, partial: &Assignment) -> Result<bool, FormulaError> {
        let sig = self.base.signature();
        let mut world = self.base.world_with(&vec![0; sig.len()], partial)?;
        let open: Vec<usize> = sig
            .endogenous()
            .filter(|(_, v)| partial.get(v.name.as_str()).is_none())
            .map(|(i, _)| i)
            .collect();
        let size = open
            .iter()
            .map(|&i| sig.domain(i).len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b));
        let cap = self.base.config().fixed_point_cap;
        if size > cap {
            return Err(ModelError::SearchSpaceTooLarge { size, cap }.into());
        }
        loop {
            if self.allows_world(&world) {
                return Ok(true);
            }
            let mut k = open.len();
            loop {
                if k == 0 {
                    return Ok(false);
                }
                k -= 1;
                let i = open[k];
                world[i] += 1;
                if world[i] < sig.domain(i).len() {
                    break;
                }
                world[i] = 0;
            }
        }
    }
}

fn endogenous_key(model: &CausalModel, world: &[usize]) -> Vec<usize> {
    model.signature().endogenous().map(|(i, _)| world[i]).collect()
}
