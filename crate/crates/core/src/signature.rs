//! Variables, their kinds and ranges.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::value::Domain;

/// Validated variable name: a letter followed by letters, digits or `_`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(VariableId(name))
        } else {
            Err(ModelError::InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Lexical rule shared by variables and symbolic values.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TryFrom<String> for VariableId {
    type Error = ModelError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        VariableId::new(s)
    }
}

impl From<VariableId> for String {
    fn from(v: VariableId) -> String {
        v.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for VariableId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: VariableId,
    pub kind: VarKind,
    pub domain: Domain,
}

impl Variable {
    pub fn exogenous(name: &str, domain: Domain) -> Result<Self, ModelError> {
        Ok(Variable {
            name: VariableId::new(name)?,
            kind: VarKind::Exogenous,
            domain,
        })
    }

    pub fn endogenous(name: &str, domain: Domain) -> Result<Self, ModelError> {
        Ok(Variable {
            name: VariableId::new(name)?,
            kind: VarKind::Endogenous,
            domain,
        })
    }

    pub fn is_endogenous(&self) -> bool {
        self.kind == VarKind::Endogenous
    }
}

/// Exogenous and endogenous variables together with their ranges.
///
/// Variables keep their declaration order; that order is the tie-breaker
/// for topological sorting and for every canonical enumeration downstream.
/// Internally a variable is addressed by its position in this order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new(vars: Vec<Variable>) -> Result<Self, ModelError> {
        let sig = Self::new_allow_empty(vars)?;
        if sig.endogenous().next().is_none() {
            return Err(ModelError::NoEndogenous);
        }
        Ok(sig)
    }

    /// Like [`Signature::new`] but allows an empty endogenous set, which
    /// only arises for fully intervened submodels.
    pub(crate) fn new_allow_empty(vars: Vec<Variable>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.name.as_str().to_string(), i).is_some() {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(Signature { vars, index })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, index: usize) -> &Variable {
        &self.vars[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Option<&Variable> {
        self.index_of(name).map(|i| &self.vars[i])
    }

    pub fn domain(&self, index: usize) -> &Domain {
        &self.vars[index].domain
    }

    pub fn name(&self, index: usize) -> &VariableId {
        &self.vars[index].name
    }

    pub fn exogenous(&self) -> impl Iterator<Item = (usize, &Variable)> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Exogenous)
    }

    pub fn endogenous(&self) -> impl Iterator<Item = (usize, &Variable)> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Endogenous)
    }

    /// Indices of endogenous variables in declaration order.
    pub fn endogenous_indices(&self) -> Vec<usize> {
        self.endogenous().map(|(i, _)| i).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_rules() {
        assert!(is_identifier("ML1"));
        assert!(is_identifier("BS_1"));
        assert!(!is_identifier("1ML"));
        assert!(!is_identifier("_x"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a-b"));
    }

    #[test]
    fn rejects_duplicates_and_empty_endogenous() {
        let u = Variable::exogenous("U", Domain::binary()).unwrap();
        assert!(matches!(
            Signature::new(vec![u.clone()]),
            Err(ModelError::NoEndogenous)
        ));
        let x = Variable::endogenous("U", Domain::binary()).unwrap();
        assert!(matches!(
            Signature::new(vec![u, x]),
            Err(ModelError::DuplicateVariable(_))
        ));
    }
}
