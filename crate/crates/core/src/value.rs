//! Symbolic values and finite variable domains.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// A single value a variable may take: an integer literal or a bare symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl Value {
    pub fn sym(s: impl Into<String>) -> Self {
        Value::Sym(s.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Sym(_) => None,
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Value::Int(_))
    }

    /// True for the integers 0 and 1.
    pub fn is_bit(&self) -> bool {
        matches!(self, Value::Int(0) | Value::Int(1))
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    /// Parses integer literals as `Int`, anything else as a symbol.
    fn from(s: &str) -> Self {
        match s.parse::<i64>() {
            Ok(i) => Value::Int(i),
            Err(_) => Value::Sym(s.to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

/// Ordered, duplicate-free, nonempty list of values. The order is the
/// canonical enumeration order used everywhere a domain is walked.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    values: Vec<Value>,
}

impl Domain {
    pub fn new(values: Vec<Value>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(ModelError::DuplicateDomainValue(v.clone()));
            }
        }
        Ok(Domain { values })
    }

    /// The domain `{0, 1}`.
    pub fn binary() -> Self {
        Domain {
            values: vec![Value::Int(0), Value::Int(1)],
        }
    }

    /// The integer range `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> Result<Self, ModelError> {
        Domain::new((lo..=hi).map(Value::Int).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn get(&self, index: usize) -> Option<&Value> {
        self.values.get(index)
    }

    pub fn index_of(&self, value: &Value) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }

    pub fn contains(&self, value: &Value) -> bool {
        self.index_of(value).is_some()
    }

    /// All values are integers.
    pub fn is_integer(&self) -> bool {
        self.values.iter().all(Value::is_int)
    }

    /// All values are 0 or 1.
    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(Value::is_bit)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicates() {
        assert!(matches!(Domain::new(vec![]), Err(ModelError::EmptyDomain)));
        assert!(matches!(
            Domain::new(vec![Value::Int(1), Value::Int(1)]),
            Err(ModelError::DuplicateDomainValue(Value::Int(1)))
        ));
    }

    #[test]
    fn symbols_and_ints_are_distinct() {
        let d = Domain::new(vec![Value::Int(1), Value::sym("1x")]).unwrap();
        assert_eq!(d.index_of(&Value::from("1")), Some(0));
        assert_eq!(d.index_of(&Value::from("1x")), Some(1));
        assert!(!d.is_integer());
    }

    #[test]
    fn boolean_detection() {
        assert!(Domain::binary().is_boolean());
        assert!(!Domain::range(0, 2).unwrap().is_boolean());
        assert!(Domain::range(-1, 1).unwrap().is_integer());
    }
}
