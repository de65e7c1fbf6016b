//! Worked example models and their expected verdicts.
//!
//! Each example is a `.hpc` model file under `data/`. Expected verdicts
//! live in `data/golden.tsv` with columns `key`, `query`, `expected` and
//! `citation`. The query column uses the query language of
//! [`actcause_dsl`].

use actcause_core::Context;
use actcause_dsl::{load_model, parse_query, run_query, DslError, LoadedModel, ModelDocument, QueryDocument, RunError};

macro_rules! fixtures {
    ($($key:literal),* $(,)?) => {
        const FIXTURES: &[(&str, &str)] = &[
            $(($key, include_str!(concat!("../data/", $key, ".hpc")))),*
        ];
    };
}

fixtures!(
    "forest_fire",
    "arson_disjunctive",
    "arson_conjunctive",
    "arson_three_valued",
    "april_showers",
    "rock_coarse",
    "rock_three_valued",
    "rock_refined",
    "rock_time_indexed",
    "doctor",
    "double_prevention",
    "double_prevention_hillary",
    "noise_bottle",
    "loanshark",
    "loanshark_lender",
    "plant_putin",
    "track_switch_one_var",
    "track_switch_two_var",
    "merlin_coarse",
    "merlin_refined",
    "sergeant_simple",
    "sergeant_refined",
    "fielder_wall",
    "fielder_wall_exogenous",
    "fielder_wall_hit",
    "voting_machine",
    "prisoner",
);

const GOLDEN: &str = include_str!("../data/golden.tsv");

/// Context used when a query names none.
pub const DEFAULT_CONTEXT: &str = "actual";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("no example named `{0}`")]
    UnknownExample(String),
    #[error("fixture `{key}`: {source}")]
    Fixture { key: String, source: DslError },
    #[error("golden table line {line}: {message}")]
    Golden { line: usize, message: String },
    #[error("query `{query}`: {source}")]
    Query { query: String, source: RunError },
}

/// One expected verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenRow {
    pub query: String,
    pub expected: bool,
    /// Which worked example and claim the row reproduces.
    pub citation: String,
}

/// A fixture with its golden rows.
#[derive(Clone, Debug)]
pub struct ExampleCase {
    pub key: &'static str,
    pub source: &'static str,
    pub model: LoadedModel,
    pub context: Context,
    pub rows: Vec<GoldenRow>,
}

impl ExampleCase {
    pub fn document(&self) -> &ModelDocument {
        &self.model.document
    }

    /// Parses a query against this model, defaulting to the example's
    /// context.
    pub fn parse(&self, query: &str) -> Result<QueryDocument, CorpusError> {
        let mut q = parse_query(query, &self.model).map_err(|source| CorpusError::Query {
            query: query.to_string(),
            source: source.into(),
        })?;
        if q.context.is_none() && self.model.contexts.len() > 1 {
            q.context = Some(actcause_dsl::ContextRef::Named(DEFAULT_CONTEXT.into()));
        }
        Ok(q)
    }

    /// Runs a query and returns its yes/no answer.
    pub fn evaluate(&self, query: &str) -> Result<bool, CorpusError> {
        let q = self.parse(query)?;
        run_query(&self.model, &q)
            .map(|o| o.holds())
            .map_err(|source| CorpusError::Query {
                query: query.to_string(),
                source,
            })
    }
}

/// Every registered key, in registry order.
pub fn registry() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(k, _)| *k)
}

/// The `.hpc` text of an example.
pub fn fixture_source(key: &str) -> Result<&'static str, CorpusError> {
    FIXTURES
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, s)| *s)
        .ok_or_else(|| CorpusError::UnknownExample(key.to_string()))
}

pub fn load_example(key: &str) -> Result<ExampleCase, CorpusError> {
    let (key, source) = FIXTURES
        .iter()
        .find(|(k, _)| *k == key)
        .copied()
        .ok_or_else(|| CorpusError::UnknownExample(key.to_string()))?;
    let model = load_model(source).map_err(|source| CorpusError::Fixture {
        key: key.to_string(),
        source,
    })?;
    let context = model
        .context(DEFAULT_CONTEXT)
        .or_else(|| model.contexts.first().map(|(_, c)| c))
        .cloned()
        .ok_or_else(|| CorpusError::Fixture {
            key: key.to_string(),
            source: DslError::Invalid {
                pos: Default::default(),
                message: "the fixture defines no context".into(),
            },
        })?;
    Ok(ExampleCase {
        key,
        source,
        model,
        context,
        rows: expected_verdicts(key)?,
    })
}

pub fn expected_verdicts(key: &str) -> Result<Vec<GoldenRow>, CorpusError> {
    if !registry().any(|k| k == key) {
        return Err(CorpusError::UnknownExample(key.to_string()));
    }
    Ok(golden()?.into_iter().filter(|(k, _)| k == key).map(|(_, r)| r).collect())
}

/// All golden rows with their keys, in file order.
pub fn golden() -> Result<Vec<(String, GoldenRow)>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in GOLDEN.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| CorpusError::Golden { line: i + 1, message };
        let cols: Vec<&str> = line.split('\t').collect();
        let [key, query, expected, citation] = cols.as_slice() else {
            return Err(err(format!("expected 4 columns, found {}", cols.len())));
        };
        let expected = match *expected {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("expected `true` or `false`, found `{other}`"))),
        };
        if citation.trim().is_empty() {
            return Err(err("missing citation".into()));
        }
        out.push((
            key.to_string(),
            GoldenRow {
                query: query.to_string(),
                expected,
                citation: citation.to_string(),
            },
        ));
    }
    Ok(out)
}
