//! Text and JSON rendering of query results.
//!
//! Every JSON report carries the same keys whatever the subcommand:
//! `command`, `verdict`, `clauses`, `witnesses`, `processes`, `causes`,
//! `trace` and `stats`. Keys that do not apply are `null` or empty.

use std::fmt::Write as _;
use std::time::Duration;

use actcause_core::formula::TraceStep;
use actcause_core::{Assignment, CauseVerdict, SearchStats, Value, VariableId, Witness};
use actcause_dsl::{Command, Outcome};
use serde_json::{json, Map, Value as Json};

pub struct Report<'a> {
    command: &'static str,
    outcome: &'a Outcome,
    wall: Duration,
    trace: Option<&'a [TraceStep]>,
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        other => json!(other.to_string()),
    }
}

fn pairs_json(pairs: &[(VariableId, Value)]) -> Json {
    Json::Object(pairs.iter().map(|(k, v)| (k.to_string(), value_json(v))).collect::<Map<_, _>>())
}

fn assignment_json(a: &Assignment) -> Json {
    Json::Object(a.values().iter().map(|(k, v)| (k.to_string(), value_json(v))).collect::<Map<_, _>>())
}

fn witness_json(w: &Witness) -> Json {
    json!({
        "z": w.z_set().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "w": w.w_set.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "x_prime": pairs_json(&w.x_prime),
        "w_prime": pairs_json(&w.w_prime),
        "z_star": pairs_json(&w.z_star),
    })
}

fn intervention_text(step: &TraceStep) -> String {
    let parts: Vec<String> = step.intervention.iter().map(|(k, v)| format!("{k}<-{v}")).collect();
    format!("[{}]", parts.join(", "))
}

fn names(vars: &[VariableId]) -> String {
    vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn flag(b: Option<bool>) -> String {
    b.map_or_else(|| "n/a".into(), |b| b.to_string())
}

impl<'a> Report<'a> {
    pub fn new(command: &Command, outcome: &'a Outcome, wall: Duration) -> Self {
        let command = match command {
            Command::Check { .. } => "check",
            Command::Causes { .. } => "causes",
            Command::Witnesses { .. } => "witnesses",
            Command::Process { .. } => "process",
            Command::Eval(_) => "eval",
            Command::Contrast { .. } => "contrast",
        };
        Report {
            command,
            outcome,
            wall,
            trace: None,
        }
    }

    pub fn with_trace(mut self, trace: &'a [TraceStep]) -> Self {
        self.trace = Some(trace);
        self
    }

    fn witnesses(&self) -> Vec<&Witness> {
        match self.outcome {
            Outcome::Witnesses { witnesses, .. } => witnesses.iter().collect(),
            other => other.verdict().and_then(|v| v.witness.as_ref()).into_iter().collect(),
        }
    }

    fn stats(&self) -> SearchStats {
        self.outcome.verdict().map(|v| v.stats).unwrap_or_default()
    }

    pub fn json(&self) -> Json {
        let verdict = self.outcome.verdict();
        let clauses = verdict.map_or(Json::Null, |v: &CauseVerdict| {
            json!({ "ac1": v.ac1, "ac2": v.ac2, "ac3": v.ac3, "ac2c": v.ac2c })
        });
        let processes: Vec<Vec<String>> = match self.outcome {
            Outcome::Processes { processes, .. } => {
                processes.iter().map(|p| p.iter().map(|v| v.to_string()).collect()).collect()
            }
            _ => Vec::new(),
        };
        let causes: Vec<String> = match self.outcome {
            Outcome::Causes(cs) => cs.iter().map(|c| c.to_string()).collect(),
            _ => Vec::new(),
        };
        let trace = self.trace.map_or(Json::Null, |steps| {
            Json::Array(
                steps
                    .iter()
                    .map(|s| {
                        json!({
                            "intervention": pairs_json(&s.intervention),
                            "solutions": s.solutions.iter().map(assignment_json).collect::<Vec<_>>(),
                        })
                    })
                    .collect(),
            )
        });
        let stats = self.stats();
        json!({
            "command": self.command,
            "verdict": self.outcome.holds(),
            "clauses": clauses,
            "witnesses": self.witnesses().into_iter().map(witness_json).collect::<Vec<_>>(),
            "processes": processes,
            "causes": causes,
            "trace": trace,
            "stats": {
                "partitions_examined": stats.partitions_examined,
                "settings_examined": stats.settings_examined,
                "wall_ms": self.wall.as_secs_f64() * 1000.0,
            },
        })
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "verdict: {}", self.outcome.holds()).unwrap();
        if let Some(v) = self.outcome.verdict() {
            writeln!(out, "AC1: {}", v.ac1).unwrap();
            writeln!(out, "AC2: {}", v.ac2).unwrap();
            if v.ac2c.is_some() {
                writeln!(out, "AC2(c): {}", flag(v.ac2c)).unwrap();
            }
            match &v.ac3_violation {
                Some(sub) => writeln!(out, "AC3: {} (smaller cause {sub})", flag(v.ac3)).unwrap(),
                None => writeln!(out, "AC3: {}", flag(v.ac3)).unwrap(),
            }
            if let Some(c) = v.contrast {
                writeln!(out, "contrast: {c}").unwrap();
            }
            if v.excluded_as_trivial {
                writeln!(out, "excluded: the cause alone entails the effect").unwrap();
            }
        }
        match self.outcome {
            Outcome::Witnesses { witnesses, .. } => {
                writeln!(out, "witnesses: {}", witnesses.len()).unwrap();
                for w in witnesses {
                    writeln!(out, "  {w}").unwrap();
                }
            }
            Outcome::Causes(cs) => {
                writeln!(out, "causes: {}", cs.len()).unwrap();
                for c in cs {
                    writeln!(out, "  {c}").unwrap();
                }
            }
            Outcome::Processes { processes, .. } => {
                if let Some(w) = self.witnesses().first() {
                    writeln!(out, "witness: {w}").unwrap();
                }
                writeln!(out, "processes: {}", processes.len()).unwrap();
                for p in processes {
                    writeln!(out, "  {{{}}}", names(p)).unwrap();
                }
            }
            Outcome::Verdict(v) => {
                if let Some(w) = &v.witness {
                    writeln!(out, "witness: {w}").unwrap();
                }
            }
            Outcome::Eval(_) => {
                for step in self.trace.unwrap_or_default() {
                    let sols: Vec<String> = step.solutions.iter().map(|a| a.to_string()).collect();
                    writeln!(out, "{}: {}", intervention_text(step), sols.join(" | ")).unwrap();
                }
            }
        }
        let stats = self.stats();
        if self.outcome.verdict().is_some() {
            writeln!(
                out,
                "stats: {} partitions, {} settings, {:.1} ms",
                stats.partitions_examined,
                stats.settings_examined,
                self.wall.as_secs_f64() * 1000.0
            )
            .unwrap();
        }
        out
    }
}
