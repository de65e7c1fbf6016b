//! Seeded random binary models for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{CausalModel, Mechanism, Rule};
use crate::search_space::odometer;
use crate::signature::{Signature, Variable, VariableId};
use crate::solve::Context;
use crate::value::{Domain, Value};

fn binary_table(rng: &mut impl Rng, deps: usize) -> Vec<Value> {
    (0..1usize << deps).map(|_| Value::Int(rng.gen_range(0..2))).collect()
}

fn mechanism(target: &str, deps: Vec<VariableId>, rows: Vec<Value>) -> Mechanism {
    Mechanism {
        target: VariableId::new(target).expect("generated name"),
        dependencies: deps,
        rule: Rule::Table(rows),
    }
}

/// A recursive model with 1 to `max_endogenous` binary endogenous variables
/// `V0, V1, ...` and one or two binary exogenous variables `U0, U1`. Each
/// `Vi` reads a random subset of the exogenous variables and of `V0..Vi`
/// through a random table.
pub fn random_recursive(seed: u64, max_endogenous: usize) -> CausalModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_endogenous.max(1));
    let m = rng.gen_range(1..=2);
    let mut vars = Vec::new();
    for j in 0..m {
        vars.push(Variable::exogenous(&format!("U{j}"), Domain::binary()).expect("generated name"));
    }
    for i in 0..n {
        vars.push(Variable::endogenous(&format!("V{i}"), Domain::binary()).expect("generated name"));
    }
    let sig = Signature::new(vars).expect("generated signature");
    let mut mechs = Vec::new();
    for i in 0..n {
        let mut deps = Vec::new();
        for j in 0..m {
            if rng.gen_bool(0.5) {
                deps.push(VariableId::new(format!("U{j}")).expect("generated name"));
            }
        }
        for j in 0..i {
            if rng.gen_bool(0.6) {
                deps.push(VariableId::new(format!("V{j}")).expect("generated name"));
            }
        }
        let rows = binary_table(&mut rng, deps.len());
        mechs.push(mechanism(&format!("V{i}"), deps, rows));
    }
    CausalModel::build(sig, mechs).expect("generated model")
}

/// A binary model with 1 to `max_endogenous` endogenous variables and one
/// exogenous `U0`, where each variable may read any other, so cycles are
/// common.
pub fn random_cyclic(seed: u64, max_endogenous: usize) -> CausalModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_endogenous.max(1));
    let mut vars = vec![Variable::exogenous("U0", Domain::binary()).expect("generated name")];
    for i in 0..n {
        vars.push(Variable::endogenous(&format!("V{i}"), Domain::binary()).expect("generated name"));
    }
    let sig = Signature::new(vars).expect("generated signature");
    let mut mechs = Vec::new();
    for i in 0..n {
        let mut deps = Vec::new();
        if rng.gen_bool(0.5) {
            deps.push(VariableId::new("U0").expect("generated name"));
        }
        for j in (0..n).filter(|&j| j != i) {
            if rng.gen_bool(0.5) {
                deps.push(VariableId::new(format!("V{j}")).expect("generated name"));
            }
        }
        let rows = binary_table(&mut rng, deps.len());
        mechs.push(mechanism(&format!("V{i}"), deps, rows));
    }
    CausalModel::build(sig, mechs).expect("generated model")
}

/// Every context of the model, in odometer order over the exogenous
/// variables.
pub fn all_contexts(model: &CausalModel) -> Vec<Context> {
    let sig = model.signature();
    let exo: Vec<(usize, &Variable)> = sig.exogenous().collect();
    let sizes: Vec<usize> = exo.iter().map(|(_, v)| v.domain.len()).collect();
    odometer(&sizes)
        .into_iter()
        .map(|vals| {
            Context::new(
                exo.iter()
                    .zip(vals)
                    .map(|((_, v), x)| (v.name.clone(), v.domain.values()[x].clone()))
                    .collect(),
            )
        })
        .collect()
}
