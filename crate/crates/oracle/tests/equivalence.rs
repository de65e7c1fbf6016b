//! The production checker against the literal reference on random models.

use actcause_core::random::{all_contexts, random_recursive};
use actcause_core::{
    enumerate_witnesses, is_actual_cause, Allowable, Assignment, CandidateCause, CauseQuery,
    DefinitionVariant, EventFormula, ExtendedCausalModel, PrimitiveEvent, QueryModel, Value,
};
use actcause_oracle::Literal;

const VARIANTS: [DefinitionVariant; 3] = [
    DefinitionVariant::Updated,
    DefinitionVariant::LegacyBPrime,
    DefinitionVariant::Strong,
];

/// A pseudo-random allowable set: each total setting kept unless its hash
/// bit is clear, always keeping every actual world.
fn random_allowable(seed: u64, model: &actcause_core::CausalModel) -> ExtendedCausalModel {
    let names: Vec<_> = model.signature().endogenous().map(|(_, v)| v.name.clone()).collect();
    let actuals: Vec<Assignment> = all_contexts(model).iter().map(|c| model.solve(c).unwrap()).collect();
    let mut members = Vec::new();
    for mask in 0u32..1 << names.len() {
        let a = Assignment::new(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), Value::Int((mask >> i & 1) as i64)))
                .collect(),
        );
        let h = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add((mask as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
        if actuals.contains(&a) || !(h >> 33).is_multiple_of(3) {
            members.push(a);
        }
    }
    ExtendedCausalModel::new(model.clone(), Allowable::Explicit(members)).unwrap()
}

fn check(seed: u64, extended: bool) -> Vec<String> {
    let model = random_recursive(seed, 4);
    let ext = random_allowable(seed, &model);
    let qm: QueryModel = if extended { (&ext).into() } else { (&model).into() };
    let allow = extended.then_some(&ext);
    let sig = model.signature();
    let mut bad = Vec::new();
    for ctx in all_contexts(&model) {
        let lit = Literal::new(&model, allow, &ctx);
        for (_, evar) in sig.endogenous() {
            for evv in 0..2i64 {
                let effect = EventFormula::prim(evar.name.as_str(), evv).unwrap();
                let phi = effect.resolve(sig).unwrap();
                for (cv, cvar) in sig.endogenous() {
                    for cvv in 0..2i64 {
                        let cause = CandidateCause::new(vec![PrimitiveEvent::new(cvar.name.as_str(), cvv).unwrap()]).unwrap();
                        for variant in VARIANTS {
                            let q = CauseQuery::new(qm, ctx.clone(), cause.clone(), effect.clone()).with_variant(variant);
                            let got = is_actual_cause(&q).unwrap().overall;
                            let want = lit.actual_cause(&[(cv, cvv as usize)], &phi, variant);
                            if got != want {
                                bad.push(format!("seed {seed} ext {extended} {ctx:?} {cause} -> {effect} {variant:?}: got {got} want {want}"));
                            }
                            let ws: Vec<_> = enumerate_witnesses(&q)
                                .unwrap()
                                .into_iter()
                                .map(|w| {
                                    let wv: Vec<usize> = w.w_set.iter().map(|n| sig.index_of(n.as_str()).unwrap()).collect();
                                    let xp: Vec<usize> = w.x_prime.iter().map(|(n, v)| sig.domain(sig.index_of(n.as_str()).unwrap()).index_of(v).unwrap()).collect();
                                    let wp: Vec<usize> = w.w_prime.iter().map(|(n, v)| sig.domain(sig.index_of(n.as_str()).unwrap()).index_of(v).unwrap()).collect();
                                    (wv, xp, wp)
                                })
                                .collect();
                            let lw = lit.witnesses(&[(cv, cvv as usize)], &phi, &phi.clone().negate(), variant, false);
                            if ws != lw {
                                bad.push(format!("seed {seed} ext {extended} witnesses differ for {cause} -> {effect} {variant:?}: {ws:?} vs {lw:?}"));
                            }
                        }
                    }
                }
            }
        }
    }
    bad
}

#[test]
fn plain_models_agree_with_reference() {
    let bad: Vec<String> = (0..40).flat_map(|s| check(s, false)).collect();
    assert!(bad.is_empty(), "{} disagreements, first: {:?}", bad.len(), bad.iter().take(5).collect::<Vec<_>>());
}

#[test]
fn extended_models_agree_with_reference() {
    let bad: Vec<String> = (0..40).flat_map(|s| check(s, true)).collect();
    assert!(bad.is_empty(), "{} disagreements, first: {:?}", bad.len(), bad.iter().take(5).collect::<Vec<_>>());
}
