use std::collections::BTreeMap;

use actcause_core::formula::eval;
use actcause_core::random::{all_contexts, random_cyclic, random_recursive};
use actcause_core::{
    eval_nonrecursive, Assignment, CausalFormula, CausalModel, EventFormula, Value, VariableId,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn endo_names(m: &CausalModel) -> Vec<VariableId> {
    m.signature().endogenous().map(|(_, v)| v.name.clone()).collect()
}

/// Every total endogenous assignment of a binary model.
fn all_assignments(m: &CausalModel) -> Vec<Assignment> {
    let names = endo_names(m);
    (0u32..1 << names.len())
        .map(|mask| {
            Assignment::new(
                names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), Value::Int((mask >> i & 1) as i64)))
                    .collect(),
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solution_is_a_fixed_point_and_unique(seed in any::<u64>()) {
        let m = random_recursive(seed, 4);
        for ctx in all_contexts(&m) {
            let s = m.solve(&ctx).unwrap();
            prop_assert!(m.check_fixed_point(&ctx, &s).unwrap());
            prop_assert_eq!(m.solve_all(&ctx).unwrap(), vec![s]);
        }
    }

    #[test]
    fn fixed_points_match_brute_force_filter(seed in any::<u64>()) {
        let m = random_cyclic(seed, 3);
        for ctx in all_contexts(&m) {
            let expected: Vec<Assignment> = all_assignments(&m)
                .into_iter()
                .filter(|a| m.check_fixed_point(&ctx, a).unwrap())
                .collect();
            let mut got = m.solve_all(&ctx).unwrap();
            let mut want = expected;
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn submodels_compose(seed in any::<u64>(), picks in subsequence((0..4usize).collect::<Vec<_>>(), 0..=4), split in 0usize..=4, bits in any::<u8>()) {
        let m = random_recursive(seed, 4);
        let names = endo_names(&m);
        let chosen: Vec<usize> = picks.into_iter().filter(|&i| i < names.len()).collect();
        let split = split.min(chosen.len());
        let value = |k: usize| Value::Int((bits >> k & 1) as i64);
        let y: BTreeMap<VariableId, Value> = chosen[..split].iter().map(|&i| (names[i].clone(), value(i))).collect();
        let z: BTreeMap<VariableId, Value> = chosen[split..].iter().map(|&i| (names[i].clone(), value(i))).collect();
        let mut both = y.clone();
        both.extend(z.clone());
        let stepwise = m.submodel(&y).unwrap().submodel(&z).unwrap();
        let direct = m.submodel(&both).unwrap();
        for ctx in all_contexts(&m) {
            prop_assert_eq!(stepwise.solve(&ctx).unwrap(), direct.solve(&ctx).unwrap());
        }
    }

    #[test]
    fn non_ancestors_are_unaffected(seed in any::<u64>(), bit in 0i64..2) {
        let m = random_recursive(seed, 4);
        let sig = m.signature();
        for (y, yv) in sig.endogenous() {
            let desc = m.descendants(y);
            let sub = m.submodel(&BTreeMap::from([(yv.name.clone(), Value::Int(bit))])).unwrap();
            for ctx in all_contexts(&m) {
                let before = m.solve(&ctx).unwrap();
                let after = sub.solve(&ctx).unwrap();
                for (x, xv) in sig.endogenous() {
                    if x != y && !desc[x] {
                        prop_assert_eq!(before.get(xv.name.as_str()), after.get(xv.name.as_str()));
                    }
                }
            }
        }
    }

    #[test]
    fn outputs_ignore_undeclared_inputs(seed in any::<u64>(), mask in any::<u16>()) {
        let m = random_recursive(seed, 4);
        let n = m.signature().len();
        let world: Vec<usize> = (0..n).map(|i| (mask >> i & 1) as usize).collect();
        for t in m.free_endogenous() {
            let out = m.mechanism_output(t, &world).unwrap();
            for other in (0..n).filter(|o| *o != t && !m.dependencies_of(t).contains(o)) {
                let mut toggled = world.clone();
                toggled[other] ^= 1;
                prop_assert_eq!(m.mechanism_output(t, &toggled).unwrap(), out);
            }
        }
    }

    #[test]
    fn box_and_diamond_are_dual(seed in any::<u64>(), target in 0usize..3, value in 0i64..2, picks in subsequence((0..3usize).collect::<Vec<_>>(), 0..=3), bits in any::<u8>()) {
        let m = random_cyclic(seed, 3);
        let names = endo_names(&m);
        let target = target % names.len();
        let phi = EventFormula::prim(names[target].as_str(), value).unwrap();
        let intervention: Vec<(VariableId, Value)> = picks
            .into_iter()
            .filter(|&i| i < names.len())
            .map(|i| (names[i].clone(), Value::Int((bits >> i & 1) as i64)))
            .collect();
        for ctx in all_contexts(&m) {
            let sols = m.solve_all(&ctx).unwrap();
            let Some(actual) = sols.first() else { continue };
            let dia = CausalFormula::diamond(intervention.clone(), phi.clone());
            let boxed_neg = CausalFormula::boxed(intervention.clone(), phi.clone().not());
            prop_assert_eq!(
                eval_nonrecursive(&m, &ctx, actual, &dia).unwrap(),
                !eval_nonrecursive(&m, &ctx, actual, &boxed_neg).unwrap()
            );
        }
    }

    #[test]
    fn both_semantics_agree_on_recursive_models(seed in any::<u64>(), target in 0usize..4, value in 0i64..2, bits in any::<u8>(), diamond in any::<bool>()) {
        let m = random_recursive(seed, 4);
        let names = endo_names(&m);
        let target = target % names.len();
        let phi = EventFormula::prim(names[target].as_str(), value).unwrap();
        let intervention: Vec<(VariableId, Value)> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> (i + 4) & 1 == 1)
            .map(|(i, n)| (n.clone(), Value::Int((bits >> i & 1) as i64)))
            .collect();
        let psi = CausalFormula::Or(vec![
            if diamond {
                CausalFormula::diamond(intervention.clone(), phi.clone())
            } else {
                CausalFormula::boxed(intervention.clone(), phi.clone())
            },
            CausalFormula::Event(phi.clone()).not(),
        ]);
        for ctx in all_contexts(&m) {
            let actual = m.solve(&ctx).unwrap();
            prop_assert_eq!(eval(&m, &ctx, &psi).unwrap(), eval_nonrecursive(&m, &ctx, &actual, &psi).unwrap());
        }
    }
}

#[test]
fn evaluation_is_pure() {
    let m = random_recursive(7, 4);
    let names = endo_names(&m);
    let psi = CausalFormula::boxed(
        vec![(names[0].clone(), Value::Int(1))],
        EventFormula::prim(names[names.len() - 1].as_str(), 1).unwrap(),
    );
    for ctx in all_contexts(&m) {
        let first = eval(&m, &ctx, &psi).unwrap();
        for _ in 0..5 {
            assert_eq!(eval(&m, &ctx, &psi).unwrap(), first);
        }
    }
}
