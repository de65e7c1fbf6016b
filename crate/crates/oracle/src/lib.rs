//! Reference checker that follows the definition of actual causation
//! clause by clause, with no shortcuts.
//!
//! It shares only the model representation with the production checker:
//! solutions are found by enumerating every endogenous assignment and
//! keeping those consistent with the mechanisms, and every quantifier is
//! expanded in full (all `x'` including `x' = x`, all subsets of `W` and of
//! `Z`). It is meant for small models in tests.

use std::cell::RefCell;
use std::rc::Rc;
use std::collections::{BTreeSet, HashMap};

use actcause_core::{CausalModel, Context, DefinitionVariant, ExtendedCausalModel, IndexedEvent, World};

/// All subsets of `items`, by size and then lexicographically.
pub fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut all: Vec<Vec<usize>> = (0u64..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect())
        .collect();
    all.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// All value vectors over the given domain sizes, last entry fastest.
pub fn settings(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..s).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Every world extending `base` in which the clamped variables take their
/// clamped values and every other endogenous variable equals its
/// mechanism's output.
pub fn fixed_points(model: &CausalModel, base: &[usize], clamps: &[(usize, usize)]) -> Vec<World> {
    let sig = model.signature();
    let endo: Vec<usize> = sig.endogenous_indices();
    let sizes: Vec<usize> = endo.iter().map(|&v| sig.domain(v).len()).collect();
    let fixed: Vec<Option<usize>> = endo
        .iter()
        .map(|&v| clamps.iter().rev().find(|(c, _)| *c == v).map(|&(_, x)| x))
        .collect();
    let mut w = base.to_vec();
    for &v in &endo {
        w[v] = 0;
    }
    let mut out = Vec::new();
    loop {
        let consistent = endo.iter().zip(&fixed).all(|(&v, f)| match f {
            Some(x) => w[v] == *x,
            None => model.mechanism_output(v, &w).expect("mechanism output") == w[v],
        });
        if consistent {
            out.push(w.clone());
        }
        // Next assignment, last endogenous variable fastest.
        let mut i = endo.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            w[endo[i]] += 1;
            if w[endo[i]] < sizes[i] {
                break;
            }
            w[endo[i]] = 0;
        }
    }
}

/// A witness over indices: `(W, x', w')`.
pub type RawWitness = (Vec<usize>, Vec<usize>, Vec<usize>);

/// A solved world and whether it is allowable.
type Scenario = (Rc<World>, bool);

pub struct Literal<'a> {
    model: &'a CausalModel,
    allow: Option<&'a ExtendedCausalModel>,
    base: World,
    pub actual: World,
    pub endo: Vec<usize>,
    /// Solved scenarios keyed per variable slot: 0 for free, value + 1 for
    /// clamped.
    memo: RefCell<HashMap<Vec<u32>, Scenario>>,
    key: RefCell<Vec<u32>>,
}

impl<'a> Literal<'a> {
    /// Panics unless the model has exactly one solution in the context.
    pub fn new(model: &'a CausalModel, allow: Option<&'a ExtendedCausalModel>, ctx: &Context) -> Self {
        let base = model.context_world(ctx).expect("valid context");
        let mut sols = fixed_points(model, &base, &[]);
        assert_eq!(sols.len(), 1, "the reference checker needs a unique actual world");
        let actual = sols.pop().unwrap();
        let endo = model.signature().endogenous_indices();
        Literal {
            model,
            allow,
            base,
            actual,
            endo,
            memo: RefCell::new(HashMap::new()),
            key: RefCell::new(Vec::new()),
        }
    }

    fn size(&self, v: usize) -> usize {
        self.model.signature().domain(v).len()
    }

    /// The unique solution under `clamps`, later entries overriding earlier
    /// ones, with its allowability.
    fn scenario(&self, clamps: &[(usize, usize)]) -> (Rc<World>, bool) {
        let mut key = self.key.borrow_mut();
        key.clear();
        key.resize(self.base.len(), 0);
        for &(v, x) in clamps {
            key[v] = x as u32 + 1;
        }
        if let Some((w, ok)) = self.memo.borrow().get(key.as_slice()) {
            return (Rc::clone(w), *ok);
        }
        let merged: Vec<(usize, usize)> = key
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| (v, k as usize - 1))
            .collect();
        let mut sols = fixed_points(self.model, &self.base, &merged);
        assert_eq!(sols.len(), 1, "recursive models have one solution per intervention");
        let w = Rc::new(sols.pop().unwrap());
        let ok = self.allow.is_none_or(|e| e.allows_world(&w));
        self.memo.borrow_mut().insert(key.clone(), (Rc::clone(&w), ok));
        (w, ok)
    }

    pub fn ac1(&self, x: &[(usize, usize)], phi: &IndexedEvent) -> bool {
        x.iter().all(|&(v, val)| self.actual[v] == val) && phi.holds(&self.actual)
    }

    /// Every `(W, x', w')` meeting AC2(a) (with `target` in place of the
    /// negated effect), AC2(b) in the given variant, AC2(c) for the strong
    /// variant, and, if `prime`, the requirement that every `Z` variable
    /// leave its actual value in the AC2(a) scenario.
    pub fn witnesses(
        &self,
        x: &[(usize, usize)],
        phi: &IndexedEvent,
        target: &IndexedEvent,
        variant: DefinitionVariant,
        prime: bool,
    ) -> Vec<RawWitness> {
        self.collect_witnesses(x, phi, target, variant, prime, usize::MAX)
    }

    fn collect_witnesses(
        &self,
        x: &[(usize, usize)],
        phi: &IndexedEvent,
        target: &IndexedEvent,
        variant: DefinitionVariant,
        prime: bool,
        limit: usize,
    ) -> Vec<RawWitness> {
        let xv: Vec<usize> = x.iter().map(|p| p.0).collect();
        let rest: Vec<usize> = self.endo.iter().copied().filter(|v| !xv.contains(v)).collect();
        let x_sizes: Vec<usize> = xv.iter().map(|&v| self.size(v)).collect();
        let mut out = Vec::new();
        for w in subsets(&rest) {
            let z: Vec<usize> = self.endo.iter().copied().filter(|v| !w.contains(v)).collect();
            let w_sizes: Vec<usize> = w.iter().map(|&v| self.size(v)).collect();
            for xp in settings(&x_sizes) {
                for wp in settings(&w_sizes) {
                    let mut clamps: Vec<(usize, usize)> = xv.iter().copied().zip(xp.iter().copied()).collect();
                    clamps.extend(w.iter().copied().zip(wp.iter().copied()));
                    let (sa, ok) = self.scenario(&clamps);
                    if !ok || !target.holds(&sa) {
                        continue;
                    }
                    if prime && z.iter().any(|&v| sa[v] == self.actual[v]) {
                        continue;
                    }
                    if self.ac2b(x, &w, &wp, &z, phi, variant)
                        && (variant != DefinitionVariant::Strong || self.ac2c(x, &w, phi))
                    {
                        out.push((w.clone(), xp.clone(), wp.clone()));
                        if out.len() == limit {
                            return out;
                        }
                    }
                }
            }
        }
        out
    }

    fn ac2b(
        &self,
        x: &[(usize, usize)],
        w: &[usize],
        wp: &[usize],
        z: &[usize],
        phi: &IndexedEvent,
        variant: DefinitionVariant,
    ) -> bool {
        let positions: Vec<usize> = (0..w.len()).collect();
        let w_subs = if variant == DefinitionVariant::LegacyBPrime {
            vec![positions]
        } else {
            subsets(&positions)
        };
        for ws in &w_subs {
            for zs in subsets(z) {
                let mut clamps: Vec<(usize, usize)> = zs.iter().map(|&v| (v, self.actual[v])).collect();
                clamps.extend(ws.iter().map(|&p| (w[p], wp[p])));
                clamps.extend(x.iter().copied());
                let (s, ok) = self.scenario(&clamps);
                if ok && !phi.holds(&s) {
                    return false;
                }
            }
        }
        true
    }

    fn ac2c(&self, x: &[(usize, usize)], w: &[usize], phi: &IndexedEvent) -> bool {
        let sizes: Vec<usize> = w.iter().map(|&v| self.size(v)).collect();
        settings(&sizes).into_iter().all(|wpp| {
            let mut clamps: Vec<(usize, usize)> = x.to_vec();
            clamps.extend(w.iter().copied().zip(wpp));
            let (s, ok) = self.scenario(&clamps);
            !ok || phi.holds(&s)
        })
    }

    pub fn weak(&self, x: &[(usize, usize)], phi: &IndexedEvent, variant: DefinitionVariant) -> bool {
        self.ac1(x, phi) && !self.collect_witnesses(x, phi, &phi.clone().negate(), variant, false, 1).is_empty()
    }

    /// Weak cause using AC2' in place of AC2.
    pub fn weak_prime(&self, x: &[(usize, usize)], phi: &IndexedEvent, variant: DefinitionVariant) -> bool {
        self.ac1(x, phi) && !self.collect_witnesses(x, phi, &phi.clone().negate(), variant, true, 1).is_empty()
    }

    pub fn actual_cause(&self, x: &[(usize, usize)], phi: &IndexedEvent, variant: DefinitionVariant) -> bool {
        if !self.weak(x, phi, variant) {
            return false;
        }
        let positions: Vec<usize> = (0..x.len()).collect();
        subsets(&positions)
            .into_iter()
            .filter(|s| !s.is_empty() && s.len() < x.len())
            .all(|s| {
                let sub: Vec<(usize, usize)> = s.iter().map(|&p| x[p]).collect();
                !self.weak(&sub, phi, variant)
            })
    }

    /// Some assignment of all endogenous variables satisfies `X = x` and
    /// the negated effect.
    pub fn consistent_with_negation(&self, x: &[(usize, usize)], phi: &IndexedEvent) -> bool {
        let sizes: Vec<usize> = self.endo.iter().map(|&v| self.size(v)).collect();
        settings(&sizes).into_iter().any(|vals| {
            let mut w = self.base.clone();
            for (&v, &val) in self.endo.iter().zip(&vals) {
                w[v] = val;
            }
            x.iter().all(|&(v, val)| w[v] == val) && !phi.holds(&w)
        })
    }

    /// Actual causes among actual-valued conjunctions of at most `max`
    /// conjuncts, ordered by size and then by variable.
    pub fn causes(
        &self,
        phi: &IndexedEvent,
        variant: DefinitionVariant,
        max: usize,
        exclude_self: bool,
    ) -> Vec<Vec<(usize, usize)>> {
        subsets(&self.endo)
            .into_iter()
            .filter(|s| !s.is_empty() && s.len() <= max)
            .map(|s| s.iter().map(|&v| (v, self.actual[v])).collect::<Vec<_>>())
            .filter(|x| self.actual_cause(x, phi, variant))
            .filter(|x| !exclude_self || self.consistent_with_negation(x, phi))
            .collect()
    }

    /// Inclusion-minimal `Z` sets of partitions admitting a witness.
    pub fn active_processes(
        &self,
        x: &[(usize, usize)],
        phi: &IndexedEvent,
        variant: DefinitionVariant,
    ) -> Vec<BTreeSet<usize>> {
        let zs: Vec<BTreeSet<usize>> = self
            .witnesses(x, phi, &phi.clone().negate(), variant, false)
            .into_iter()
            .map(|(w, _, _)| self.endo.iter().copied().filter(|v| !w.contains(v)).collect())
            .collect();
        let mut minimal: Vec<BTreeSet<usize>> = zs
            .iter()
            .filter(|z| !zs.iter().any(|o| o.len() < z.len() && o.is_subset(z)))
            .cloned()
            .collect();
        minimal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
        minimal.dedup();
        minimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_orders() {
        assert_eq!(subsets(&[4, 7]), vec![vec![], vec![4], vec![7], vec![4, 7]]);
        assert_eq!(settings(&[2, 2]), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
