//! Exhaustive witness search.
//!
//! Partitions are visited in canonical order: `W` by size, then
//! lexicographically by declaration index; within a partition the cause
//! setting `x'` and then the contingency `w'` run through their domains as
//! odometers.
//!
//! Three shortcuts keep the search small without changing any verdict:
//! `x' = x` is skipped (the `W' = W, Z' = {}` instance of AC2(b) is then the
//! very scenario AC2(a) needs to falsify); `Z'` only ranges over variables
//! downstream of something set to a non-actual value, since every other
//! variable already takes its actual value in the scenario; and scenario
//! outcomes are memoized by clamp vector.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use crate::error::CauseError;
use crate::extended::ExtendedCausalModel;
use crate::formula::IndexedEvent;
use crate::model::{CausalModel, World};
use crate::search_space::{combinations, odometer, subsets};

use super::{DefinitionVariant, SearchStats};

#[derive(Clone, Copy, Debug)]
struct Outcome {
    allowed: bool,
    phi: bool,
    target: bool,
}

/// A witness over indices: `x_prime` follows the cause's conjunct order,
/// `w_prime` follows `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawWitness {
    pub w: Vec<usize>,
    pub x_prime: Vec<usize>,
    pub w_prime: Vec<usize>,
}

pub(crate) enum Control {
    Continue,
    NextPartition,
    Stop,
}

pub(crate) struct Engine<'a> {
    pub model: &'a CausalModel,
    allow: Option<&'a ExtendedCausalModel>,
    pub base: World,
    pub actual: World,
    pub endo: Vec<usize>,
    pub phi: IndexedEvent,
    target: IndexedEvent,
    pub variant: DefinitionVariant,
    desc: Vec<Vec<bool>>,
    cache: RefCell<HashMap<Vec<u16>, Outcome>>,
    partitions: Cell<u64>,
    settings: Cell<u64>,
}

impl<'a> Engine<'a> {
    pub fn new(
        model: &'a CausalModel,
        allow: Option<&'a ExtendedCausalModel>,
        base: World,
        phi: IndexedEvent,
        target: IndexedEvent,
        variant: DefinitionVariant,
    ) -> Result<Self, CauseError> {
        let actual = model.solve_world(&base, &[])?;
        if let Some(ext) = allow {
            if !ext.allows_world(&actual) {
                return Err(CauseError::ActualNotAllowable);
            }
        }
        let endo = model.free_endogenous();
        let desc = (0..model.signature().len()).map(|i| model.descendants(i)).collect();
        Ok(Engine {
            model,
            allow,
            base,
            actual,
            endo,
            phi,
            target,
            variant,
            desc,
            cache: RefCell::new(HashMap::new()),
            partitions: Cell::new(0),
            settings: Cell::new(0),
        })
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            partitions_examined: self.partitions.get(),
            settings_examined: self.settings.get(),
        }
    }

    fn scenario(&self, clamps: &[Option<usize>]) -> Result<Outcome, CauseError> {
        let key: Vec<u16> = clamps.iter().map(|c| c.map_or(0, |v| v as u16 + 1)).collect();
        if let Some(o) = self.cache.borrow().get(&key) {
            return Ok(*o);
        }
        let w = self.model.solve_world(&self.base, clamps)?;
        let o = Outcome {
            allowed: self.allow.is_none_or(|e| e.allows_world(&w)),
            phi: self.phi.holds(&w),
            target: self.target.holds(&w),
        };
        self.cache.borrow_mut().insert(key, o);
        Ok(o)
    }

    fn clamps(&self, parts: &[(&[usize], &[usize])]) -> Vec<Option<usize>> {
        let mut c = vec![None; self.base.len()];
        for (vars, vals) in parts {
            for (&v, &x) in vars.iter().zip(vals.iter()) {
                c[v] = Some(x);
            }
        }
        c
    }

    /// AC2(a): the scenario `X <- x', W <- w'` is allowable and hits the target.
    fn ac2a(&self, xv: &[usize], xp: &[usize], w: &[usize], wp: &[usize]) -> Result<bool, CauseError> {
        let o = self.scenario(&self.clamps(&[(xv, xp), (w, wp)]))?;
        Ok(o.allowed && o.target)
    }

    /// AC2(b) for the cause setting `xs` (which need not be actual).
    pub fn ac2b(&self, xv: &[usize], xs: &[usize], w: &[usize], wp: &[usize]) -> Result<bool, CauseError> {
        let positions: Vec<usize> = (0..w.len()).collect();
        let w_subsets = match self.variant {
            DefinitionVariant::LegacyBPrime => vec![positions],
            _ => subsets(&positions),
        };
        let changed: Vec<usize> = xv
            .iter()
            .zip(xs)
            .filter(|(&v, &x)| self.actual[v] != x)
            .map(|(&v, _)| v)
            .collect();
        for sub in w_subsets {
            let ws: Vec<usize> = sub.iter().map(|&p| w[p]).collect();
            let wps: Vec<usize> = sub.iter().map(|&p| wp[p]).collect();
            let sources: Vec<usize> = ws
                .iter()
                .zip(&wps)
                .filter(|(&v, &x)| self.actual[v] != x)
                .map(|(&v, _)| v)
                .chain(changed.iter().copied())
                .collect();
            let zcand: Vec<usize> = self
                .endo
                .iter()
                .copied()
                .filter(|v| !xv.contains(v) && !w.contains(v))
                .filter(|&v| sources.iter().any(|&s| self.desc[s][v]))
                .collect();
            for zsub in subsets(&zcand) {
                let zvals: Vec<usize> = zsub.iter().map(|&z| self.actual[z]).collect();
                let o = self.scenario(&self.clamps(&[(xv, xs), (&ws, &wps), (&zsub, &zvals)]))?;
                if o.allowed && !o.phi {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// AC2(c): `X <- x` forces the effect under every allowable setting of `W`.
    fn ac2c(&self, xv: &[usize], xs: &[usize], w: &[usize]) -> Result<bool, CauseError> {
        let sizes: Vec<usize> = w.iter().map(|&v| self.model.signature().domain(v).len()).collect();
        for wpp in odometer(&sizes) {
            let o = self.scenario(&self.clamps(&[(xv, xs), (w, &wpp)]))?;
            if o.allowed && !o.phi {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Calls `f` on every (a, b) witness in canonical order, together with
    /// whether its partition also satisfies AC2(c) (always true outside the
    /// strong variant).
    pub fn for_each_witness(
        &self,
        xv: &[usize],
        xs: &[usize],
        mut f: impl FnMut(&RawWitness, bool) -> Control,
    ) -> Result<(), CauseError> {
        let sig = self.model.signature();
        let rest: Vec<usize> = self.endo.iter().copied().filter(|v| !xv.contains(v)).collect();
        let x_sizes: Vec<usize> = xv.iter().map(|&v| sig.domain(v).len()).collect();
        let x_primes: Vec<Vec<usize>> = odometer(&x_sizes).into_iter().filter(|xp| xp != xs).collect();
        for k in 0..=rest.len() {
            for w in combinations(&rest, k) {
                self.partitions.set(self.partitions.get() + 1);
                let w_sizes: Vec<usize> = w.iter().map(|&v| sig.domain(v).len()).collect();
                let w_primes = odometer(&w_sizes);
                let mut b_memo: Vec<Option<bool>> = vec![None; w_primes.len()];
                let mut c_memo: Option<bool> = None;
                'partition: for xp in &x_primes {
                    for (rank, wp) in w_primes.iter().enumerate() {
                        self.settings.set(self.settings.get() + 1);
                        if !self.ac2a(xv, xp, &w, wp)? {
                            continue;
                        }
                        let b = match b_memo[rank] {
                            Some(b) => b,
                            None => {
                                let b = self.ac2b(xv, xs, &w, wp)?;
                                b_memo[rank] = Some(b);
                                b
                            }
                        };
                        if !b {
                            continue;
                        }
                        let c = if self.variant == DefinitionVariant::Strong {
                            match c_memo {
                                Some(c) => c,
                                None => {
                                    let c = self.ac2c(xv, xs, &w)?;
                                    c_memo = Some(c);
                                    c
                                }
                            }
                        } else {
                            true
                        };
                        let raw = RawWitness {
                            w: w.clone(),
                            x_prime: xp.clone(),
                            w_prime: wp.clone(),
                        };
                        match f(&raw, c) {
                            Control::Continue => {}
                            Control::NextPartition => break 'partition,
                            Control::Stop => return Ok(()),
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// First (a, b) witness and first witness whose partition also meets
    /// AC2(c). Outside the strong variant the two coincide.
    pub fn first_witnesses(
        &self,
        xv: &[usize],
        xs: &[usize],
    ) -> Result<(Option<RawWitness>, Option<RawWitness>), CauseError> {
        let mut first_ab = None;
        let mut first_full = None;
        self.for_each_witness(xv, xs, |raw, c| {
            if first_ab.is_none() {
                first_ab = Some(raw.clone());
            }
            if c {
                first_full = Some(raw.clone());
                Control::Stop
            } else {
                Control::NextPartition
            }
        })?;
        Ok((first_ab, first_full))
    }

    /// Whether AC2 holds in the engine's variant (including AC2(c) for the
    /// strong variant).
    pub fn ac2_holds(&self, xv: &[usize], xs: &[usize]) -> Result<bool, CauseError> {
        Ok(self.first_witnesses(xv, xs)?.1.is_some())
    }
}
