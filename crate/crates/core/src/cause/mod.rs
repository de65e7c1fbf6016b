//! Actual causation: weak, actual, strong and contrastive causes, witnesses
//! and active causal processes.

mod search;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CauseError;
use crate::extended::ExtendedCausalModel;
use crate::formula::{resolve_setting, satisfiable, EventFormula, IndexedEvent, PrimitiveEvent};
use crate::model::CausalModel;
use crate::signature::VariableId;
use crate::solve::Context;
use crate::value::Value;

use crate::search_space::combinations;
use search::{Control, Engine, RawWitness};

/// Which form of the no-interference clause AC2(b) to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefinitionVariant {
    /// Every subset of `W` set to `w'` together with every subset of `Z`
    /// restored to its actual value must keep the effect.
    #[default]
    Updated,
    /// Only all of `W` set to `w'` (with every subset of `Z` restored).
    LegacyBPrime,
    /// `Updated` plus AC2(c): with `X = x`, every setting of `W` keeps the
    /// effect.
    Strong,
}

impl DefinitionVariant {
    pub fn name(self) -> &'static str {
        match self {
            DefinitionVariant::Updated => "updated",
            DefinitionVariant::LegacyBPrime => "legacy_b_prime",
            DefinitionVariant::Strong => "strong",
        }
    }
}

/// A conjunction of primitive events over distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CandidateCause {
    conjuncts: Vec<PrimitiveEvent>,
}

impl CandidateCause {
    pub fn new(conjuncts: Vec<PrimitiveEvent>) -> Result<Self, CauseError> {
        if conjuncts.is_empty() {
            return Err(CauseError::InvalidCause("a cause needs at least one conjunct".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &conjuncts {
            if !seen.insert(&c.variable) {
                return Err(CauseError::InvalidCause(format!(
                    "`{}` appears in more than one conjunct",
                    c.variable
                )));
            }
        }
        Ok(CandidateCause { conjuncts })
    }

    pub fn single(variable: &str, value: impl Into<Value>) -> Result<Self, CauseError> {
        Self::new(vec![PrimitiveEvent::new(variable, value)?])
    }

    pub fn conjuncts(&self) -> &[PrimitiveEvent] {
        &self.conjuncts
    }

    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }
}

impl fmt::Display for CandidateCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A partition and setting certifying AC2. `Z` is every endogenous
/// variable outside `w_set`; `z_star` records its actual values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub w_set: Vec<VariableId>,
    pub x_prime: Vec<(VariableId, Value)>,
    pub w_prime: Vec<(VariableId, Value)>,
    pub z_star: Vec<(VariableId, Value)>,
}

impl Witness {
    pub fn z_set(&self) -> Vec<&VariableId> {
        self.z_star.iter().map(|(v, _)| v).collect()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = |xs: &[(VariableId, Value)]| {
            xs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
        };
        let names = |xs: &[&VariableId]| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "Z={{{}}} W={{{}}} x'=({}) w'=({})",
            names(&self.z_set()),
            names(&self.w_set.iter().collect::<Vec<_>>()),
            pairs(&self.x_prime),
            pairs(&self.w_prime)
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub partitions_examined: u64,
    pub settings_examined: u64,
}

/// Clause-by-clause outcome of a causal query.
///
/// `overall` is the conjunction of `ac1`, `ac2`, `ac2c` and `ac3` (where
/// present), `contrast` (where present), and the negation of
/// `excluded_as_trivial`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseVerdict {
    pub variant: DefinitionVariant,
    pub ac1: bool,
    /// AC2(a) and AC2(b) hold for some partition and setting.
    pub ac2: bool,
    /// First witness in canonical order; for the strong variant, the first
    /// one whose partition also meets AC2(c) when there is one.
    pub witness: Option<Witness>,
    /// Strong variant only: some AC2 witness also meets AC2(c).
    pub ac2c: Option<bool>,
    /// Absent for weak-cause queries.
    pub ac3: Option<bool>,
    pub ac3_violation: Option<CandidateCause>,
    /// Rejected because the cause alone entails the effect.
    pub excluded_as_trivial: bool,
    /// Extra condition of an antecedent contrast.
    pub contrast: Option<bool>,
    pub overall: bool,
    pub stats: SearchStats,
}

impl CauseVerdict {
    fn finish(mut self) -> Self {
        self.overall = self.ac1
            && self.ac2
            && self.ac2c.unwrap_or(true)
            && self.ac3.unwrap_or(true)
            && self.contrast.unwrap_or(true)
            && !self.excluded_as_trivial;
        self
    }
}

/// Query options.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseOptions {
    /// Reject causes whose conjunction with the effect's negation is
    /// unsatisfiable over the domains.
    pub exclude_self: bool,
    /// Largest conjunction considered by [`enumerate_causes`].
    pub max_conjuncts: usize,
    /// Refuse models with more unclamped endogenous variables than this.
    pub max_endogenous: usize,
}

impl Default for CauseOptions {
    fn default() -> Self {
        CauseOptions {
            exclude_self: false,
            max_conjuncts: 1,
            max_endogenous: 16,
        }
    }
}

/// A plain model, or one whose AC2 quantifiers range over allowable
/// settings only.
#[derive(Clone, Copy, Debug)]
pub enum QueryModel<'a> {
    Plain(&'a CausalModel),
    Extended(&'a ExtendedCausalModel),
}

impl<'a> QueryModel<'a> {
    pub fn base(&self) -> &'a CausalModel {
        match self {
            QueryModel::Plain(m) => m,
            QueryModel::Extended(e) => e.base(),
        }
    }

    fn allow(&self) -> Option<&'a ExtendedCausalModel> {
        match self {
            QueryModel::Plain(_) => None,
            QueryModel::Extended(e) => Some(e),
        }
    }
}

impl<'a> From<&'a CausalModel> for QueryModel<'a> {
    fn from(m: &'a CausalModel) -> Self {
        QueryModel::Plain(m)
    }
}

impl<'a> From<&'a ExtendedCausalModel> for QueryModel<'a> {
    fn from(m: &'a ExtendedCausalModel) -> Self {
        QueryModel::Extended(m)
    }
}

/// Is `cause` a cause of `effect` in `(model, context)`?
#[derive(Clone, Debug)]
pub struct CauseQuery<'a> {
    pub model: QueryModel<'a>,
    pub context: Context,
    pub cause: CandidateCause,
    pub effect: EventFormula,
    pub variant: DefinitionVariant,
    pub options: CauseOptions,
}

impl<'a> CauseQuery<'a> {
    pub fn new(
        model: impl Into<QueryModel<'a>>,
        context: Context,
        cause: CandidateCause,
        effect: EventFormula,
    ) -> Self {
        CauseQuery {
            model: model.into(),
            context,
            cause,
            effect,
            variant: DefinitionVariant::Updated,
            options: CauseOptions::default(),
        }
    }

    pub fn with_variant(mut self, variant: DefinitionVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_options(mut self, options: CauseOptions) -> Self {
        self.options = options;
        self
    }
}

/// The antecedent or consequent alternative of a contrastive query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContrastMode {
    /// The cause produced the effect as opposed to `phi'`, which must be
    /// incompatible with the effect.
    Consequent(EventFormula),
    /// `X = x` rather than `X = x'`, and with `X = x'` the effect fails.
    AntecedentStrong(Value),
    /// `X = x` rather than `X = x'`, and `X = x'` would also have satisfied
    /// AC2(b) under a witness of the actual cause.
    AntecedentWeak(Value),
}

/// Coarse classification that separates causes needing a non-actual
/// contingency from those that do not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContributoryClass {
    /// A witness exists that keeps every `W` variable at its actual value.
    ActualWithActualW,
    /// AC1 and AC2 hold, but every witness needs a non-actual `w'`.
    ContributoryOnly,
    NotACause,
}

struct Prepared<'a> {
    engine: Engine<'a>,
    xv: Vec<usize>,
    xs: Vec<usize>,
}

fn make_engine<'a>(
    model: QueryModel<'a>,
    context: &Context,
    effect: &EventFormula,
    target: Option<&EventFormula>,
    variant: DefinitionVariant,
    options: &CauseOptions,
) -> Result<Engine<'a>, CauseError> {
    let base_model = model.base();
    if !base_model.is_recursive() {
        return Err(CauseError::NotRecursive);
    }
    let count = base_model.free_endogenous().len();
    if count > options.max_endogenous {
        return Err(CauseError::TooManyVariables {
            count,
            cap: options.max_endogenous,
        });
    }
    let sig = base_model.signature();
    let base = base_model.context_world(context)?;
    let phi = effect.resolve(sig)?;
    let target = match target {
        Some(t) => t.resolve(sig)?,
        None => phi.clone().negate(),
    };
    Engine::new(base_model, model.allow(), base, phi, target, variant)
}

fn prepare<'a>(
    q: &CauseQuery<'a>,
    target: Option<&EventFormula>,
    variant: DefinitionVariant,
) -> Result<Prepared<'a>, CauseError> {
    let engine = make_engine(q.model, &q.context, &q.effect, target, variant, &q.options)?;
    let sig = engine.model.signature();
    let mut xv = Vec::new();
    let mut xs = Vec::new();
    for c in q.cause.conjuncts() {
        let (v, x) = resolve_setting(sig, &c.variable, &c.value)?;
        if !engine.endo.contains(&v) {
            return Err(CauseError::InvalidCause(format!("`{}` is fixed by an intervention", c.variable)));
        }
        xv.push(v);
        xs.push(x);
    }
    Ok(Prepared { engine, xv, xs })
}

impl Engine<'_> {
    fn witness(&self, xv: &[usize], raw: &RawWitness) -> Witness {
        let sig = self.model.signature();
        let pairs = |vars: &[usize], vals: &[usize]| {
            vars.iter()
                .zip(vals)
                .map(|(&v, &x)| (sig.name(v).clone(), sig.domain(v).values()[x].clone()))
                .collect::<Vec<_>>()
        };
        let z: Vec<usize> = self.endo.iter().copied().filter(|v| !raw.w.contains(v)).collect();
        let z_vals: Vec<usize> = z.iter().map(|&v| self.actual[v]).collect();
        Witness {
            w_set: raw.w.iter().map(|&v| sig.name(v).clone()).collect(),
            x_prime: pairs(xv, &raw.x_prime),
            w_prime: pairs(&raw.w, &raw.w_prime),
            z_star: pairs(&z, &z_vals),
        }
    }

    fn ac1(&self, xv: &[usize], xs: &[usize]) -> bool {
        xv.iter().zip(xs).all(|(&v, &x)| self.actual[v] == x) && self.phi.holds(&self.actual)
    }

    /// True when `X = x` and the negated effect cannot hold together.
    fn trivial(&self, xv: &[usize], xs: &[usize]) -> bool {
        let mut parts: Vec<IndexedEvent> = xv.iter().zip(xs).map(|(&v, &x)| IndexedEvent::Prim(v, x)).collect();
        parts.push(self.phi.clone().negate());
        !satisfiable(self.model.signature(), &IndexedEvent::And(parts))
    }

    fn weak_verdict(&self, xv: &[usize], xs: &[usize], exclude_self: bool) -> Result<CauseVerdict, CauseError> {
        let (ab, full) = self.first_witnesses(xv, xs)?;
        let strong = self.variant == DefinitionVariant::Strong;
        let chosen = if strong { full.as_ref().or(ab.as_ref()) } else { ab.as_ref() };
        Ok(CauseVerdict {
            variant: self.variant,
            ac1: self.ac1(xv, xs),
            ac2: ab.is_some(),
            witness: chosen.map(|r| self.witness(xv, r)),
            ac2c: strong.then_some(full.is_some()),
            ac3: None,
            ac3_violation: None,
            excluded_as_trivial: exclude_self && self.trivial(xv, xs),
            contrast: None,
            overall: false,
            stats: SearchStats::default(),
        })
    }

    /// First strict nonempty subset of the conjuncts that satisfies AC1 and
    /// AC2 on its own.
    fn ac3_violation(&self, xv: &[usize], xs: &[usize]) -> Result<Option<Vec<usize>>, CauseError> {
        let positions: Vec<usize> = (0..xv.len()).collect();
        for k in 1..xv.len() {
            for sub in combinations(&positions, k) {
                let sv: Vec<usize> = sub.iter().map(|&p| xv[p]).collect();
                let sx: Vec<usize> = sub.iter().map(|&p| xs[p]).collect();
                if self.ac1(&sv, &sx) && self.ac2_holds(&sv, &sx)? {
                    return Ok(Some(sub));
                }
            }
        }
        Ok(None)
    }

    fn actual_verdict(
        &self,
        cause: &CandidateCause,
        xv: &[usize],
        xs: &[usize],
        exclude_self: bool,
    ) -> Result<CauseVerdict, CauseError> {
        let mut v = self.weak_verdict(xv, xs, exclude_self)?;
        let violation = self.ac3_violation(xv, xs)?;
        v.ac3 = Some(violation.is_none());
        v.ac3_violation = violation.map(|sub| CandidateCause {
            conjuncts: sub.iter().map(|&p| cause.conjuncts[p].clone()).collect(),
        });
        Ok(v)
    }
}

/// AC1 and AC2 only.
pub fn is_weak_cause(q: &CauseQuery) -> Result<CauseVerdict, CauseError> {
    let p = prepare(q, None, q.variant)?;
    let mut v = p.engine.weak_verdict(&p.xv, &p.xs, q.options.exclude_self)?;
    v.stats = p.engine.stats();
    Ok(v.finish())
}

/// AC1, AC2 and minimality, under the query's variant.
pub fn is_actual_cause(q: &CauseQuery) -> Result<CauseVerdict, CauseError> {
    let p = prepare(q, None, q.variant)?;
    let mut v = p.engine.actual_verdict(&q.cause, &p.xv, &p.xs, q.options.exclude_self)?;
    v.stats = p.engine.stats();
    Ok(v.finish())
}

/// [`is_actual_cause`] under the strong variant, whatever the query says.
pub fn is_strong_cause(q: &CauseQuery) -> Result<CauseVerdict, CauseError> {
    let p = prepare(q, None, DefinitionVariant::Strong)?;
    let mut v = p.engine.actual_verdict(&q.cause, &p.xv, &p.xs, q.options.exclude_self)?;
    v.stats = p.engine.stats();
    Ok(v.finish())
}

/// Every AC2 witness in canonical order (for the strong variant, only those
/// whose partition meets AC2(c)).
pub fn enumerate_witnesses(q: &CauseQuery) -> Result<Vec<Witness>, CauseError> {
    let p = prepare(q, None, q.variant)?;
    let mut raws = Vec::new();
    p.engine.for_each_witness(&p.xv, &p.xs, |raw, c| {
        if c {
            raws.push(raw.clone());
            Control::Continue
        } else {
            Control::NextPartition
        }
    })?;
    Ok(raws.iter().map(|r| p.engine.witness(&p.xv, r)).collect())
}

/// All actual causes of the effect with at most `options.max_conjuncts`
/// conjuncts, each conjunct at its actual value, in canonical order.
pub fn enumerate_causes<'a>(
    model: impl Into<QueryModel<'a>>,
    context: &Context,
    effect: &EventFormula,
    variant: DefinitionVariant,
    options: &CauseOptions,
) -> Result<Vec<CandidateCause>, CauseError> {
    let engine = make_engine(model.into(), context, effect, None, variant, options)?;
    if !engine.phi.holds(&engine.actual) {
        return Err(CauseError::EffectNotActual);
    }
    let sig = engine.model.signature();
    let mut ac2: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut out = Vec::new();
    let max = options.max_conjuncts.min(engine.endo.len());
    for k in 1..=max {
        for xv in combinations(&engine.endo, k) {
            let xs: Vec<usize> = xv.iter().map(|&v| engine.actual[v]).collect();
            let holds = engine.ac2_holds(&xv, &xs)?;
            ac2.insert(xv.clone(), holds);
            if !holds || (options.exclude_self && engine.trivial(&xv, &xs)) {
                continue;
            }
            let minimal = (1..k).all(|j| combinations(&xv, j).iter().all(|sub| !ac2[sub]));
            if minimal {
                let conjuncts = xv
                    .iter()
                    .zip(&xs)
                    .map(|(&v, &x)| PrimitiveEvent {
                        variable: sig.name(v).clone(),
                        value: sig.domain(v).values()[x].clone(),
                    })
                    .collect();
                out.push(CandidateCause { conjuncts });
            }
        }
    }
    Ok(out)
}

/// All inclusion-minimal `Z` sets whose partition `(Z, V \ Z)` admits an
/// AC2 witness, ordered by size and then by declaration order.
pub fn active_processes(q: &CauseQuery) -> Result<Vec<Vec<VariableId>>, CauseError> {
    let p = prepare(q, None, q.variant)?;
    let mut ws: Vec<Vec<usize>> = Vec::new();
    p.engine.for_each_witness(&p.xv, &p.xs, |raw, c| {
        if c {
            ws.push(raw.w.clone());
        }
        Control::NextPartition
    })?;
    if ws.is_empty() {
        return Err(CauseError::NoCause);
    }
    let zs: Vec<BTreeSet<usize>> = ws
        .iter()
        .map(|w| p.engine.endo.iter().copied().filter(|v| !w.contains(v)).collect())
        .collect();
    let mut minimal: Vec<&BTreeSet<usize>> = zs
        .iter()
        .filter(|z| !zs.iter().any(|o| o.len() < z.len() && o.is_subset(z)))
        .collect();
    minimal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
    minimal.dedup();
    let sig = p.engine.model.signature();
    Ok(minimal
        .into_iter()
        .map(|z| z.iter().map(|&v| sig.name(v).clone()).collect())
        .collect())
}

/// Contrastive causation in one of the three modes.
pub fn contrastive_cause(q: &CauseQuery, mode: &ContrastMode) -> Result<CauseVerdict, CauseError> {
    match mode {
        ContrastMode::Consequent(alt) => {
            let sig = q.model.base().signature();
            let joint = IndexedEvent::And(vec![q.effect.resolve(sig)?, alt.resolve(sig)?]);
            if satisfiable(sig, &joint) {
                return Err(CauseError::NotContrastive);
            }
            let p = prepare(q, Some(alt), q.variant)?;
            let mut v = p.engine.actual_verdict(&q.cause, &p.xv, &p.xs, q.options.exclude_self)?;
            v.stats = p.engine.stats();
            Ok(v.finish())
        }
        ContrastMode::AntecedentStrong(alt) | ContrastMode::AntecedentWeak(alt) => {
            let [conjunct] = q.cause.conjuncts() else {
                return Err(CauseError::InvalidContrast(
                    "antecedent contrasts need a single-conjunct cause".into(),
                ));
            };
            if *alt == conjunct.value {
                return Err(CauseError::InvalidContrast(format!(
                    "the alternative `{alt}` equals the cause value"
                )));
            }
            let p = prepare(q, None, q.variant)?;
            let (_, x_alt) = resolve_setting(p.engine.model.signature(), &conjunct.variable, alt)?;
            let mut v = p.engine.actual_verdict(&q.cause, &p.xv, &p.xs, q.options.exclude_self)?;
            let extra = match mode {
                ContrastMode::AntecedentStrong(_) => {
                    let w = p.engine.model.solve_world(&p.engine.base, &{
                        let mut c = vec![None; p.engine.base.len()];
                        c[p.xv[0]] = Some(x_alt);
                        c
                    })?;
                    !p.engine.phi.holds(&w)
                }
                _ => {
                    let mut found = false;
                    let mut err = None;
                    p.engine.for_each_witness(&p.xv, &p.xs, |raw, c| {
                        if !c {
                            return Control::NextPartition;
                        }
                        match p.engine.ac2b(&p.xv, &[x_alt], &raw.w, &raw.w_prime) {
                            Ok(true) => {
                                found = true;
                                Control::Stop
                            }
                            Ok(false) => Control::Continue,
                            Err(e) => {
                                err = Some(e);
                                Control::Stop
                            }
                        }
                    })?;
                    if let Some(e) = err {
                        return Err(e);
                    }
                    found
                }
            };
            v.contrast = Some(extra);
            v.stats = p.engine.stats();
            Ok(v.finish())
        }
    }
}

/// Separates causes with a witness keeping `W` at its actual values from
/// those that need a non-actual contingency.
pub fn classify_contributory(q: &CauseQuery) -> Result<ContributoryClass, CauseError> {
    let p = prepare(q, None, q.variant)?;
    if !p.engine.ac1(&p.xv, &p.xs) {
        return Ok(ContributoryClass::NotACause);
    }
    let mut any = false;
    let mut actual_w = false;
    p.engine.for_each_witness(&p.xv, &p.xs, |raw, c| {
        if !c {
            return Control::NextPartition;
        }
        any = true;
        if raw.w.iter().zip(&raw.w_prime).all(|(&v, &x)| p.engine.actual[v] == x) {
            actual_w = true;
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    Ok(match (any, actual_w) {
        (_, true) => ContributoryClass::ActualWithActualW,
        (true, false) => ContributoryClass::ContributoryOnly,
        (false, _) => ContributoryClass::NotACause,
    })
}
