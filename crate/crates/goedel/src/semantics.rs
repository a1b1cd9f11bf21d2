//! Exact evaluation over finite interpretations and over ω-shaped
//! interpretations whose tail values are monotone harmonic sequences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::formula::{Formula, Signature, Term};
use crate::goedelset::{GoedelSet, SetAtom, SetError};
use crate::{fmt_q, one, parse_rational, q_int, zero, Q};

/// Default cap on the number of interpretations a brute-force search visits.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("predicate {0} is not interpreted")]
    UnknownPredicate(String),
    #[error("function {0} is not interpreted")]
    UnknownFunction(String),
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("value {value} of {symbol} is not in the truth set")]
    NotInTruthSet { symbol: String, value: String },
    #[error("table for {0} is not total over the universe")]
    PartialTable(String),
    #[error("formula is not closed: {0}")]
    NotClosed(String),
    #[error("search needs {needed} interpretations, budget is {budget}")]
    Budget { needed: String, budget: u64 },
    #[error("the truth set must be finite for exhaustive search")]
    InfiniteTruthSet,
    #[error("tail restriction violated: {0}")]
    TailRestriction(String),
    #[error("bad tail descriptor: {0}")]
    BadDescriptor(String),
    #[error("value map is not strictly monotone with h(0)=0 and h(1)=1")]
    NotMonotone,
    #[error("value {0} has no image under the value map")]
    DomainGap(String),
    #[error("invalid interpretation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Formula(#[from] crate::formula::FormulaError),
}

/// A table over `universe^arity`, indexed in mixed radix with the first
/// argument most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table<T> {
    pub arity: usize,
    pub values: Vec<T>,
}

impl<T: Clone> Table<T> {
    pub fn constant(arity: usize, universe: usize, value: T) -> Table<T> {
        Table { arity, values: vec![value; universe.pow(arity as u32)] }
    }

    fn index(&self, n: usize, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * n + a)
    }

    pub fn get(&self, n: usize, args: &[usize]) -> &T {
        &self.values[self.index(n, args)]
    }

    pub fn set(&mut self, n: usize, args: &[usize], v: T) {
        let i = self.index(n, args);
        self.values[i] = v;
    }
}

/// Argument tuple for a table position.
fn decode_index(mut i: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = i % n;
        i /= n;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteInterpretation {
    pub universe: Vec<String>,
    pub preds: BTreeMap<String, Table<Q>>,
    pub funcs: BTreeMap<String, Table<usize>>,
    pub assignment: BTreeMap<String, usize>,
    pub truth_set: GoedelSet,
}

/// Read-only access shared by the evaluators.
trait Structure {
    type V: Clone + Ord;
    fn top(&self) -> Self::V;
    fn bot(&self) -> Self::V;
    fn size(&self) -> usize;
    fn pred(&self, name: &str, args: &[usize]) -> Result<Self::V, SemanticsError>;
    fn func(&self, name: &str, args: &[usize]) -> Result<usize, SemanticsError>;
}

impl Structure for FiniteInterpretation {
    type V = Q;

    fn top(&self) -> Q {
        one()
    }

    fn bot(&self) -> Q {
        zero()
    }

    fn size(&self) -> usize {
        self.universe.len()
    }

    fn pred(&self, name: &str, args: &[usize]) -> Result<Q, SemanticsError> {
        match self.preds.get(name) {
            Some(t) if t.arity == args.len() => Ok(t.get(self.size(), args).clone()),
            _ => Err(SemanticsError::UnknownPredicate(format!("{name}/{}", args.len()))),
        }
    }

    fn func(&self, name: &str, args: &[usize]) -> Result<usize, SemanticsError> {
        match self.funcs.get(name) {
            Some(t) if t.arity == args.len() => Ok(*t.get(self.size(), args)),
            _ => Err(SemanticsError::UnknownFunction(format!("{name}/{}", args.len()))),
        }
    }
}

fn eval_term<S: Structure>(s: &S, t: &Term, env: &[(&str, usize)]) -> Result<usize, SemanticsError> {
    match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, u)| *u)
            .ok_or_else(|| SemanticsError::Unassigned(v.clone())),
        Term::App(f, args) => {
            let vals = args.iter().map(|a| eval_term(s, a, env)).collect::<Result<Vec<_>, _>>()?;
            s.func(f, &vals)
        }
    }
}

/// Evaluates with the Gödel operations. When `seen` is given, every value
/// computed for a subformula instance is recorded and nothing is
/// short-circuited, which yields the value set `Val(I, f)`.
fn eval_in<'f, S: Structure>(
    s: &S,
    f: &'f Formula,
    env: &mut Vec<(&'f str, usize)>,
    mut seen: Option<&mut BTreeSet<S::V>>,
) -> Result<S::V, SemanticsError> {
    let v = match f {
        Formula::Atom(p, args) => {
            let vals = args.iter().map(|a| eval_term(s, a, env)).collect::<Result<Vec<_>, _>>()?;
            s.pred(p, &vals)?
        }
        Formula::Bot => s.bot(),
        Formula::And(a, b) => {
            let x = eval_in(s, a, env, seen.as_deref_mut())?;
            if seen.is_none() && x == s.bot() {
                x
            } else {
                x.min(eval_in(s, b, env, seen.as_deref_mut())?)
            }
        }
        Formula::Or(a, b) => {
            let x = eval_in(s, a, env, seen.as_deref_mut())?;
            if seen.is_none() && x == s.top() {
                x
            } else {
                x.max(eval_in(s, b, env, seen.as_deref_mut())?)
            }
        }
        Formula::Imp(a, b) => {
            let x = eval_in(s, a, env, seen.as_deref_mut())?;
            let y = eval_in(s, b, env, seen.as_deref_mut())?;
            if x <= y {
                s.top()
            } else {
                y
            }
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let univ = matches!(f, Formula::Forall(..));
            let mut acc = if univ { s.top() } else { s.bot() };
            for u in 0..s.size() {
                env.push((x, u));
                let r = eval_in(s, body, env, seen.as_deref_mut());
                env.pop();
                let r = r?;
                acc = if univ { acc.min(r) } else { acc.max(r) };
                if seen.is_none() && (acc == s.bot() && univ || acc == s.top() && !univ) {
                    break;
                }
            }
            acc
        }
    };
    if let Some(seen) = seen {
        seen.insert(v.clone());
    }
    Ok(v)
}

impl FiniteInterpretation {
    /// An interpretation with no symbols yet.
    pub fn new(universe: Vec<String>, truth_set: GoedelSet) -> FiniteInterpretation {
        FiniteInterpretation {
            universe,
            preds: BTreeMap::new(),
            funcs: BTreeMap::new(),
            assignment: BTreeMap::new(),
            truth_set,
        }
    }

    pub fn with_size(n: usize, truth_set: GoedelSet) -> FiniteInterpretation {
        FiniteInterpretation::new((0..n).map(|i| format!("u{i}")).collect(), truth_set)
    }

    pub fn set_pred(&mut self, name: &str, arity: usize, values: Vec<Q>) {
        self.preds.insert(name.to_string(), Table { arity, values });
    }

    pub fn set_func(&mut self, name: &str, arity: usize, values: Vec<usize>) {
        self.funcs.insert(name.to_string(), Table { arity, values });
    }

    /// Sets a 0-ary predicate.
    pub fn set_prop(&mut self, name: &str, value: Q) {
        self.set_pred(name, 0, vec![value]);
    }

    /// Checks totality of every table and membership of every value.
    pub fn validate(&self) -> Result<(), SemanticsError> {
        let n = self.universe.len();
        if n == 0 {
            return Err(SemanticsError::Invalid("empty universe".into()));
        }
        for (name, t) in &self.preds {
            if t.values.len() != n.pow(t.arity as u32) {
                return Err(SemanticsError::PartialTable(format!("{name}/{}", t.arity)));
            }
            if let Some(v) = t.values.iter().find(|v| !self.truth_set.member(v)) {
                return Err(SemanticsError::NotInTruthSet { symbol: name.clone(), value: fmt_q(v) });
            }
        }
        for (name, t) in &self.funcs {
            if t.values.len() != n.pow(t.arity as u32) || t.values.iter().any(|&u| u >= n) {
                return Err(SemanticsError::PartialTable(format!("{name}/{}", t.arity)));
            }
        }
        if self.assignment.values().any(|&u| u >= n) {
            return Err(SemanticsError::Invalid("assignment outside the universe".into()));
        }
        Ok(())
    }

    fn base_env(&self) -> Vec<(&str, usize)> {
        self.assignment.iter().map(|(k, &v)| (k.as_str(), v)).collect()
    }

    /// Every value taken by a subformula instance of `f`.
    pub fn value_set(&self, f: &Formula) -> Result<BTreeSet<Q>, SemanticsError> {
        let mut seen = BTreeSet::new();
        eval_in(self, f, &mut self.base_env(), Some(&mut seen))?;
        Ok(seen)
    }

    /// Cut at `w`: atom values below `w` stay, all others become 1.
    pub fn lift_w(&self, w: &Q) -> FiniteInterpretation {
        let mut out = self.clone();
        for t in out.preds.values_mut() {
            for v in t.values.iter_mut() {
                if *v >= *w {
                    *v = one();
                }
            }
        }
        out
    }

    /// Applies a value map to every atom value. The map must be strictly
    /// monotone, fix 0 and 1 where defined, and cover every table value.
    pub fn map_h(&self, h: &BTreeMap<Q, Q>, target: GoedelSet) -> Result<FiniteInterpretation, SemanticsError> {
        check_value_map(h)?;
        let mut out = self.clone();
        out.truth_set = target;
        for t in out.preds.values_mut() {
            for v in t.values.iter_mut() {
                *v = h.get(v).cloned().ok_or_else(|| SemanticsError::DomainGap(fmt_q(v)))?;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

fn check_value_map(h: &BTreeMap<Q, Q>) -> Result<(), SemanticsError> {
    let fixes = |x: Q| h.get(&x).is_none_or(|y| *y == x);
    let increasing = h.values().zip(h.values().skip(1)).all(|(a, b)| a < b);
    if increasing && fixes(zero()) && fixes(one()) {
        Ok(())
    } else {
        Err(SemanticsError::NotMonotone)
    }
}

/// Value of `f` under `interp`. Free variables must be assigned.
pub fn eval(f: &Formula, interp: &FiniteInterpretation) -> Result<Q, SemanticsError> {
    eval_in(interp, f, &mut interp.base_env(), None)
}

impl fmt::Display for FiniteInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.universe.len();
        let mut parts = Vec::new();
        for (name, t) in &self.preds {
            for (i, v) in t.values.iter().enumerate() {
                let args: Vec<&str> =
                    decode_index(i, n, t.arity).iter().map(|&u| self.universe[u].as_str()).collect();
                let atom = if t.arity == 0 { name.clone() } else { format!("{name}({})", args.join(",")) };
                parts.push(format!("{atom}={}", fmt_q(v)));
            }
        }
        for (name, t) in &self.funcs {
            for (i, &u) in t.values.iter().enumerate() {
                let args: Vec<&str> =
                    decode_index(i, n, t.arity).iter().map(|&u| self.universe[u].as_str()).collect();
                parts.push(format!("{name}({})={}", args.join(","), self.universe[u]));
            }
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

// ---------------------------------------------------------------------------
// Brute-force entailment

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    /// No countermodel exists up to the searched universe size.
    Holds,
    Countermodel(FiniteInterpretation),
}

impl Entailment {
    pub fn holds(&self) -> bool {
        matches!(self, Entailment::Holds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_universe: usize,
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_universe: 2, budget: DEFAULT_BUDGET }
    }
}

/// Interpretation during brute force: values are indices into the sorted
/// finite truth set, which is enough because every operation only compares.
struct IndexStructure<'a> {
    n: usize,
    top: u16,
    layout: &'a Layout,
    slots: Vec<u16>,
}

struct Layout {
    preds: BTreeMap<String, (usize, usize)>,
    funcs: BTreeMap<String, (usize, usize)>,
    radix: Vec<u16>,
}

impl Layout {
    fn new(sig: &Signature, n: usize, values: usize) -> Layout {
        let mut radix = Vec::new();
        let mut preds = BTreeMap::new();
        for (p, &k) in &sig.preds {
            preds.insert(p.clone(), (radix.len(), k));
            radix.extend(std::iter::repeat_n(values as u16, n.pow(k as u32)));
        }
        let mut funcs = BTreeMap::new();
        for (f, &k) in &sig.funcs {
            funcs.insert(f.clone(), (radix.len(), k));
            radix.extend(std::iter::repeat_n(n as u16, n.pow(k as u32)));
        }
        Layout { preds, funcs, radix }
    }

    fn count(&self) -> u128 {
        self.radix.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128)).unwrap_or(u128::MAX)
    }
}

impl Structure for IndexStructure<'_> {
    type V = u16;

    fn top(&self) -> u16 {
        self.top
    }

    fn bot(&self) -> u16 {
        0
    }

    fn size(&self) -> usize {
        self.n
    }

    fn pred(&self, name: &str, args: &[usize]) -> Result<u16, SemanticsError> {
        let &(off, _) = self.layout.preds.get(name).ok_or_else(|| SemanticsError::UnknownPredicate(name.into()))?;
        let i = args.iter().fold(0, |acc, &a| acc * self.n + a);
        Ok(self.slots[off + i])
    }

    fn func(&self, name: &str, args: &[usize]) -> Result<usize, SemanticsError> {
        let &(off, _) = self.layout.funcs.get(name).ok_or_else(|| SemanticsError::UnknownFunction(name.into()))?;
        let i = args.iter().fold(0, |acc, &a| acc * self.n + a);
        Ok(self.slots[off + i] as usize)
    }
}

/// Number of interpretations an exhaustive search would visit.
pub fn search_size(formulas: &[Formula], v: &GoedelSet, max_universe: usize) -> Result<u128, SemanticsError> {
    let sig = Signature::of(formulas)?;
    let values = v.finite_values().ok_or(SemanticsError::InfiniteTruthSet)?.len();
    let mut total = 0u128;
    for n in 1..=max_universe {
        total = total.saturating_add(Layout::new(&sig, n, values).count());
    }
    Ok(total)
}

/// Visits every interpretation over `v` with universes `1..=max_universe`
/// in a fixed order and returns the first for which `bad` holds.
fn search(
    gamma: &[Formula],
    goal: &Formula,
    v: &GoedelSet,
    cfg: SearchConfig,
    bad: impl Fn(&[u16], u16, u16) -> bool,
) -> Result<Entailment, SemanticsError> {
    for f in gamma.iter().chain(std::iter::once(goal)) {
        if !f.is_closed() {
            return Err(SemanticsError::NotClosed(f.to_string()));
        }
    }
    let mut all: Vec<Formula> = gamma.to_vec();
    all.push(goal.clone());
    let sig = Signature::of(&all)?;
    let values = v.finite_values().ok_or(SemanticsError::InfiniteTruthSet)?;
    let needed = search_size(&all, v, cfg.max_universe)?;
    if needed > cfg.budget as u128 {
        return Err(SemanticsError::Budget { needed: needed.to_string(), budget: cfg.budget });
    }
    let top = (values.len() - 1) as u16;
    for n in 1..=cfg.max_universe {
        let layout = Layout::new(&sig, n, values.len());
        let mut s = IndexStructure { n, top, layout: &layout, slots: vec![0; layout.radix.len()] };
        loop {
            let mut gv = Vec::with_capacity(gamma.len());
            for g in gamma {
                gv.push(eval_in(&s, g, &mut Vec::new(), None)?);
            }
            let gv_inf = gv.iter().copied().min().unwrap_or(top);
            let av = eval_in(&s, goal, &mut Vec::new(), None)?;
            if bad(&gv, gv_inf, av) {
                return Ok(Entailment::Countermodel(materialize(&s, &layout, &values, v)));
            }
            if !advance(&mut s.slots, &layout.radix) {
                break;
            }
        }
    }
    Ok(Entailment::Holds)
}

/// Odometer step with the last slot least significant.
fn advance(slots: &mut [u16], radix: &[u16]) -> bool {
    for i in (0..slots.len()).rev() {
        slots[i] += 1;
        if slots[i] < radix[i] {
            return true;
        }
        slots[i] = 0;
    }
    false
}

fn materialize(s: &IndexStructure, layout: &Layout, values: &[Q], v: &GoedelSet) -> FiniteInterpretation {
    let mut out = FiniteInterpretation::with_size(s.n, v.clone());
    let len = |k: usize| s.n.pow(k as u32);
    for (p, &(off, k)) in &layout.preds {
        let vals = s.slots[off..off + len(k)].iter().map(|&i| values[i as usize].clone()).collect();
        out.set_pred(p, k, vals);
    }
    for (f, &(off, k)) in &layout.funcs {
        let vals = s.slots[off..off + len(k)].iter().map(|&i| i as usize).collect();
        out.set_func(f, k, vals);
    }
    out
}

/// Checks `inf Γ <= A` over every interpretation into the finite set `v`
/// with at most `cfg.max_universe` elements. `Holds` is a bounded result.
pub fn entails_bruteforce(
    gamma: &[Formula],
    goal: &Formula,
    v: &GoedelSet,
    cfg: SearchConfig,
) -> Result<Entailment, SemanticsError> {
    search(gamma, goal, v, cfg, |_, inf, a| inf > a)
}

/// Checks that whenever every premise has value 1 so does the goal.
pub fn one_entails_bruteforce(
    gamma: &[Formula],
    goal: &Formula,
    v: &GoedelSet,
    cfg: SearchConfig,
) -> Result<Entailment, SemanticsError> {
    let top = (v.finite_values().ok_or(SemanticsError::InfiniteTruthSet)?.len() - 1) as u16;
    search(gamma, goal, v, cfg, move |_, inf, a| inf == top && a < top)
}

// ---------------------------------------------------------------------------
// ω-interpretations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Value of an atom on the tail element `t_k`, `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TailDescriptor {
    Const(Q),
    /// `limit ± 1/(k + offset)`.
    Harmonic { limit: Q, sign: Sign, offset: i64 },
}

impl TailDescriptor {
    pub fn at(&self, k: i64) -> Q {
        match self {
            TailDescriptor::Const(c) => c.clone(),
            TailDescriptor::Harmonic { limit, sign, offset } => {
                let step = Q::new(1.into(), (k + offset).into());
                match sign {
                    Sign::Plus => limit + step,
                    Sign::Minus => limit - step,
                }
            }
        }
    }

    fn shifted(&self, by: i64) -> TailDescriptor {
        match self {
            TailDescriptor::Harmonic { limit, sign, offset } => {
                TailDescriptor::Harmonic { limit: limit.clone(), sign: *sign, offset: offset + by }
            }
            c => c.clone(),
        }
    }

    fn parts(&self) -> (Q, i32, i64) {
        match self {
            TailDescriptor::Const(c) => (c.clone(), 0, 0),
            TailDescriptor::Harmonic { limit, sign: Sign::Plus, offset } => (limit.clone(), 1, *offset),
            TailDescriptor::Harmonic { limit, sign: Sign::Minus, offset } => (limit.clone(), -1, *offset),
        }
    }

    /// Infimum over `k >= from`.
    fn inf_from(&self, from: i64) -> Q {
        match self {
            TailDescriptor::Harmonic { limit, sign: Sign::Plus, .. } => limit.clone(),
            other => other.at(from),
        }
    }

    /// Supremum over `k >= from`.
    fn sup_from(&self, from: i64) -> Q {
        match self {
            TailDescriptor::Harmonic { limit, sign: Sign::Minus, .. } => limit.clone(),
            other => other.at(from),
        }
    }

    /// Checks that every value lies in `[0, 1]` and in `v`.
    pub fn validate(&self, v: &GoedelSet) -> Result<(), SemanticsError> {
        let bad = |msg: &str| Err(SemanticsError::BadDescriptor(format!("{self:?}: {msg}")));
        match self {
            TailDescriptor::Const(c) => {
                if v.member(c) {
                    Ok(())
                } else {
                    bad("value not in truth set")
                }
            }
            TailDescriptor::Harmonic { limit, sign, offset } => {
                if *offset < 0 {
                    return bad("offset must be non-negative");
                }
                let first = self.at(1);
                if first.is_negative() || first > one() || limit.is_negative() || *limit > one() {
                    return bad("values leave [0, 1]");
                }
                // find an atom that contains the sequence from some index on
                for atom in v.atoms() {
                    if let Some(k0) = covers_from(atom, limit, *sign, *offset) {
                        if (1..k0).all(|k| v.member(&self.at(k))) {
                            return Ok(());
                        }
                    }
                }
                bad("values not in truth set")
            }
        }
    }
}

/// First index from which `atom` contains `limit ± 1/(k+c)`, if any.
fn covers_from(atom: &SetAtom, limit: &Q, sign: Sign, c: i64) -> Option<i64> {
    let first_k = |pred: &dyn Fn(&Q) -> bool| -> Option<i64> {
        // the sequence is monotone, so the tail is inside once one value is
        (1..=4096i64).find(|&k| {
            let step = Q::new(1.into(), (k + c).into());
            let x = match sign {
                Sign::Plus => limit + step,
                Sign::Minus => limit - step,
            };
            pred(&x)
        })
    };
    match (atom, sign) {
        (SetAtom::Interval(a, b), Sign::Plus) if a <= limit && limit < b => first_k(&|x| x <= b),
        (SetAtom::Interval(a, b), Sign::Minus) if a < limit && limit <= b => first_k(&|x| x >= a),
        (SetAtom::SeqDown { limit: l, scale }, Sign::Plus) | (SetAtom::SeqUp { limit: l, scale }, Sign::Minus)
            if l == limit =>
        {
            // value ± 1/(k+c) equals scale/j for j = scale*(k+c)
            let ok = scale.is_integer() && (scale * q_int(c)).is_integer();
            if !ok {
                return None;
            }
            first_k(&|x| atom.member(x))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailFunction {
    /// `t_k ↦ t_{k+1}`.
    Successor,
    /// Every tail element goes to this prefix element.
    ToPrefix(usize),
}

/// A prefix of named elements followed by the tail `t_1, t_2, ...`.
/// Unary predicates carry a descriptor for their tail values; unary
/// functions act on the tail by successor or by a constant prefix element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaInterpretation {
    pub prefix: FiniteInterpretation,
    pub tail_preds: BTreeMap<String, TailDescriptor>,
    pub tail_funcs: BTreeMap<String, TailFunction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Elem {
    Pre(usize),
    /// `t_{k + offset}` for the symbolic index `k` of the binder `id`.
    Tail { id: usize, offset: i64 },
}

/// A value depending on at most one symbolic tail index.
#[derive(Clone, Debug, PartialEq, Eq)]
enum OVal {
    Fixed(Q),
    /// Value `head[k-1]` for `k <= head.len()`, then `tail(k)`.
    Seq { id: usize, head: Vec<Q>, tail: TailDescriptor },
}

impl OVal {
    fn at(&self, k: i64) -> Q {
        match self {
            OVal::Fixed(v) => v.clone(),
            OVal::Seq { head, tail, .. } => {
                if (k as usize) <= head.len() {
                    head[k as usize - 1].clone()
                } else {
                    tail.at(k)
                }
            }
        }
    }

    fn normalized(self) -> OVal {
        match self {
            OVal::Seq { head, tail: TailDescriptor::Const(c), .. } if head.iter().all(|h| *h == c) => OVal::Fixed(c),
            other => other,
        }
    }
}

/// From which index on the order of two descriptors is fixed, and that order.
pub fn crossover(d1: &TailDescriptor, d2: &TailDescriptor) -> (i64, std::cmp::Ordering) {
    use std::cmp::Ordering::*;
    let (q1, s1, c1) = d1.parts();
    let (q2, s2, c2) = d2.parts();
    if q1 != q2 {
        let dq = &q1 - &q2;
        let ord = if dq.is_positive() { Greater } else { Less };
        let cmin = match (s1, s2) {
            (0, 0) => return (1, ord),
            (0, _) => c2,
            (_, 0) => c1,
            _ => c1.min(c2),
        };
        // |s1/(k+c1) - s2/(k+c2)| <= 2/(k+cmin) < |dq| once k > 2/|dq| - cmin
        let bound = (q_int(2) / dq.abs() - q_int(cmin)).floor() + q_int(1);
        let k = bound.to_integer().try_into().unwrap_or(i64::MAX).max(1);
        return (k, ord);
    }
    let ord = match (s1, s2) {
        (0, 0) => Equal,
        (0, s) => if s > 0 { Less } else { Greater },
        (s, 0) => if s > 0 { Greater } else { Less },
        (1, -1) => Greater,
        (-1, 1) => Less,
        (1, 1) => c2.cmp(&c1),
        _ => c1.cmp(&c2),
    };
    (1, ord)
}

#[derive(Clone, Copy)]
enum Op {
    Min,
    Max,
    Imp,
}

fn apply(op: Op, a: &Q, b: &Q) -> Q {
    match op {
        Op::Min => a.min(b).clone(),
        Op::Max => a.max(b).clone(),
        Op::Imp => {
            if a <= b {
                one()
            } else {
                b.clone()
            }
        }
    }
}

fn combine(op: Op, x: OVal, y: OVal) -> Result<OVal, SemanticsError> {
    let (id, h1, d1, h2, d2) = match (x, y) {
        (OVal::Fixed(a), OVal::Fixed(b)) => return Ok(OVal::Fixed(apply(op, &a, &b))),
        (OVal::Seq { id, head, tail }, OVal::Fixed(b)) => (id, head, tail, vec![], TailDescriptor::Const(b)),
        (OVal::Fixed(a), OVal::Seq { id, head, tail }) => (id, vec![], TailDescriptor::Const(a), head, tail),
        (OVal::Seq { id, head, tail }, OVal::Seq { id: id2, head: head2, tail: tail2 }) => {
            if id != id2 {
                return Err(SemanticsError::TailRestriction(
                    "a subformula depends on two tail elements at once".into(),
                ));
            }
            (id, head, tail, head2, tail2)
        }
    };
    let (k_star, ord) = crossover(&d1, &d2);
    let k0 = k_star.max(h1.len() as i64 + 1).max(h2.len() as i64 + 1);
    let left = OVal::Seq { id, head: h1, tail: d1.clone() };
    let right = OVal::Seq { id, head: h2, tail: d2.clone() };
    let head: Vec<Q> = (1..k0).map(|k| apply(op, &left.at(k), &right.at(k))).collect();
    use std::cmp::Ordering::*;
    let tail = match (op, ord) {
        (Op::Min, Less | Equal) | (Op::Max, Greater | Equal) => d1,
        (Op::Min, Greater) | (Op::Max, Less) => d2,
        (Op::Imp, Less | Equal) => TailDescriptor::Const(one()),
        (Op::Imp, Greater) => d2,
    };
    Ok(OVal::Seq { id, head, tail }.normalized())
}

impl OmegaInterpretation {
    pub fn validate(&self) -> Result<(), SemanticsError> {
        if self.prefix.universe.is_empty() {
            // an empty prefix is allowed; the tail is never empty
        } else {
            self.prefix.validate()?;
        }
        for d in self.tail_preds.values() {
            d.validate(&self.prefix.truth_set)?;
        }
        for (name, f) in &self.tail_funcs {
            if let TailFunction::ToPrefix(u) = f {
                if *u >= self.prefix.universe.len() {
                    return Err(SemanticsError::Invalid(format!("tail map of {name} leaves the prefix")));
                }
            }
        }
        Ok(())
    }

    fn term(&self, t: &Term, env: &[(&str, Elem)]) -> Result<Elem, SemanticsError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| SemanticsError::Unassigned(v.clone())),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                if let [Elem::Tail { id, offset }] = vals[..] {
                    return match self.tail_funcs.get(f) {
                        Some(TailFunction::Successor) => Ok(Elem::Tail { id, offset: offset + 1 }),
                        Some(TailFunction::ToPrefix(u)) => Ok(Elem::Pre(*u)),
                        None => Err(SemanticsError::UnknownFunction(format!("{f}/1 on the tail"))),
                    };
                }
                let mut pre = Vec::with_capacity(vals.len());
                for v in vals {
                    match v {
                        Elem::Pre(u) => pre.push(u),
                        Elem::Tail { .. } => {
                            return Err(SemanticsError::TailRestriction(format!(
                                "function {f} applied to a tail element"
                            )))
                        }
                    }
                }
                self.prefix.func(f, &pre).map(Elem::Pre)
            }
        }
    }

    fn eval_rec<'f>(
        &self,
        f: &'f Formula,
        env: &mut Vec<(&'f str, Elem)>,
        next_id: &mut usize,
    ) -> Result<OVal, SemanticsError> {
        match f {
            Formula::Atom(p, args) => {
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                let tails = vals.iter().filter(|e| matches!(e, Elem::Tail { .. })).count();
                if tails == 0 {
                    let pre: Vec<usize> = vals.iter().map(|e| if let Elem::Pre(u) = e { *u } else { 0 }).collect();
                    return self.prefix.pred(p, &pre).map(OVal::Fixed);
                }
                match vals[..] {
                    [Elem::Tail { id, offset }] => {
                        let d = self
                            .tail_preds
                            .get(p)
                            .ok_or_else(|| SemanticsError::UnknownPredicate(format!("{p}/1 on the tail")))?;
                        Ok(OVal::Seq { id, head: vec![], tail: d.shifted(offset) }.normalized())
                    }
                    _ => Err(SemanticsError::TailRestriction(format!(
                        "atom {f} mentions a tail element in a predicate of arity {}",
                        args.len()
                    ))),
                }
            }
            Formula::Bot => Ok(OVal::Fixed(zero())),
            Formula::And(a, b) => {
                let x = self.eval_rec(a, env, next_id)?;
                combine(Op::Min, x, self.eval_rec(b, env, next_id)?)
            }
            Formula::Or(a, b) => {
                let x = self.eval_rec(a, env, next_id)?;
                combine(Op::Max, x, self.eval_rec(b, env, next_id)?)
            }
            Formula::Imp(a, b) => {
                let x = self.eval_rec(a, env, next_id)?;
                combine(Op::Imp, x, self.eval_rec(b, env, next_id)?)
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let univ = matches!(f, Formula::Forall(..));
                let op = if univ { Op::Min } else { Op::Max };
                let mut acc = OVal::Fixed(if univ { one() } else { zero() });
                for u in 0..self.prefix.universe.len() {
                    env.push((x, Elem::Pre(u)));
                    let r = self.eval_rec(body, env, next_id);
                    env.pop();
                    acc = combine(op, acc, r?)?;
                }
                let id = *next_id;
                *next_id += 1;
                env.push((x, Elem::Tail { id, offset: 0 }));
                let r = self.eval_rec(body, env, next_id);
                env.pop();
                let tail_part = match r? {
                    OVal::Seq { id: sid, head, tail } if sid == id => {
                        let from = head.len() as i64 + 1;
                        let limit = if univ { tail.inf_from(from) } else { tail.sup_from(from) };
                        let best = head.into_iter().fold(limit, |a, h| if univ { a.min(h) } else { a.max(h) });
                        OVal::Fixed(best)
                    }
                    other => other,
                };
                combine(op, acc, tail_part)
            }
        }
    }
}

/// Value of a closed formula (or one whose free variables are assigned to
/// prefix elements) under an ω-interpretation.
pub fn eval_omega(f: &Formula, interp: &OmegaInterpretation) -> Result<Q, SemanticsError> {
    let mut env: Vec<(&str, Elem)> =
        interp.prefix.assignment.iter().map(|(k, &v)| (k.as_str(), Elem::Pre(v))).collect();
    match interp.eval_rec(f, &mut env, &mut 0)? {
        OVal::Fixed(v) => Ok(v),
        OVal::Seq { .. } => Err(SemanticsError::Unassigned("a tail-bound variable".into())),
    }
}

// ---------------------------------------------------------------------------
// JSON file format

/// Either kind of interpretation, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interpretation {
    Finite(FiniteInterpretation),
    Omega(OmegaInterpretation),
}

impl Interpretation {
    pub fn eval(&self, f: &Formula) -> Result<Q, SemanticsError> {
        match self {
            Interpretation::Finite(i) => eval(f, i),
            Interpretation::Omega(i) => eval_omega(f, i),
        }
    }
}

fn bad_json(msg: impl Into<String>) -> SemanticsError {
    SemanticsError::Invalid(msg.into())
}

fn split_symbol(key: &str) -> Result<(String, usize), SemanticsError> {
    let (name, arity) = key.rsplit_once('/').ok_or_else(|| bad_json(format!("symbol `{key}` needs the form NAME/ARITY")))?;
    let arity = arity.parse().map_err(|_| bad_json(format!("bad arity in `{key}`")))?;
    Ok((name.to_string(), arity))
}

fn rational_of(v: &Value) -> Result<Q, SemanticsError> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| bad_json(format!("bad rational `{s}`"))),
        Value::Number(n) => parse_rational(&n.to_string()).ok_or_else(|| bad_json(format!("bad rational `{n}`"))),
        other => Err(bad_json(format!("expected a rational, found {other}"))),
    }
}

fn arg_tuple(key: &str, universe: &[String], arity: usize) -> Result<Vec<usize>, SemanticsError> {
    let names: Vec<&str> = if key.trim().is_empty() { vec![] } else { key.split(',').map(str::trim).collect() };
    if names.len() != arity {
        return Err(bad_json(format!("tuple `{key}` does not have {arity} entries")));
    }
    names
        .iter()
        .map(|n| universe.iter().position(|u| u == n).ok_or_else(|| bad_json(format!("unknown element `{n}`"))))
        .collect()
}

/// Parses the interpretation file format. A `tail` section makes it an
/// ω-interpretation.
pub fn interpretation_from_json(text: &str) -> Result<Interpretation, SemanticsError> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad_json(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| bad_json("expected a JSON object"))?;
    let universe: Vec<String> = match obj.get("universe") {
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad_json("universe entries must be strings")))
            .collect::<Result<_, _>>()?,
        None => vec![],
        _ => return Err(bad_json("`universe` must be an array")),
    };
    let truth_set = GoedelSet::parse(
        obj.get("truth_set").and_then(Value::as_str).ok_or_else(|| bad_json("missing `truth_set`"))?,
    )?;
    let n = universe.len();
    let mut interp = FiniteInterpretation::new(universe.clone(), truth_set);
    let empty = Map::new();
    for (key, table) in obj.get("predicates").and_then(Value::as_object).unwrap_or(&empty) {
        let (name, arity) = split_symbol(key)?;
        let mut values = vec![None; n.pow(arity as u32)];
        match table {
            Value::Object(entries) => {
                for (tuple, v) in entries {
                    let args = arg_tuple(tuple, &universe, arity)?;
                    let i = args.iter().fold(0, |acc, &a| acc * n + a);
                    values[i] = Some(rational_of(v)?);
                }
            }
            v if arity == 0 => values[0] = Some(rational_of(v)?),
            _ => return Err(bad_json(format!("table for {key} must be an object"))),
        }
        let values = values.into_iter().collect::<Option<Vec<_>>>().ok_or(SemanticsError::PartialTable(key.clone()))?;
        interp.set_pred(&name, arity, values);
    }
    for (key, table) in obj.get("functions").and_then(Value::as_object).unwrap_or(&empty) {
        let (name, arity) = split_symbol(key)?;
        let mut values = vec![None; n.pow(arity as u32)];
        let entries: Vec<(String, &Value)> = match table {
            Value::Object(entries) => entries.iter().map(|(k, v)| (k.clone(), v)).collect(),
            v if arity == 0 => vec![(String::new(), v)],
            _ => return Err(bad_json(format!("table for {key} must be an object"))),
        };
        for (tuple, v) in entries {
            let args = arg_tuple(&tuple, &universe, arity)?;
            let target = v.as_str().ok_or_else(|| bad_json("function values must be element names"))?;
            let u = universe.iter().position(|x| x == target).ok_or_else(|| bad_json(format!("unknown element `{target}`")))?;
            values[args.iter().fold(0, |acc, &a| acc * n + a)] = Some(u);
        }
        let values = values.into_iter().collect::<Option<Vec<_>>>().ok_or(SemanticsError::PartialTable(key.clone()))?;
        interp.set_func(&name, arity, values);
    }
    for (var, target) in obj.get("assignment").and_then(Value::as_object).unwrap_or(&empty) {
        let target = target.as_str().ok_or_else(|| bad_json("assignment values must be element names"))?;
        let u = universe.iter().position(|x| x == target).ok_or_else(|| bad_json(format!("unknown element `{target}`")))?;
        interp.assignment.insert(var.clone(), u);
    }
    let Some(tail) = obj.get("tail").and_then(Value::as_object) else {
        interp.validate()?;
        return Ok(Interpretation::Finite(interp));
    };
    let mut tail_preds = BTreeMap::new();
    for (key, desc) in tail {
        let (name, arity) = split_symbol(key)?;
        if arity != 1 {
            return Err(SemanticsError::TailRestriction(format!("tail descriptor for {key}: only unary predicates")));
        }
        tail_preds.insert(name, descriptor_from_json(desc)?);
    }
    let mut tail_funcs = BTreeMap::new();
    for (key, desc) in obj.get("tail_functions").and_then(Value::as_object).unwrap_or(&empty) {
        let (name, _) = split_symbol(key)?;
        let desc = desc.as_str().ok_or_else(|| bad_json("tail function must be \"succ\" or an element name"))?;
        let f = if desc == "succ" {
            TailFunction::Successor
        } else {
            let u = universe.iter().position(|x| x == desc).ok_or_else(|| bad_json(format!("unknown element `{desc}`")))?;
            TailFunction::ToPrefix(u)
        };
        tail_funcs.insert(name, f);
    }
    let omega = OmegaInterpretation { prefix: interp, tail_preds, tail_funcs };
    omega.validate()?;
    Ok(Interpretation::Omega(omega))
}

fn descriptor_from_json(desc: &Value) -> Result<TailDescriptor, SemanticsError> {
    let kind = desc.get("kind").and_then(Value::as_str).unwrap_or("");
    match kind {
        "const" => Ok(TailDescriptor::Const(rational_of(desc.get("value").ok_or_else(|| bad_json("const needs `value`"))?)?)),
        "harmonic" => {
            let limit = rational_of(desc.get("limit").ok_or_else(|| bad_json("harmonic needs `limit`"))?)?;
            let sign = match desc.get("sign").and_then(Value::as_str) {
                Some("+") => Sign::Plus,
                Some("-") => Sign::Minus,
                _ => return Err(bad_json("harmonic `sign` must be \"+\" or \"-\"")),
            };
            let offset = desc.get("offset").and_then(Value::as_i64).unwrap_or(0);
            Ok(TailDescriptor::Harmonic { limit, sign, offset })
        }
        other => Err(bad_json(format!("unknown descriptor kind `{other}`"))),
    }
}

fn descriptor_to_json(d: &TailDescriptor) -> Value {
    match d {
        TailDescriptor::Const(c) => json!({"kind": "const", "value": fmt_q(c)}),
        TailDescriptor::Harmonic { limit, sign, offset } => json!({
            "kind": "harmonic",
            "limit": fmt_q(limit),
            "sign": if *sign == Sign::Plus { "+" } else { "-" },
            "offset": offset,
        }),
    }
}

/// Renders an interpretation in the file format.
pub fn interpretation_to_json(interp: &Interpretation) -> Value {
    let finite = match interp {
        Interpretation::Finite(i) => i,
        Interpretation::Omega(o) => &o.prefix,
    };
    let n = finite.universe.len();
    let tuple = |i: usize, k: usize| -> String {
        decode_index(i, n, k).iter().map(|&u| finite.universe[u].clone()).collect::<Vec<_>>().join(",")
    };
    let mut preds = Map::new();
    for (name, t) in &finite.preds {
        let table: Map<String, Value> =
            t.values.iter().enumerate().map(|(i, v)| (tuple(i, t.arity), Value::String(fmt_q(v)))).collect();
        preds.insert(format!("{name}/{}", t.arity), Value::Object(table));
    }
    let mut funcs = Map::new();
    for (name, t) in &finite.funcs {
        let table: Map<String, Value> = t
            .values
            .iter()
            .enumerate()
            .map(|(i, &u)| (tuple(i, t.arity), Value::String(finite.universe[u].clone())))
            .collect();
        funcs.insert(format!("{name}/{}", t.arity), Value::Object(table));
    }
    let mut out = json!({
        "universe": finite.universe,
        "truth_set": finite.truth_set.to_string(),
        "predicates": preds,
        "functions": funcs,
    });
    if !finite.assignment.is_empty() {
        let a: Map<String, Value> =
            finite.assignment.iter().map(|(k, &u)| (k.clone(), Value::String(finite.universe[u].clone()))).collect();
        out["assignment"] = Value::Object(a);
    }
    if let Interpretation::Omega(o) = interp {
        let tail: Map<String, Value> =
            o.tail_preds.iter().map(|(p, d)| (format!("{p}/1"), descriptor_to_json(d))).collect();
        out["tail"] = Value::Object(tail);
        let tf: Map<String, Value> = o
            .tail_funcs
            .iter()
            .map(|(f, t)| {
                let v = match t {
                    TailFunction::Successor => "succ".to_string(),
                    TailFunction::ToPrefix(u) => finite.universe[*u].clone(),
                };
                (format!("{f}/1"), Value::String(v))
            })
            .collect();
        if !tf.is_empty() {
            out["tail_functions"] = Value::Object(tf);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::q;

    fn props(vals: &[(&str, Q)], v: GoedelSet) -> FiniteInterpretation {
        let mut i = FiniteInterpretation::with_size(1, v);
        for (n, x) in vals {
            i.set_prop(n, x.clone());
        }
        i
    }

    #[test]
    fn conditional_case_split() {
        let i = props(&[("A", q(3, 10)), ("B", q(7, 10))], GoedelSet::unit_interval());
        assert_eq!(eval(&parse("A -> B").unwrap(), &i).unwrap(), one());
        assert_eq!(eval(&parse("B -> A").unwrap(), &i).unwrap(), q(3, 10));
        assert_eq!(eval(&parse("~A").unwrap(), &i).unwrap(), zero());
    }

    #[test]
    fn linearity_is_valid_over_v4() {
        let v4 = GoedelSet::v_m(4);
        let lin = parse("(A -> B) | (B -> A)").unwrap();
        for a in v4.finite_values().unwrap() {
            for b in v4.finite_values().unwrap() {
                let i = props(&[("A", a.clone()), ("B", b)], v4.clone());
                assert_eq!(eval(&lin, &i).unwrap(), one());
            }
        }
    }

    #[test]
    fn modus_ponens_entailment_holds() {
        let g = [parse("A -> B").unwrap(), parse("A").unwrap()];
        let r = entails_bruteforce(&g, &parse("B").unwrap(), &GoedelSet::v_m(3), SearchConfig { max_universe: 1, budget: 1000 });
        assert_eq!(r.unwrap(), Entailment::Holds);
    }

    #[test]
    fn fin3_countermodel_over_v4() {
        let fin3 = parse("(top -> A1) | (A1 -> A2) | (A2 -> bot)").unwrap();
        let r = entails_bruteforce(&[], &fin3, &GoedelSet::v_m(4), SearchConfig { max_universe: 1, budget: 1000 }).unwrap();
        let Entailment::Countermodel(m) = r else { panic!("expected a countermodel") };
        assert_eq!(m.pred("A1", &[]).unwrap(), q(2, 3));
        assert_eq!(m.pred("A2", &[]).unwrap(), q(1, 2));
        assert_eq!(eval(&fin3, &m).unwrap(), q(2, 3));
    }

    #[test]
    fn open_premises_are_rejected() {
        let r = entails_bruteforce(&[parse("A(x)").unwrap()], &parse("B").unwrap(), &GoedelSet::v_m(3), SearchConfig::default());
        assert!(matches!(r, Err(SemanticsError::NotClosed(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse("forall x. forall y. R(x, y)").unwrap();
        let r = entails_bruteforce(&[], &f, &GoedelSet::v_m(5), SearchConfig { max_universe: 4, budget: 1000 });
        assert!(matches!(r, Err(SemanticsError::Budget { .. })));
    }

    #[test]
    fn one_entailment_basics() {
        let a = parse("A").unwrap();
        let r = one_entails_bruteforce(std::slice::from_ref(&a), &a, &GoedelSet::v_m(3), SearchConfig::default()).unwrap();
        assert!(r.holds());
        let r = one_entails_bruteforce(&[parse("A | B").unwrap()], &a, &GoedelSet::v_m(3), SearchConfig::default()).unwrap();
        assert!(!r.holds());
    }

    #[test]
    fn lift_and_map_examples() {
        let i = props(&[("A", q(1, 4)), ("B", q(1, 2))], GoedelSet::unit_interval());
        assert_eq!(i.lift_w(&q(3, 4)), i);
        let all_one = i.lift_w(&q(1, 8));
        assert_eq!(all_one.pred("A", &[]).unwrap(), one());
        assert_eq!(all_one.pred("B", &[]).unwrap(), one());
        let id: BTreeMap<Q, Q> = [zero(), q(1, 4), q(1, 2), one()].into_iter().map(|x| (x.clone(), x)).collect();
        assert_eq!(i.map_h(&id, GoedelSet::unit_interval()).unwrap(), i);
        let bad: BTreeMap<Q, Q> = [(q(1, 4), q(1, 2)), (q(1, 2), q(1, 2))].into_iter().collect();
        assert_eq!(i.map_h(&bad, GoedelSet::unit_interval()), Err(SemanticsError::NotMonotone));
        let gap: BTreeMap<Q, Q> = [(q(1, 4), q(1, 4))].into_iter().collect();
        assert!(matches!(i.map_h(&gap, GoedelSet::unit_interval()), Err(SemanticsError::DomainGap(_))));
    }

    fn omega(v: GoedelSet, d: TailDescriptor) -> OmegaInterpretation {
        OmegaInterpretation {
            prefix: FiniteInterpretation::new(vec![], v),
            tail_preds: [("A".to_string(), d)].into_iter().collect(),
            tail_funcs: BTreeMap::new(),
        }
    }

    fn harmonic(limit: Q, sign: Sign) -> TailDescriptor {
        TailDescriptor::Harmonic { limit, sign, offset: 0 }
    }

    #[test]
    fn c_up_is_refuted_by_harmonic_tail() {
        let c_up = parse("exists x. (A(x) -> forall y. A(y))").unwrap();
        for v in [GoedelSet::v_down(), GoedelSet::unit_interval()] {
            let i = omega(v, harmonic(zero(), Sign::Plus));
            i.validate().unwrap();
            assert_eq!(eval_omega(&c_up, &i).unwrap(), zero());
            assert_eq!(eval_omega(&parse("forall y. A(y)").unwrap(), &i).unwrap(), zero());
        }
    }

    #[test]
    fn c_down_keeps_value_one_over_v_up() {
        let c_down = parse("exists x. ((exists y. A(y)) -> A(x))").unwrap();
        let i = omega(GoedelSet::v_up(), harmonic(one(), Sign::Minus));
        i.validate().unwrap();
        assert_eq!(eval_omega(&parse("exists y. A(y)").unwrap(), &i).unwrap(), one());
        assert_eq!(eval_omega(&c_down, &i).unwrap(), one());
    }

    #[test]
    fn constant_tail_with_prefix() {
        let mut prefix = FiniteInterpretation::with_size(1, GoedelSet::unit_interval());
        prefix.set_pred("A", 1, vec![q(1, 4)]);
        let i = OmegaInterpretation {
            prefix,
            tail_preds: [("A".to_string(), TailDescriptor::Const(q(1, 2)))].into_iter().collect(),
            tail_funcs: BTreeMap::new(),
        };
        assert_eq!(eval_omega(&parse("exists x. A(x)").unwrap(), &i).unwrap(), q(1, 2));
        assert_eq!(eval_omega(&parse("forall x. A(x)").unwrap(), &i).unwrap(), q(1, 4));
    }

    #[test]
    fn iso0_fails_on_harmonic_tail_over_unit_interval() {
        let iso = parse("forall x. ~~A(x) -> ~~forall x. A(x)").unwrap();
        let i = omega(GoedelSet::unit_interval(), harmonic(zero(), Sign::Plus));
        assert_eq!(eval_omega(&parse("forall x. ~~A(x)").unwrap(), &i).unwrap(), one());
        assert_eq!(eval_omega(&iso, &i).unwrap(), zero());
    }

    #[test]
    fn successor_shifts_the_tail() {
        let mut i = omega(GoedelSet::unit_interval(), harmonic(zero(), Sign::Plus));
        i.tail_funcs.insert("s".into(), TailFunction::Successor);
        // A(s(x)) < A(x) everywhere on the tail, so the conditional is never 1
        let f = parse("exists x. (A(x) -> A(s(x)))").unwrap();
        assert_eq!(eval_omega(&f, &i).unwrap(), q(1, 2));
        let g = parse("forall x. (A(s(x)) -> A(x))").unwrap();
        assert_eq!(eval_omega(&g, &i).unwrap(), one());
    }

    #[test]
    fn coupled_tail_variables_are_rejected() {
        let i = omega(GoedelSet::unit_interval(), harmonic(zero(), Sign::Plus));
        let f = parse("forall x. forall y. (A(x) -> A(y))").unwrap();
        assert!(matches!(eval_omega(&f, &i), Err(SemanticsError::TailRestriction(_))));
    }

    #[test]
    fn descriptor_validation() {
        assert!(harmonic(zero(), Sign::Plus).validate(&GoedelSet::v_down()).is_ok());
        assert!(harmonic(one(), Sign::Minus).validate(&GoedelSet::v_up()).is_ok());
        assert!(harmonic(one(), Sign::Minus).validate(&GoedelSet::v_down()).is_err());
        let half = TailDescriptor::Harmonic { limit: zero(), sign: Sign::Plus, offset: 1 };
        assert!(half.validate(&GoedelSet::v_down()).is_ok());
        let shifted = TailDescriptor::Harmonic { limit: q(1, 2), sign: Sign::Plus, offset: 2 };
        assert!(shifted.validate(&GoedelSet::parse("{0} + [1/2,1]").unwrap()).is_ok());
        assert!(shifted.validate(&GoedelSet::v_m(3)).is_err());
    }

    /// Brute-force oracle for descriptor order: compare values directly over
    /// a long window past the claimed crossover.
    #[test]
    fn crossover_matches_direct_comparison() {
        let mut ds = vec![];
        for l in [zero(), q(1, 3), q(1, 2), one()] {
            ds.push(TailDescriptor::Const(l.clone()));
            for c in 0..3 {
                ds.push(TailDescriptor::Harmonic { limit: l.clone(), sign: Sign::Plus, offset: c });
                ds.push(TailDescriptor::Harmonic { limit: l.clone(), sign: Sign::Minus, offset: c });
            }
        }
        for a in &ds {
            for b in &ds {
                let (k, ord) = crossover(a, b);
                for j in k..k + 200 {
                    assert_eq!(a.at(j).cmp(&b.at(j)), ord, "{a:?} vs {b:?} at {j}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{ "universe": ["u0","u1"], "truth_set": "[0,1]",
            "predicates": {"P/1": {"u0": "1/2", "u1": "1"}, "A/0": "1/3"},
            "functions": {"f/1": {"u0":"u1","u1":"u1"}} }"#;
        let i = interpretation_from_json(text).unwrap();
        let back = interpretation_from_json(&interpretation_to_json(&i).to_string()).unwrap();
        assert_eq!(i, back);
        let v = i.eval(&parse("forall x. P(f(x))").unwrap()).unwrap();
        assert_eq!(v, one());
        let omega_text = r#"{ "universe": [], "truth_set": "[0,1]",
            "tail": {"P/1": {"kind":"harmonic","limit":"0","sign":"+","offset":0}} }"#;
        let o = interpretation_from_json(omega_text).unwrap();
        assert!(matches!(o, Interpretation::Omega(_)));
        assert_eq!(o.eval(&parse("forall x. P(x)").unwrap()).unwrap(), zero());
        let back = interpretation_from_json(&interpretation_to_json(&o).to_string()).unwrap();
        assert_eq!(o, back);
    }

    #[test]
    fn value_set_collects_subformula_values() {
        let i = props(&[("A", q(1, 4)), ("B", q(1, 2))], GoedelSet::unit_interval());
        let vals = i.value_set(&parse("B -> A").unwrap()).unwrap();
        assert_eq!(vals.into_iter().collect::<Vec<_>>(), vec![q(1, 4), q(1, 2)]);
    }
}
