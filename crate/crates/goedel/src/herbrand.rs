//! Herbrand forms and the semantic-tree prover for prenex formulas.
//!
//! The tree branches on weak linear orders of the Herbrand base atoms
//! between `bot` and `top`. A node closes once some instance of the
//! Herbrand matrix whose atoms are already placed takes value 1 on the
//! order. When every branch closes, the used instances form a Herbrand
//! disjunction that is propositionally valid.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decide::{decide, DecideError, Logic};
use crate::formula::{fresh_name, parse, Formula, FormulaError, Quant, Term};
use crate::{q, Q};

pub const DEFAULT_MAX_NODES: usize = 2_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum HerbrandError {
    #[error("formula is not prenex")]
    NotPrenex,
    #[error("formula is not closed")]
    NotClosed,
    #[error("semantic tree exceeded {0} nodes")]
    Budget(usize),
    #[error("bad mode `{0}`, expected `uncountable` or `finite:<n>`")]
    BadMode(String),
    #[error("certificate: {0}")]
    Certificate(String),
    #[error("trace: {0}")]
    Trace(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Decide(#[from] DecideError),
}

/// Which truth-value sets the proof is for: all infinite ones, or sets
/// with exactly `n` values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Uncountable,
    Finite(usize),
}

impl Mode {
    fn logic(self) -> Logic {
        match self {
            Mode::Uncountable => Logic::LC,
            Mode::Finite(n) => Logic::G(n),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Uncountable => write!(f, "uncountable"),
            Mode::Finite(n) => write!(f, "finite:{n}"),
        }
    }
}

impl FromStr for Mode {
    type Err = HerbrandError;

    fn from_str(s: &str) -> Result<Mode, HerbrandError> {
        let t = s.trim().to_ascii_lowercase();
        if t == "uncountable" {
            return Ok(Mode::Uncountable);
        }
        let n = t
            .strip_prefix("finite:")
            .or_else(|| t.strip_prefix("finite(").and_then(|r| r.strip_suffix(')')))
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 2);
        n.map(Mode::Finite).ok_or_else(|| HerbrandError::BadMode(s.to_string()))
    }
}

/// A fresh function symbol standing for a universal variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemSymbol {
    pub name: String,
    pub arity: usize,
    /// The universal variable it replaces.
    pub var: String,
}

#[derive(Clone, Debug)]
pub struct HerbrandProblem {
    /// The prenex input as given.
    pub formula: Formula,
    /// Prefix with pairwise distinct variables.
    pub prefix: Vec<(Quant, String)>,
    pub matrix: Formula,
    /// The matrix with universal variables replaced by Skolem terms.
    pub herbrand_matrix: Formula,
    /// Existential variables in prefix order; the free variables of
    /// `herbrand_matrix`.
    pub exist_vars: Vec<String>,
    pub skolem: Vec<SkolemSymbol>,
    /// Symbols added so that the Herbrand universe is non-empty and infinite.
    pub padding: Vec<(String, usize)>,
    preds: Vec<(String, usize)>,
    funcs: Vec<(String, usize)>,
    default_term: Term,
}

fn term_symbols(t: &Term, out: &mut BTreeMap<String, usize>) {
    if let Term::App(f, args) = t {
        out.insert(f.clone(), args.len());
        for a in args {
            term_symbols(a, out);
        }
    }
}

fn formula_contains_term(f: &Formula, t: &Term) -> bool {
    match f {
        Formula::Atom(_, args) => args.iter().any(|a| a.contains(t)),
        Formula::Bot => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            formula_contains_term(a, t) || formula_contains_term(b, t)
        }
        Formula::Forall(_, a) | Formula::Exists(_, a) => formula_contains_term(a, t),
    }
}

/// Builds the Herbrand form: each universal variable becomes a fresh
/// function of the existential variables before it. A valid prenex formula
/// has a valid Herbrand form; the prover works on the latter.
pub fn herbrand_form(a: &Formula) -> Result<HerbrandProblem, HerbrandError> {
    if !a.is_prenex() {
        return Err(HerbrandError::NotPrenex);
    }
    if !a.is_closed() {
        return Err(HerbrandError::NotClosed);
    }
    let sig = a.signature()?;
    let (prefix, matrix) = a.prenex_parts();
    // make prefix variables distinct, keeping names where possible
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut renamed = Vec::new();
    let mut names = Vec::new();
    for (qt, x) in &prefix {
        let fresh = fresh_name(x, &used);
        used.insert(fresh.clone());
        names.push((x.clone(), fresh.clone()));
        renamed.push((*qt, fresh));
    }
    // innermost binder wins, so substitute from the inside out
    let mut env: BTreeMap<String, String> = BTreeMap::new();
    for (old, new) in &names {
        env.insert(old.clone(), new.clone());
    }
    let matrix = matrix.map_atoms(&mut |p, args| {
        Formula::Atom(p.to_string(), args.iter().map(|t| rename_vars(t, &env)).collect())
    });

    let mut taken: BTreeSet<String> = sig.preds.keys().chain(sig.funcs.keys()).cloned().collect();
    taken.extend(used.iter().cloned());
    let mut exist_vars = Vec::new();
    let mut skolem = Vec::new();
    let mut herbrand_matrix = matrix.clone();
    for (qt, x) in &renamed {
        match qt {
            Quant::Exists => exist_vars.push(x.clone()),
            Quant::Forall => {
                let j = skolem.len() + 1;
                let base = if exist_vars.is_empty() { format!("c{j}") } else { format!("f{j}") };
                let name = fresh_name(&base, &taken);
                taken.insert(name.clone());
                let t = Term::app(&name, exist_vars.iter().map(|v| Term::var(v)).collect());
                herbrand_matrix = herbrand_matrix.substitute(x, &t);
                skolem.push(SkolemSymbol { name, arity: exist_vars.len(), var: x.clone() });
            }
        }
    }

    let mut funcs: BTreeMap<String, usize> = BTreeMap::new();
    let mut preds: BTreeMap<String, usize> = BTreeMap::new();
    for atom in herbrand_matrix.atoms() {
        if let Formula::Atom(p, args) = &atom {
            preds.insert(p.clone(), args.len());
            for t in args {
                term_symbols(t, &mut funcs);
            }
        }
    }
    let mut padding = Vec::new();
    if !funcs.values().any(|&k| k == 0) {
        let c = fresh_name("c0", &taken);
        taken.insert(c.clone());
        padding.push((c, 0));
    }
    if !funcs.values().any(|&k| k > 0) {
        let f = fresh_name("f0", &taken);
        taken.insert(f.clone());
        padding.push((f, 1));
    }
    funcs.extend(padding.iter().cloned());
    let default_term = funcs
        .iter()
        .filter(|(_, &k)| k == 0)
        .map(|(c, _)| Term::constant(c))
        .min_by(|a, b| a.enum_cmp(b))
        .expect("a constant exists after padding");
    Ok(HerbrandProblem {
        formula: a.clone(),
        prefix: renamed,
        matrix,
        herbrand_matrix,
        exist_vars,
        skolem,
        padding,
        preds: preds.into_iter().collect(),
        funcs: funcs.into_iter().collect(),
        default_term,
    })
}

fn rename_vars(t: &Term, env: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename_vars(a, env)).collect()),
    }
}

impl HerbrandProblem {
    /// The existential closure of the Herbrand matrix.
    pub fn herbrand_formula(&self) -> Formula {
        self.exist_vars.iter().rev().fold(self.herbrand_matrix.clone(), |f, x| Formula::exists(x, f))
    }

    /// The Herbrand matrix at a tuple of ground terms.
    pub fn instance(&self, tuple: &[Term]) -> Formula {
        self.exist_vars.iter().zip(tuple).fold(self.herbrand_matrix.clone(), |f, (x, t)| f.substitute(x, t))
    }

    pub fn is_skolem(&self, name: &str) -> bool {
        self.skolem.iter().any(|s| s.name == name)
    }
}

fn atom_size(f: &Formula) -> usize {
    match f {
        Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        _ => 0,
    }
}

fn cmp_atoms(a: &Formula, b: &Formula) -> std::cmp::Ordering {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => atom_size(a)
            .cmp(&atom_size(b))
            .then_with(|| p.cmp(q))
            .then_with(|| {
                xs.iter().zip(ys).map(|(x, y)| x.enum_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
            }),
        _ => a.cmp(b),
    }
}

/// Enumerates the Herbrand base by total size, then predicate name, then
/// arguments.
#[derive(Clone, Debug)]
pub struct BaseEnumerator {
    preds: Vec<(String, usize)>,
    funcs: Vec<(String, usize)>,
    terms_by_size: Vec<Vec<Term>>,
    atoms: Vec<Formula>,
    next_size: usize,
    max_atom_size: Option<usize>,
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl BaseEnumerator {
    pub fn new(p: &HerbrandProblem) -> BaseEnumerator {
        let max_atom_size = if p.preds.iter().all(|(_, k)| *k == 0) { Some(1) } else { None };
        BaseEnumerator {
            preds: p.preds.clone(),
            funcs: p.funcs.clone(),
            terms_by_size: vec![vec![]],
            atoms: vec![],
            next_size: 1,
            max_atom_size,
        }
    }

    fn terms_of_size(&mut self, s: usize) -> &[Term] {
        while self.terms_by_size.len() <= s {
            let n = self.terms_by_size.len();
            let mut bucket = Vec::new();
            for (f, k) in self.funcs.clone() {
                if k == 0 {
                    if n == 1 {
                        bucket.push(Term::constant(&f));
                    }
                    continue;
                }
                for sizes in compositions(n - 1, k) {
                    let mut tuples: Vec<Vec<Term>> = vec![vec![]];
                    for &si in &sizes {
                        let opts = self.terms_by_size[si].clone();
                        tuples = tuples
                            .into_iter()
                            .flat_map(|t| {
                                opts.iter().map(move |o| {
                                    let mut t = t.clone();
                                    t.push(o.clone());
                                    t
                                })
                            })
                            .collect();
                    }
                    bucket.extend(tuples.into_iter().map(|args| Term::app(&f, args)));
                }
            }
            bucket.sort_by(|a, b| a.enum_cmp(b));
            self.terms_by_size.push(bucket);
        }
        &self.terms_by_size[s]
    }

    /// Makes sure at least `count` atoms are known; false if the base is
    /// finite and smaller.
    pub fn ensure(&mut self, count: usize) -> bool {
        while self.atoms.len() < count {
            if self.max_atom_size.is_some_and(|m| self.next_size > m) {
                return false;
            }
            let s = self.next_size;
            self.next_size += 1;
            let mut bucket = Vec::new();
            for (p, k) in self.preds.clone() {
                if k == 0 {
                    if s == 1 {
                        bucket.push(Formula::prop(&p));
                    }
                    continue;
                }
                for sizes in compositions(s - 1, k) {
                    let mut tuples: Vec<Vec<Term>> = vec![vec![]];
                    for &si in &sizes {
                        let opts = self.terms_of_size(si).to_vec();
                        tuples = tuples
                            .into_iter()
                            .flat_map(|t| {
                                opts.iter().map(move |o| {
                                    let mut t = t.clone();
                                    t.push(o.clone());
                                    t
                                })
                            })
                            .collect();
                    }
                    bucket.extend(tuples.into_iter().map(|args| Formula::Atom(p.clone(), args)));
                }
            }
            bucket.sort_by(cmp_atoms);
            self.atoms.extend(bucket);
        }
        true
    }

    pub fn atoms(&self) -> &[Formula] {
        &self.atoms
    }
}

/// The first `level` atoms of the Herbrand base.
pub fn enum_base(p: &HerbrandProblem, level: usize) -> Vec<Formula> {
    let mut e = BaseEnumerator::new(p);
    e.ensure(level);
    e.atoms.iter().take(level).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub tuple: Vec<Term>,
    pub formula: Formula,
}

fn match_term(pattern: &Term, ground: &Term, env: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, ground) {
        (Term::Var(x), g) => match env.get(x) {
            Some(t) => t == g,
            None => {
                env.insert(x.clone(), g.clone());
                true
            }
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, env))
        }
        _ => false,
    }
}

/// Instances of the Herbrand matrix whose atoms all lie among `atoms`,
/// ordered by their term tuples.
pub fn instances_over(p: &HerbrandProblem, atoms: &[Formula]) -> Vec<Instance> {
    let patterns: Vec<Formula> = p.herbrand_matrix.atoms();
    let mut found: BTreeSet<Vec<TermKey>> = BTreeSet::new();
    let mut out = Vec::new();
    fn go(
        i: usize,
        patterns: &[Formula],
        atoms: &[Formula],
        env: &mut BTreeMap<String, Term>,
        p: &HerbrandProblem,
        found: &mut BTreeSet<Vec<TermKey>>,
        out: &mut Vec<Instance>,
    ) {
        if i == patterns.len() {
            let tuple: Vec<Term> =
                p.exist_vars.iter().map(|x| env.get(x).cloned().unwrap_or_else(|| p.default_term.clone())).collect();
            if found.insert(tuple.iter().cloned().map(TermKey).collect()) {
                out.push(Instance { formula: p.instance(&tuple), tuple });
            }
            return;
        }
        let Formula::Atom(pred, pargs) = &patterns[i] else { unreachable!() };
        for a in atoms {
            let Formula::Atom(q, args) = a else { continue };
            if q != pred || args.len() != pargs.len() {
                continue;
            }
            let mut env2 = env.clone();
            if pargs.iter().zip(args).all(|(x, y)| match_term(x, y, &mut env2)) {
                go(i + 1, patterns, atoms, &mut env2, p, found, out);
            }
        }
    }
    go(0, &patterns, atoms, &mut BTreeMap::new(), p, &mut found, &mut out);
    out.sort_by(|a, b| {
        a.tuple.iter().zip(&b.tuple).map(|(x, y)| x.enum_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Term ordered by the enumeration order, for use in sets.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TermKey(Term);

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.enum_cmp(&other.0)
    }
}

/// A weak linear order of `bot, C_1, ..., C_level, top` with `bot` in the
/// lowest class and `top` in the highest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    /// Class index of `C_{i+1}`.
    pub rank: Vec<u32>,
    /// Number of classes, at least 2.
    pub classes: u32,
}

impl Constraint {
    pub fn root() -> Constraint {
        Constraint { rank: vec![], classes: 2 }
    }

    pub fn level(&self) -> usize {
        self.rank.len()
    }

    /// Every placement of the next atom: into each class, or into a new
    /// class between two neighbours. With `max_classes`, children with more
    /// classes are dropped.
    pub fn extend(&self, max_classes: Option<usize>) -> Vec<Constraint> {
        let mut out = Vec::new();
        for i in 0..self.classes {
            let mut join = self.clone();
            join.rank.push(i);
            out.push(join);
            if i + 1 < self.classes && max_classes.is_none_or(|n| (self.classes as usize) < n) {
                let mut split = Constraint {
                    rank: self.rank.iter().map(|&r| if r > i { r + 1 } else { r }).collect(),
                    classes: self.classes + 1,
                };
                split.rank.push(i + 1);
                out.push(split);
            }
        }
        out
    }

    /// The constraint on one atom fewer.
    pub fn restrict(&self) -> Constraint {
        let mut rank = self.rank.clone();
        let Some(last) = rank.pop() else { return self.clone() };
        let interior = last > 0 && last + 1 < self.classes;
        if interior && !rank.contains(&last) {
            let rank = rank.into_iter().map(|r| if r > last { r - 1 } else { r }).collect();
            Constraint { rank, classes: self.classes - 1 }
        } else {
            Constraint { rank, classes: self.classes }
        }
    }

    /// Class `i` of `k` goes to `i/(k-1)`.
    pub fn representative(&self) -> Vec<Q> {
        let k = self.classes as i64 - 1;
        self.rank.iter().map(|&r| q(r as i64, k)).collect()
    }

    /// Whether `f`, over atoms `atoms[i]` placed by `rank[i]`, takes value 1
    /// under every valuation realizing the order.
    pub fn forces(&self, f: &Formula, atoms: &[Formula]) -> bool {
        let top = self.classes - 1;
        let rank = |a: &Formula| atoms.iter().position(|b| b == a).map_or(0, |i| self.rank[i]);
        eval_ranks(f, &rank, top) == top
    }

    /// Classes from lowest to highest, atoms named by `atoms`.
    pub fn order(&self, atoms: &[Formula]) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = vec![vec![]; self.classes as usize];
        out[0].push("bot".into());
        for (i, &r) in self.rank.iter().enumerate() {
            out[r as usize].push(atoms[i].to_string());
        }
        out.last_mut().unwrap().push("top".into());
        out
    }
}

/// Evaluates a quantifier-free formula on class ranks.
fn eval_ranks(f: &Formula, rank: &dyn Fn(&Formula) -> u32, top: u32) -> u32 {
    match f {
        Formula::Atom(..) => rank(f),
        Formula::Bot => 0,
        Formula::And(a, b) => eval_ranks(a, rank, top).min(eval_ranks(b, rank, top)),
        Formula::Or(a, b) => eval_ranks(a, rank, top).max(eval_ranks(b, rank, top)),
        Formula::Imp(a, b) => {
            let (x, y) = (eval_ranks(a, rank, top), eval_ranks(b, rank, top));
            if x <= y {
                top
            } else {
                y
            }
        }
        Formula::Forall(..) | Formula::Exists(..) => unreachable!("matrix is quantifier-free"),
    }
}

/// Incremental view of the Herbrand base and the instances per level.
pub struct Tree<'p> {
    pub problem: &'p HerbrandProblem,
    base: BaseEnumerator,
    index: BTreeMap<Formula, usize>,
    instances: Vec<Vec<Instance>>,
}

impl<'p> Tree<'p> {
    pub fn new(problem: &'p HerbrandProblem) -> Tree<'p> {
        Tree { problem, base: BaseEnumerator::new(problem), index: BTreeMap::new(), instances: vec![] }
    }

    /// Atoms `C_1..C_level`, or `None` if the base is smaller.
    pub fn atoms(&mut self, level: usize) -> Option<&[Formula]> {
        if !self.base.ensure(level) {
            return None;
        }
        for (i, a) in self.base.atoms.iter().enumerate().take(level) {
            self.index.entry(a.clone()).or_insert(i);
        }
        Some(&self.base.atoms[..level])
    }

    pub fn instances(&mut self, level: usize) -> &[Instance] {
        while self.instances.len() <= level {
            let l = self.instances.len();
            let atoms = self.atoms(l).map(<[Formula]>::to_vec).unwrap_or_else(|| self.base.atoms.clone());
            self.instances.push(instances_over(self.problem, &atoms));
        }
        &self.instances[level]
    }

    /// Index of the first instance with value 1 under the order, if any.
    pub fn closes(&mut self, c: &Constraint) -> Option<usize> {
        let level = c.level();
        self.instances(level);
        let top = c.classes - 1;
        let index = &self.index;
        let rank = |a: &Formula| c.rank[index[a]];
        self.instances[level].iter().position(|inst| eval_ranks(&inst.formula, &rank, top) == top)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub level: usize,
    pub order: Vec<Vec<String>>,
    /// Position of the closing instance in `disjuncts`.
    pub disjunct: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub formula: String,
    pub mode: String,
    pub disjuncts: Vec<String>,
    pub leaves: Vec<Leaf>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate, HerbrandError> {
        serde_json::from_str(text).map_err(|e| HerbrandError::Certificate(e.to_string()))
    }

    /// Deepest leaf level.
    pub fn depth(&self) -> usize {
        self.leaves.iter().map(|l| l.level).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    Valid(Certificate),
    /// Open branches remain at this level.
    Unknown { level: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct ProverConfig {
    pub mode: Mode,
    pub max_level: usize,
    pub max_nodes: usize,
}

impl ProverConfig {
    pub fn new(mode: Mode, max_level: usize) -> ProverConfig {
        ProverConfig { mode, max_level, max_nodes: DEFAULT_MAX_NODES }
    }
}

/// Grows the semantic tree level by level. Returns a certificate when every
/// branch closes, and `Unknown` when `max_level` is reached with open
/// branches. It never claims invalidity.
pub fn prove_prenex(a: &Formula, cfg: ProverConfig) -> Result<ProofOutcome, HerbrandError> {
    let problem = herbrand_form(a)?;
    let mut tree = Tree::new(&problem);
    let max_classes = match cfg.mode {
        Mode::Uncountable => None,
        Mode::Finite(n) => Some(n),
    };
    let mut disjuncts: Vec<Formula> = Vec::new();
    let mut leaves = Vec::new();
    let mut open: VecDeque<Constraint> = VecDeque::from([Constraint::root()]);
    let mut nodes = 1usize;
    let mut level = 0;
    loop {
        let mut next = VecDeque::new();
        for c in open {
            if let Some(i) = tree.closes(&c) {
                let inst = tree.instances(level)[i].formula.clone();
                let d = match disjuncts.iter().position(|x| *x == inst) {
                    Some(d) => d,
                    None => {
                        disjuncts.push(inst);
                        disjuncts.len() - 1
                    }
                };
                let atoms = tree.atoms(level).expect("level already enumerated");
                leaves.push(Leaf { level, order: c.order(atoms), disjunct: d });
            } else {
                next.push_back(c);
            }
        }
        if next.is_empty() {
            let cert = Certificate {
                formula: a.to_string(),
                mode: cfg.mode.to_string(),
                disjuncts: disjuncts.iter().map(Formula::to_string).collect(),
                leaves,
            };
            return Ok(ProofOutcome::Valid(cert));
        }
        if level >= cfg.max_level || tree.atoms(level + 1).is_none() {
            return Ok(ProofOutcome::Unknown { level });
        }
        let mut children = VecDeque::new();
        for c in next {
            for child in c.extend(max_classes) {
                nodes += 1;
                if nodes > cfg.max_nodes {
                    return Err(HerbrandError::Budget(cfg.max_nodes));
                }
                children.push_back(child);
            }
        }
        open = children;
        level += 1;
    }
}

/// Right-nested disjunction; a single formula is returned as is.
pub fn right_disjunction(parts: &[Formula]) -> Formula {
    let mut it = parts.iter().rev();
    let last = it.next().cloned().unwrap_or(Formula::Bot);
    it.fold(last, |acc, d| Formula::or(d.clone(), acc))
}

/// Checks a certificate independently of the tree: every disjunct must be
/// an instance of the Herbrand matrix of the stated formula, and their
/// disjunction must be valid in LC (uncountable mode) or `G_n`.
pub fn verify_certificate(cert: &Certificate) -> Result<bool, HerbrandError> {
    let a = parse(&cert.formula)?;
    let problem = herbrand_form(&a)?;
    let mode: Mode = cert.mode.parse()?;
    if cert.disjuncts.is_empty() {
        return Ok(false);
    }
    let mut ds = Vec::new();
    for d in &cert.disjuncts {
        let f = parse(d)?;
        if !is_instance(&problem, &f) {
            return Ok(false);
        }
        ds.push(f);
    }
    if cert.leaves.iter().any(|l| l.disjunct >= ds.len()) {
        return Ok(false);
    }
    Ok(decide(&right_disjunction(&ds), mode.logic(), crate::decide::DEFAULT_BUDGET)?.is_valid())
}

fn is_instance(p: &HerbrandProblem, f: &Formula) -> bool {
    fn go(pat: &Formula, g: &Formula, env: &mut BTreeMap<String, Term>) -> bool {
        match (pat, g) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, env))
            }
            (Formula::Bot, Formula::Bot) => true,
            (Formula::And(a, b), Formula::And(c, d))
            | (Formula::Or(a, b), Formula::Or(c, d))
            | (Formula::Imp(a, b), Formula::Imp(c, d)) => go(a, c, env) && go(b, d, env),
            _ => false,
        }
    }
    let mut env = BTreeMap::new();
    go(&p.herbrand_matrix, f, &mut env) && env.values().all(Term::is_ground) && f.free_vars().is_empty()
}

// ---------------------------------------------------------------------------
// Reassembly into the original formula

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceRule {
    /// `A | B  ⊢  B | A`
    Commute,
    /// `(A | B) | C  ⊢  A | (B | C)`
    Associate,
    /// `A | (B | B)  ⊢  A | B`, and `B | B ⊢ B` for a two-element disjunction.
    Contract,
    /// `A(y)  ⊢  forall x. A(x)`
    Generalize,
    /// `A(t)  ⊢  exists x. A(x)`
    Witness,
    /// `forall x. (A(x) | B)  ⊢  (forall x. A(x)) | B`
    ForallOut,
    /// `exists x. (A(x) | B)  ⊢  (exists x. A(x)) | B`
    ExistsOut,
    /// Replaces a Skolem term occurring nowhere else by a fresh variable.
    Abstract,
}

impl TraceRule {
    /// Number in the standard list of disjunction and quantifier rules;
    /// abstraction has none.
    pub fn number(self) -> Option<u8> {
        Some(match self {
            TraceRule::Commute => 1,
            TraceRule::Associate => 2,
            TraceRule::Contract => 3,
            TraceRule::Generalize => 4,
            TraceRule::Witness => 5,
            TraceRule::ForallOut => 6,
            TraceRule::ExistsOut => 7,
            TraceRule::Abstract => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: TraceRule,
    /// Number of right steps along the disjunction spine to the rewritten
    /// subformula.
    pub position: usize,
    /// Witness term for `Witness`, abstracted term for `Abstract`.
    pub term: Option<Term>,
    /// Variable for `Generalize` and `Abstract`.
    pub var: Option<String>,
    /// The whole formula after this step.
    pub result: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Formula,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn end(&self) -> &Formula {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }
}

fn at_spine(f: &Formula, pos: usize) -> Option<&Formula> {
    let mut cur = f;
    for _ in 0..pos {
        match cur {
            Formula::Or(_, b) => cur = b,
            _ => return None,
        }
    }
    Some(cur)
}

fn replace_spine(f: &Formula, pos: usize, new: Formula) -> Option<Formula> {
    if pos == 0 {
        return Some(new);
    }
    match f {
        Formula::Or(a, b) => Some(Formula::or((**a).clone(), replace_spine(b, pos - 1, new)?)),
        _ => None,
    }
}

/// Whether `after` follows from `before` by one application of the rule.
fn rule_instance(step: &TraceStep, before: &Formula, after: &Formula, skolem: &dyn Fn(&str) -> bool) -> bool {
    use Formula::*;
    match step.rule {
        TraceRule::Commute => matches!((before, after), (Or(a, b), Or(c, d)) if a == d && b == c),
        TraceRule::Associate => match (before, after) {
            (Or(ab, c), Or(a2, bc)) => match (&**ab, &**bc) {
                (Or(a, b), Or(b2, c2)) => a == a2 && b == b2 && c == c2,
                _ => false,
            },
            _ => false,
        },
        TraceRule::Contract => match (before, after) {
            (Or(a, bb), Or(a2, b2)) if a == a2 && matches!(&**bb, Or(x, y) if x == y && x == b2) => true,
            (Or(x, y), b) => x == y && &**x == b,
            _ => false,
        },
        TraceRule::Generalize => match (after, &step.var) {
            (Forall(x, body), Some(y)) => {
                !after.is_free(y) && body.substitute(x, &Term::var(y)) == *before
            }
            _ => false,
        },
        TraceRule::Witness => match (after, &step.term) {
            (Exists(x, body), Some(t)) => body.substitute(x, t) == *before,
            _ => false,
        },
        TraceRule::ForallOut | TraceRule::ExistsOut => match (before, after) {
            (Forall(x, ab), Or(qa, b2)) | (Exists(x, ab), Or(qa, b2))
                if matches!(before, Forall(..)) == (step.rule == TraceRule::ForallOut) =>
            {
                let Or(a, b) = &**ab else { return false };
                let quantified = if step.rule == TraceRule::ForallOut {
                    Formula::forall(x, (**a).clone())
                } else {
                    Formula::exists(x, (**a).clone())
                };
                b == b2 && !b.is_free(x) && **qa == quantified
            }
            _ => false,
        },
        TraceRule::Abstract => match (&step.term, &step.var) {
            (Some(t @ Term::App(f, _)), Some(y)) => {
                t.is_ground()
                    && skolem(f)
                    && !before.is_free(y)
                    && after.substitute(y, t) == *before
                    && !formula_contains_term(after, t)
            }
            _ => false,
        },
    }
}

/// Checks every step of a trace syntactically.
pub fn verify_trace(trace: &Trace, skolem: &dyn Fn(&str) -> bool) -> Result<(), HerbrandError> {
    let mut cur = &trace.start;
    for (i, step) in trace.steps.iter().enumerate() {
        let err = |m: &str| HerbrandError::Trace(format!("step {}: {m}", i + 1));
        let before = at_spine(cur, step.position).ok_or_else(|| err("position off the disjunction spine"))?;
        let after = at_spine(&step.result, step.position).ok_or_else(|| err("position off the result spine"))?;
        if replace_spine(cur, step.position, after.clone()).as_ref() != Some(&step.result) {
            return Err(err("result changes more than the rewritten subformula"));
        }
        if !rule_instance(step, before, after, skolem) {
            return Err(err(&format!("not an instance of {:?}", step.rule)));
        }
        cur = &step.result;
    }
    Ok(())
}

struct Reassembler<'p> {
    p: &'p HerbrandProblem,
    /// Per disjunct: values for the first `level` prefix variables.
    values: Vec<Vec<Term>>,
    levels: Vec<usize>,
    steps: Vec<TraceStep>,
    current: Formula,
}

impl Reassembler<'_> {
    /// `Q_{l+1} x_{l+1} ... B` with the first `l` prefix variables replaced.
    fn build(&self, vals: &[Term], l: usize) -> Formula {
        let mut body = self.p.matrix.clone();
        for ((_, x), t) in self.p.prefix.iter().zip(vals).take(l) {
            body = body.substitute(x, t);
        }
        self.p.prefix[l..].iter().rev().fold(body, |f, (qt, x)| qt.bind(x, f))
    }

    fn disjuncts(&self) -> Vec<Formula> {
        (0..self.values.len()).map(|i| self.build(&self.values[i], self.levels[i])).collect()
    }

    fn push(&mut self, rule: TraceRule, position: usize, term: Option<Term>, var: Option<String>, result: Formula) {
        self.current = result.clone();
        self.steps.push(TraceStep { rule, position, term, var, result });
    }

    fn rewrite(&mut self, rule: TraceRule, position: usize, new_sub: Formula) {
        let result = replace_spine(&self.current, position, new_sub).expect("position on spine");
        self.push(rule, position, None, None, result);
    }

    /// Swaps disjuncts `i` and `i + 1`.
    fn swap(&mut self, i: usize) {
        let m = self.values.len();
        let ds = self.disjuncts();
        if i + 2 == m {
            self.rewrite(TraceRule::Commute, i, Formula::or(ds[i + 1].clone(), ds[i].clone()));
        } else {
            // A | (B | R)  ⊢  (B | R) | A  ⊢  B | (R | A)  ⊢  B | (A | R)
            let (a, b) = (ds[i].clone(), ds[i + 1].clone());
            let r = right_disjunction(&ds[i + 2..]);
            self.rewrite(TraceRule::Commute, i, Formula::or(Formula::or(b.clone(), r.clone()), a.clone()));
            self.rewrite(TraceRule::Associate, i, Formula::or(b.clone(), Formula::or(r.clone(), a.clone())));
            self.rewrite(TraceRule::Commute, i + 1, Formula::or(a, r));
        }
        self.values.swap(i, i + 1);
        self.levels.swap(i, i + 1);
    }

    fn move_to(&mut self, from: usize, to: usize) {
        let mut i = from;
        while i > to {
            self.swap(i - 1);
            i -= 1;
        }
        while i < to {
            self.swap(i);
            i += 1;
        }
    }

    fn contract_duplicates(&mut self) {
        loop {
            let ds = self.disjuncts();
            let dup = (0..ds.len()).find_map(|i| ((i + 1)..ds.len()).find(|&j| ds[i] == ds[j]).map(|j| (i, j)));
            let Some((i, j)) = dup else { return };
            let m = ds.len();
            self.move_to(j, m - 1);
            self.move_to(i, m - 2);
            let b = ds[i].clone();
            if m == 2 {
                self.rewrite(TraceRule::Contract, 0, b);
            } else {
                let ds = self.disjuncts();
                self.rewrite(TraceRule::Contract, m - 3, Formula::or(ds[m - 3].clone(), b));
            }
            self.values.pop();
            self.levels.pop();
        }
    }

    /// Introduces the quantifier for variable `levels[0]` of the front
    /// disjunct, over the whole formula, then moves it onto the disjunct.
    fn quantify_front(&mut self, existential: bool) {
        let l = self.levels[0];
        let (qt, x) = self.p.prefix[l - 1].clone();
        debug_assert_eq!(qt == Quant::Exists, existential);
        let t = self.values[0][l - 1].clone();
        let mut vals = self.values[0].clone();
        vals[l - 1] = Term::var(&x);
        let open = self.build(&vals, l);
        let rest: Vec<Formula> = self.disjuncts()[1..].to_vec();
        let body = if rest.is_empty() { open.clone() } else { Formula::or(open.clone(), right_disjunction(&rest)) };
        if existential {
            self.push(TraceRule::Witness, 0, Some(t), None, Formula::exists(&x, body));
        } else {
            self.push(TraceRule::Abstract, 0, Some(t), Some(x.clone()), body.clone());
            self.push(TraceRule::Generalize, 0, None, Some(x.clone()), Formula::forall(&x, body));
        }
        self.values[0].truncate(l - 1);
        self.levels[0] = l - 1;
        if !rest.is_empty() {
            let rule = if existential { TraceRule::ExistsOut } else { TraceRule::ForallOut };
            let whole = right_disjunction(&self.disjuncts());
            self.push(rule, 0, None, None, whole);
        }
    }

    fn run(&mut self) -> Result<(), HerbrandError> {
        loop {
            self.contract_duplicates();
            if self.levels.iter().all(|&l| l == 0) {
                return Ok(());
            }
            let exist = (0..self.levels.len())
                .find(|&i| self.levels[i] > 0 && self.p.prefix[self.levels[i] - 1].0 == Quant::Exists);
            if let Some(i) = exist {
                self.move_to(i, 0);
                self.quantify_front(true);
                continue;
            }
            // universal: take a Skolem term that occurs nowhere else
            let ds = self.disjuncts();
            let mut cands: Vec<usize> = (0..ds.len()).filter(|&i| self.levels[i] > 0).collect();
            cands.sort_by(|&i, &j| {
                let ti = &self.values[i][self.levels[i] - 1];
                let tj = &self.values[j][self.levels[j] - 1];
                tj.size().cmp(&ti.size()).then(self.levels[j].cmp(&self.levels[i])).then(i.cmp(&j))
            });
            let pick = cands.into_iter().find(|&i| {
                let l = self.levels[i];
                let t = &self.values[i][l - 1];
                let mut vals = self.values[i].clone();
                vals[l - 1] = Term::var(&self.p.prefix[l - 1].1);
                !formula_contains_term(&self.build(&vals, l), t)
                    && ds.iter().enumerate().all(|(j, d)| j == i || !formula_contains_term(d, t))
            });
            let Some(i) = pick else {
                return Err(HerbrandError::Trace("no Skolem term can be abstracted".into()));
            };
            self.move_to(i, 0);
            self.quantify_front(false);
        }
    }
}

/// Rebuilds the original prenex formula from a certificate's disjunction
/// with the disjunction and quantifier rules, plus abstraction of Skolem
/// terms. The trace is verified step by step before it is returned.
pub fn reassemble(cert: &Certificate) -> Result<Trace, HerbrandError> {
    let a = parse(&cert.formula)?;
    let p = herbrand_form(&a)?;
    let mut values = Vec::new();
    for d in &cert.disjuncts {
        let f = parse(d)?;
        let tuple = instance_tuple(&p, &f)
            .ok_or_else(|| HerbrandError::Trace(format!("`{d}` is not an instance of the Herbrand matrix")))?;
        // full prefix values: existential terms and the Skolem terms they induce
        let mut full = Vec::new();
        let mut exist = Vec::new();
        let mut ei = 0;
        for (qt, _) in &p.prefix {
            match qt {
                Quant::Exists => {
                    exist.push(tuple[ei].clone());
                    full.push(tuple[ei].clone());
                    ei += 1;
                }
                Quant::Forall => {
                    let sk = &p.skolem[full.len() - exist.len()];
                    full.push(Term::app(&sk.name, exist.clone()));
                }
            }
        }
        values.push(full);
    }
    let n = p.prefix.len();
    let levels = vec![n; values.len()];
    let mut r = Reassembler { p: &p, values, levels, steps: vec![], current: Formula::Bot };
    let start = right_disjunction(&r.disjuncts());
    r.current = start.clone();
    r.run()?;
    let trace = Trace { start, steps: r.steps };
    verify_trace(&trace, &|f| p.is_skolem(f))?;
    if !trace.end().alpha_eq(&a) {
        return Err(HerbrandError::Trace(format!("ended at `{}`, not the input formula", trace.end())));
    }
    let first = right_disjunction(&cert.disjuncts.iter().map(|d| parse(d)).collect::<Result<Vec<_>, _>>()?);
    if trace.start != first {
        return Err(HerbrandError::Trace("trace does not start at the certificate disjunction".into()));
    }
    Ok(trace)
}

fn instance_tuple(p: &HerbrandProblem, f: &Formula) -> Option<Vec<Term>> {
    let mut env = BTreeMap::new();
    fn go(pat: &Formula, g: &Formula, env: &mut BTreeMap<String, Term>) -> bool {
        match (pat, g) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, env))
            }
            (Formula::Bot, Formula::Bot) => true,
            (Formula::And(a, b), Formula::And(c, d))
            | (Formula::Or(a, b), Formula::Or(c, d))
            | (Formula::Imp(a, b), Formula::Imp(c, d)) => go(a, c, env) && go(b, d, env),
            _ => false,
        }
    }
    if !go(&p.herbrand_matrix, f, &mut env) {
        return None;
    }
    Some(p.exist_vars.iter().map(|x| env.get(x).cloned().unwrap_or_else(|| p.default_term.clone())).collect())
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.rule.number() {
            Some(n) => format!("({n})"),
            None => "(abstract)".into(),
        };
        write!(f, "{label} at {}: {}", self.position, self.result)
    }
}
