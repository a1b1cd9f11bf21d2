//! Formula-to-formula reductions: the finite-model reductions `A^g` and
//! `A^h`, the bottom-free translation `A*`, the forall-free shift, and
//! prenexing of formulas whose non-admissible shifts only touch crisp parts.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{fresh_name, Formula, FormulaError, Quant, Signature, Term};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("formula is not closed")]
    NotClosed,
    #[error("input already uses reserved symbol(s) {0:?}")]
    SignatureClash(Vec<String>),
    #[error("expected a formula of the form `forall x... A -> B` with A and B forall-free: {0}")]
    Shape(String),
    #[error("cannot prenex `{subformula}` without shift {shift} ({law})")]
    Inadmissible { subformula: String, shift: &'static str, law: &'static str },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Output of the finite-model reductions.
#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub formula: Formula,
    /// The relativized, double-negated copy of the input.
    pub relativized: Formula,
    /// Symbols introduced by the construction.
    pub fresh: Signature,
    pub note: &'static str,
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn nn(f: Formula) -> Formula {
    Formula::neg(Formula::neg(f))
}

fn forall_all(vars: &[&str], body: Formula) -> Formula {
    vars.iter().rev().fold(body, |f, x| Formula::forall(x, f))
}

fn zero_t() -> Term {
    Term::constant("zero")
}

fn succ(t: Term) -> Term {
    Term::app("s", vec![t])
}

fn le(a: Term, b: Term) -> Formula {
    Formula::atom("Le", vec![a, b])
}

/// The arithmetic part: `0 <= i`, `i <= s(i)`, transitivity, and
/// `not s(i) <= 0`, atoms double-negated.
fn standard_axioms() -> Formula {
    Formula::conj(vec![
        Formula::forall("i", nn(le(zero_t(), v("i")))),
        Formula::forall("i", nn(le(v("i"), succ(v("i"))))),
        forall_all(
            &["i", "j", "k"],
            Formula::imp(
                Formula::and(nn(le(v("i"), v("j"))), nn(le(v("j"), v("k")))),
                nn(le(v("i"), v("k"))),
            ),
        ),
        Formula::forall("i", Formula::neg(le(succ(v("i")), zero_t()))),
    ])
}

fn check_fresh(a: &Formula, reserved: &[&str]) -> Result<Signature, TransformError> {
    if !a.is_closed() {
        return Err(TransformError::NotClosed);
    }
    let sig = a.signature()?;
    let clash: Vec<String> = reserved.iter().filter(|r| sig.uses_name(r)).map(|r| r.to_string()).collect();
    if clash.is_empty() {
        Ok(sig)
    } else {
        Err(TransformError::SignatureClash(clash))
    }
}

/// Double-negates atoms and relativizes quantifiers to `rel(v)`.
fn relativize(a: &Formula, rel: &dyn Fn(&str) -> Formula) -> Formula {
    match a {
        Formula::Atom(..) => nn(a.clone()),
        Formula::Bot => Formula::Bot,
        Formula::And(x, y) => Formula::and(relativize(x, rel), relativize(y, rel)),
        Formula::Or(x, y) => Formula::or(relativize(x, rel), relativize(y, rel)),
        Formula::Imp(x, y) => Formula::imp(relativize(x, rel), relativize(y, rel)),
        Formula::Forall(x, b) => Formula::forall(x, Formula::imp(rel(x), relativize(b, rel))),
        Formula::Exists(x, b) => Formula::exists(x, Formula::and(rel(x), relativize(b, rel))),
    }
}

/// `y` strictly above `x` in the order coded by the unary `P`:
/// `(P(y) -> P(x)) -> P(y)`.
fn prec_g(x: Term, y: Term) -> Formula {
    let p = |t: Term| Formula::atom("P", vec![t]);
    Formula::imp(Formula::imp(p(y.clone()), p(x)), p(y))
}

fn mem_g(x: Term, y: Term) -> Formula {
    nn(Formula::atom("L", vec![x, y]))
}

fn prec_h(x: Term, y: Term, l: &Term) -> Formula {
    let p = |t: Term| Formula::atom("P", vec![t, l.clone()]);
    Formula::imp(Formula::imp(p(y.clone()), p(x)), p(y))
}

fn mem_h(x: Term, y: Term, l: &Term) -> Formula {
    nn(Formula::atom("L", vec![x, y, l.clone()]))
}

const RESERVED_G: [&str; 7] = ["P", "L", "Le", "s", "zero", "c1", "c2"];
const RESERVED_H: [&str; 6] = ["P", "L", "Q", "Le", "s", "zero"];

fn inventory(preds: &[(&str, usize)], funcs: &[(&str, usize)]) -> Signature {
    Signature {
        preds: preds.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
        funcs: funcs.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
    }
}

/// Builds `A^g`, valid over a countably infinite truth-value set iff `A`
/// holds in every finite classical structure.
pub fn to_ag(a: &Formula) -> Result<ReductionOutput, TransformError> {
    check_fresh(a, &RESERVED_G)?;
    let avoid = a.all_vars();
    let w = fresh_name("w", &avoid);
    let rel = |x: &str| Formula::exists(&w, mem_g(v(&w), v(x)));
    let a1 = relativize(a, &rel);

    let (c1, c2) = (Term::constant("c1"), Term::constant("c2"));
    let d = Formula::imp(
        Formula::conj(vec![
            le(v("j"), v("i")),
            mem_g(v("x"), v("j")),
            le(v("k"), v("i")),
            mem_g(v("y"), v("k")),
            prec_g(v("x"), v("y")),
        ]),
        Formula::conj(vec![
            mem_g(v("z"), succ(v("i"))),
            prec_g(v("x"), v("z")),
            prec_g(v("z"), v("y")),
        ]),
    );
    let density = Formula::forall(
        "i",
        Formula::or(
            forall_all(&["x", "y", "j", "k"], Formula::exists("z", d)),
            Formula::forall("x", Formula::neg(mem_g(v("x"), succ(v("i"))))),
        ),
    );
    let antecedent = Formula::conj(vec![
        standard_axioms(),
        mem_g(c1.clone(), zero_t()),
        mem_g(c2.clone(), zero_t()),
        prec_g(c2, c1),
        density,
    ]);
    let consequent = Formula::or(a1.clone(), Formula::exists("u", Formula::atom("P", vec![v("u")])));
    Ok(ReductionOutput {
        formula: Formula::imp(antecedent, consequent),
        relativized: a1,
        fresh: inventory(&[("P", 1), ("L", 2), ("Le", 2)], &[("zero", 0), ("s", 1), ("c1", 0), ("c2", 0)]),
        note: "A^g: finite-model validity of A reduced to validity over a countably infinite truth-value set",
    })
}

/// Builds `A^h`, the variant for uncountable sets where 0 is neither
/// isolated nor in the perfect kernel: one level structure per `l`, below
/// a descending sequence `Q(l)`.
pub fn to_ah(a: &Formula) -> Result<ReductionOutput, TransformError> {
    check_fresh(a, &RESERVED_H)?;
    let avoid = a.all_vars();
    let w = fresh_name("w", &avoid);
    let i = fresh_name("i", &avoid);
    let rel = |x: &str| Formula::forall(&i, Formula::exists(&w, mem_h(v(&w), v(&i), &v(x))));
    let a1 = relativize(a, &rel);

    let l = v("l");
    let q = |t: Term| Formula::atom("Q", vec![t]);
    let e = Formula::imp(
        Formula::conj(vec![
            le(v("j"), v("i")),
            mem_h(v("x"), v("j"), &l),
            le(v("k"), v("i")),
            mem_h(v("y"), v("k"), &l),
            prec_h(v("x"), v("y"), &l),
        ]),
        Formula::conj(vec![
            mem_h(v("z"), succ(v("i")), &l),
            prec_h(v("x"), v("z"), &l),
            prec_h(v("z"), v("y"), &l),
        ]),
    );
    let antecedent = Formula::conj(vec![
        standard_axioms(),
        Formula::forall("l", Formula::imp(Formula::imp(q(succ(l.clone())), q(l.clone())), q(succ(l.clone())))),
        Formula::neg(Formula::forall("l", q(l.clone()))),
        Formula::exists("l", Formula::neg(q(l.clone()))),
        forall_all(
            &["l", "x"],
            Formula::imp(Formula::imp(q(l.clone()), Formula::atom("P", vec![v("x"), l.clone()])), q(l.clone())),
        ),
        Formula::forall(
            "l",
            Formula::exists(
                "x",
                Formula::exists(
                    "y",
                    Formula::conj(vec![
                        mem_h(v("x"), zero_t(), &l),
                        mem_h(v("y"), zero_t(), &l),
                        prec_h(v("x"), v("y"), &l),
                    ]),
                ),
            ),
        ),
        forall_all(
            &["l", "i"],
            Formula::or(
                forall_all(&["x", "y", "j", "k"], Formula::exists("z", e)),
                Formula::forall("x", Formula::neg(mem_h(v("x"), succ(v("i")), &l))),
            ),
        ),
    ]);
    let consequent = Formula::disj(vec![
        a1.clone(),
        Formula::exists("l", Formula::exists("u", Formula::atom("P", vec![v("u"), l.clone()]))),
        Formula::exists("l", q(l.clone())),
    ]);
    Ok(ReductionOutput {
        formula: Formula::imp(antecedent, consequent),
        relativized: a1,
        fresh: inventory(&[("P", 2), ("L", 3), ("Q", 1), ("Le", 2)], &[("zero", 0), ("s", 1)]),
        note: "A^h: finite-model validity of A reduced to validity over an uncountable set with 0 outside the kernel and not isolated",
    })
}

/// `A*`: bottom replaced by a fresh letter `B0`, guarded by `B0 -> P(x...)`
/// for every predicate of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BotFree {
    pub formula: Formula,
    /// Name of the letter standing for bottom.
    pub letter: String,
    /// Whether `formula` has the guard antecedent.
    pub guarded: bool,
}

impl BotFree {
    /// Puts bottom back for the letter and drops the guards, each of which
    /// becomes an instance of `bot -> A`.
    pub fn restore(&self) -> Formula {
        let body = match (&self.formula, self.guarded) {
            (Formula::Imp(_, b), true) => (**b).clone(),
            (f, _) => f.clone(),
        };
        body.map_atoms(&mut |p, args| {
            if p == self.letter && args.is_empty() {
                Formula::Bot
            } else {
                Formula::Atom(p.to_string(), args.to_vec())
            }
        })
    }
}

fn replace_bot(f: &Formula, b: &Formula) -> Formula {
    match f {
        Formula::Bot => b.clone(),
        Formula::Atom(..) => f.clone(),
        Formula::And(x, y) => Formula::and(replace_bot(x, b), replace_bot(y, b)),
        Formula::Or(x, y) => Formula::or(replace_bot(x, b), replace_bot(y, b)),
        Formula::Imp(x, y) => Formula::imp(replace_bot(x, b), replace_bot(y, b)),
        Formula::Forall(x, a) => Formula::forall(x, replace_bot(a, b)),
        Formula::Exists(x, a) => Formula::exists(x, replace_bot(a, b)),
    }
}

pub fn to_bot_free(a: &Formula) -> Result<BotFree, TransformError> {
    let sig = a.signature()?;
    let mut names: BTreeSet<String> = sig.preds.keys().chain(sig.funcs.keys()).cloned().collect();
    names.extend(a.all_vars());
    let letter = fresh_name("B0", &names);
    let b = Formula::prop(&letter);
    let ab = replace_bot(a, &b);
    let guards: Vec<Formula> = sig
        .preds
        .iter()
        .map(|(p, &k)| {
            let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
            let atom = Formula::atom(p, xs.iter().map(|x| v(x)).collect());
            xs.iter().rev().fold(Formula::imp(b.clone(), atom), |f, x| Formula::forall(x, f))
        })
        .collect();
    if guards.is_empty() {
        return Ok(BotFree { formula: ab, letter, guarded: false });
    }
    Ok(BotFree { formula: Formula::imp(Formula::conj(guards), ab), letter, guarded: true })
}

/// `forall x... A(x...) -> B` becomes `exists x... (A(x...) -> B)`. The
/// result implies the input everywhere; the two are equally often valid
/// when `A` and `B` are forall-free.
pub fn forall_free_shift(f: &Formula) -> Result<Formula, TransformError> {
    let Formula::Imp(ant, b) = f else {
        return Err(TransformError::Shape("not a conditional".into()));
    };
    let mut vars = Vec::new();
    let mut body = &**ant;
    while let Formula::Forall(x, inner) = body {
        vars.push(x.clone());
        body = inner;
    }
    if vars.is_empty() {
        return Err(TransformError::Shape("antecedent has no universal prefix".into()));
    }
    if body.contains_forall() || b.contains_forall() {
        return Err(TransformError::Shape("antecedent matrix or consequent contains forall".into()));
    }
    let mut avoid = f.all_vars();
    let mut body = body.clone();
    let mut names = Vec::new();
    for x in &vars {
        if b.is_free(x) {
            let y = fresh_name(x, &avoid);
            avoid.insert(y.clone());
            body = body.substitute(x, &v(&y));
            names.push(y);
        } else {
            names.push(x.clone());
        }
    }
    Ok(names.iter().rev().fold(Formula::imp(body, (**b).clone()), |g, x| Formula::exists(x, g)))
}

// ---------------------------------------------------------------------------
// Prenexing

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftKind {
    /// An equivalence in every Goedel logic.
    Equivalence,
    /// Equivalent because both sides are crisp.
    Crisp,
    /// The result implies the input but not conversely.
    Weakening,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shift {
    /// E.g. `(forall x A) -> B  ~>  exists x (A -> B)`.
    pub law: &'static str,
    pub var: String,
    pub kind: ShiftKind,
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ShiftKind::Equivalence => "equivalence",
            ShiftKind::Crisp => "crisp",
            ShiftKind::Weakening => "one-way",
        };
        write!(f, "{} [{}, {kind}]", self.law, self.var)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrenexOutput {
    pub formula: Formula,
    pub shifts: Vec<Shift>,
}

impl PrenexOutput {
    /// Whether every shift used was an equivalence.
    pub fn is_equivalent(&self) -> bool {
        self.shifts.iter().all(|s| s.kind != ShiftKind::Weakening)
    }
}

/// Renames bound variables so that each binder is distinct and different
/// from every free variable; names are kept where already unique.
fn rename_apart(f: &Formula) -> Formula {
    fn go(f: &Formula, seen: &mut BTreeSet<String>, all: &mut BTreeSet<String>) -> Formula {
        match f {
            Formula::Atom(..) | Formula::Bot => f.clone(),
            Formula::And(a, b) => Formula::and(go(a, seen, all), go(b, seen, all)),
            Formula::Or(a, b) => Formula::or(go(a, seen, all), go(b, seen, all)),
            Formula::Imp(a, b) => Formula::imp(go(a, seen, all), go(b, seen, all)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let (x2, body) = if seen.contains(x) {
                    let y = fresh_name(x, all);
                    all.insert(y.clone());
                    (y.clone(), a.substitute(x, &v(&y)))
                } else {
                    ((*x).clone(), (**a).clone())
                };
                seen.insert(x2.clone());
                let body = go(&body, seen, all);
                match f {
                    Formula::Forall(..) => Formula::forall(&x2, body),
                    _ => Formula::exists(&x2, body),
                }
            }
        }
    }
    let mut seen = f.free_vars();
    let mut all = f.all_vars();
    go(f, &mut seen, &mut all)
}

struct Prenexer {
    allow_weakening: bool,
    shifts: Vec<Shift>,
}

type Prefix = Vec<(Quant, String)>;

fn rebuild(prefix: &[(Quant, String)], matrix: Formula) -> Formula {
    prefix.iter().rev().fold(matrix, |f, (q, x)| q.bind(x, f))
}

impl Prenexer {
    fn equiv(&mut self, law: &'static str, x: &str) {
        self.shifts.push(Shift { law, var: x.to_string(), kind: ShiftKind::Equivalence });
    }

    /// A shift that is only an implication in general; `crisp` says whether
    /// both sides are crisp, `positive` whether the position is positive.
    #[allow(clippy::too_many_arguments)]
    fn one_way(
        &mut self,
        law: &'static str,
        needs: &'static str,
        needs_law: &'static str,
        x: &str,
        crisp: bool,
        positive: bool,
        whole: &Formula,
    ) -> Result<(), TransformError> {
        let kind = if crisp {
            ShiftKind::Crisp
        } else if self.allow_weakening && positive {
            ShiftKind::Weakening
        } else {
            return Err(TransformError::Inadmissible { subformula: whole.to_string(), shift: needs, law: needs_law });
        };
        self.shifts.push(Shift { law, var: x.to_string(), kind });
        Ok(())
    }

    fn run(&mut self, f: &Formula, positive: bool) -> Result<(Prefix, Formula), TransformError> {
        Ok(match f {
            Formula::Atom(..) | Formula::Bot => (vec![], f.clone()),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let q = if matches!(f, Formula::Forall(..)) { Quant::Forall } else { Quant::Exists };
                let (mut p, m) = self.run(a, positive)?;
                p.insert(0, (q, x.clone()));
                (p, m)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let is_and = matches!(f, Formula::And(..));
                let (pa, ma) = self.run(a, positive)?;
                let (pb, mb) = self.run(b, positive)?;
                for (q, x) in pa.iter().chain(&pb) {
                    let law = match (is_and, q) {
                        (true, Quant::Forall) => "(forall x A) & B  ~>  forall x (A & B)",
                        (true, Quant::Exists) => "(exists x A) & B  ~>  exists x (A & B)",
                        (false, Quant::Forall) => "(forall x A) | B  ~>  forall x (A | B)",
                        (false, Quant::Exists) => "(exists x A) | B  ~>  exists x (A | B)",
                    };
                    self.equiv(law, x);
                }
                let m = if is_and { Formula::and(ma, mb) } else { Formula::or(ma, mb) };
                (pa.into_iter().chain(pb).collect(), m)
            }
            Formula::Imp(a, b) => {
                let (pa, ma) = self.run(a, !positive)?;
                let (pb, mb) = self.run(b, positive)?;
                let b_crisp = b.is_crisp();
                let mut prefix = Vec::new();
                for (n, (q, x)) in pa.iter().enumerate() {
                    match q {
                        Quant::Exists => {
                            self.equiv("(exists x A) -> B  ~>  forall x (A -> B)", x);
                            prefix.push((Quant::Forall, x.clone()));
                        }
                        Quant::Forall => {
                            let rest_crisp = ma.is_crisp();
                            let whole = Formula::imp(rebuild(&pa[n..], ma.clone()), (**b).clone());
                            self.one_way(
                                "(forall x A) -> B  ~>  exists x (A -> B)",
                                "S3",
                                "((forall x A) -> B) -> exists x (A -> B)",
                                x,
                                rest_crisp && b_crisp,
                                positive,
                                &whole,
                            )?;
                            prefix.push((Quant::Exists, x.clone()));
                        }
                    }
                }
                for (n, (q, x)) in pb.iter().enumerate() {
                    match q {
                        Quant::Forall => {
                            self.equiv("B -> forall x A  ~>  forall x (B -> A)", x);
                        }
                        Quant::Exists => {
                            let whole = Formula::imp(ma.clone(), rebuild(&pb[n..], mb.clone()));
                            self.one_way(
                                "B -> exists x A  ~>  exists x (B -> A)",
                                "S2",
                                "(B -> exists x A) -> exists x (B -> A)",
                                x,
                                ma.is_crisp() && mb.is_crisp(),
                                positive,
                                &whole,
                            )?;
                        }
                    }
                    prefix.push((*q, x.clone()));
                }
                (prefix, Formula::imp(ma, mb))
            }
        })
    }
}

/// Prenexes `a` using shifts that are equivalences in every Goedel logic,
/// plus the two conditional shifts when both sides are crisp. Anything
/// else is rejected with the shift it would need.
pub fn prenex_crisp(a: &Formula) -> Result<PrenexOutput, TransformError> {
    prenex_with(a, false)
}

/// Like [`prenex_crisp`], but also applies the one-way shifts in positive
/// positions. The result then implies the input, so its validity carries
/// over to the input.
pub fn prenex_weakening(a: &Formula) -> Result<PrenexOutput, TransformError> {
    prenex_with(a, true)
}

fn prenex_with(a: &Formula, allow_weakening: bool) -> Result<PrenexOutput, TransformError> {
    let renamed = rename_apart(a);
    let mut p = Prenexer { allow_weakening, shifts: vec![] };
    let (prefix, matrix) = p.run(&renamed, true)?;
    Ok(PrenexOutput { formula: rebuild(&prefix, matrix), shifts: p.shifts })
}
