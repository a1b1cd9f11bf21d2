//! First-order formulas over `&`, `|`, `->`, `bot`, `forall` and `exists`.
//!
//! Negation and `top` are sugar: `~A` is `A -> bot` and `top` is
//! `bot -> bot`. There are no separate node kinds for them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A first-order term. Constants are 0-ary applications.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn contains_var(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(var)),
        }
    }

    pub fn contains(&self, sub: &Term) -> bool {
        if self == sub {
            return true;
        }
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains(sub)),
        }
    }

    pub fn substitute(&self, var: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => t.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(var, t)).collect())
            }
        }
    }

    /// Replaces every occurrence of the subterm `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::Var(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.replace(from, to)).collect())
            }
        }
    }

    /// Total order used for enumerations: size first, then symbol name,
    /// then arguments left to right.
    pub fn enum_cmp(&self, other: &Term) -> std::cmp::Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| match (self, other) {
                (Term::Var(a), Term::Var(b)) => a.cmp(b),
                (Term::Var(_), Term::App(..)) => std::cmp::Ordering::Less,
                (Term::App(..), Term::Var(_)) => std::cmp::Ordering::Greater,
                (Term::App(f, xs), Term::App(g, ys)) => f.cmp(g).then_with(|| {
                    for (x, y) in xs.iter().zip(ys) {
                        let c = x.enum_cmp(y);
                        if c.is_ne() {
                            return c;
                        }
                    }
                    xs.len().cmp(&ys.len())
                }),
            })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.to_string(), args)
    }

    /// A 0-ary predicate, i.e. a propositional letter.
    pub fn prop(pred: &str) -> Formula {
        Formula::Atom(pred.to_string(), Vec::new())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    pub fn top() -> Formula {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `top` when empty.
    pub fn conj(parts: Vec<Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `bot` when empty.
    pub fn disj(parts: Vec<Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Imp(a, b) if **a == Formula::Bot && **b == Formula::Bot)
    }

    /// The operand of a negation `A -> bot`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(a, b) if **b == Formula::Bot => Some(a),
            _ => None,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Bot => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    pub fn contains_bot(&self) -> bool {
        match self {
            Formula::Bot => true,
            Formula::Atom(..) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_bot() || b.contains_bot()
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.contains_bot(),
        }
    }

    pub fn contains_forall(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Bot => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_forall() || b.contains_forall()
            }
            Formula::Forall(..) => true,
            Formula::Exists(_, a) => a.contains_forall(),
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms and `bot` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Bot => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
        }
    }

    /// Distinct atoms in order of first occurrence (left to right).
    pub fn atoms(&self) -> Vec<Formula> {
        fn go(f: &Formula, seen: &mut BTreeSet<Formula>, out: &mut Vec<Formula>) {
            match f {
                Formula::Atom(..) => {
                    if seen.insert(f.clone()) {
                        out.push(f.clone());
                    }
                }
                Formula::Bot => {}
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    go(a, seen, out);
                    go(b, seen, out);
                }
                Formula::Forall(_, a) | Formula::Exists(_, a) => go(a, seen, out),
            }
        }
        let mut out = Vec::new();
        go(self, &mut BTreeSet::new(), &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|t| t.vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_free(&self, var: &str) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(|t| t.contains_var(var)),
            Formula::Bot => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.is_free(var) || b.is_free(var)
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => x != var && a.is_free(var),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Atom(_, args) => args.iter().for_each(|t| t.vars(&mut out)),
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Atom(..) | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.walk(visit),
        }
    }

    /// Capture-avoiding substitution of `t` for the free occurrences of `var`.
    /// A binder that would capture a variable of `t` is renamed with primes.
    pub fn substitute(&self, var: &str, t: &Term) -> Formula {
        match self {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|a| a.substitute(var, t)).collect())
            }
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.substitute(var, t), b.substitute(var, t)),
            Formula::Or(a, b) => Formula::or(a.substitute(var, t), b.substitute(var, t)),
            Formula::Imp(a, b) => Formula::imp(a.substitute(var, t), b.substitute(var, t)),
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                if x == var || !body.is_free(var) {
                    return self.clone();
                }
                let (x, body) = if t.contains_var(x) {
                    let mut avoid = body.all_vars();
                    t.vars(&mut avoid);
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let renamed = body.substitute(x, &Term::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                let body = Box::new(body.substitute(var, t));
                match self {
                    Formula::Forall(..) => Formula::Forall(x, body),
                    _ => Formula::Exists(x, body),
                }
            }
        }
    }

    /// Replaces every occurrence of the closed term `from` by `to`.
    pub fn replace_term(&self, from: &Term, to: &Term) -> Formula {
        self.map_atoms(&mut |p, args| {
            Formula::Atom(p.to_string(), args.iter().map(|a| a.replace(from, to)).collect())
        })
    }

    /// Rebuilds the formula with every atom replaced by `f(pred, args)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&str, &[Term]) -> Formula) -> Formula {
        match self {
            Formula::Atom(p, args) => f(p, args),
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_atoms(f), b.map_atoms(f)),
            Formula::Forall(x, a) => Formula::Forall(x.clone(), Box::new(a.map_atoms(f))),
            Formula::Exists(x, a) => Formula::Exists(x.clone(), Box::new(a.map_atoms(f))),
        }
    }

    /// True iff every atom occurrence sits directly under `~` or `~~`.
    ///
    /// An atom `P` counts as negated in `P -> bot`; `~~P` is covered by the
    /// same pattern one level down.
    pub fn is_crisp(&self) -> bool {
        match self {
            Formula::Atom(..) => false,
            Formula::Bot => true,
            Formula::Imp(a, b) if **b == Formula::Bot && matches!(**a, Formula::Atom(..)) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.is_crisp() && b.is_crisp()
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.is_crisp(),
        }
    }

    /// A quantifier prefix followed by a quantifier-free matrix.
    pub fn is_prenex(&self) -> bool {
        match self {
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.is_prenex(),
            _ => self.is_quantifier_free(),
        }
    }

    /// Splits a prenex formula into its prefix and matrix.
    pub fn prenex_parts(&self) -> (Vec<(Quant, String)>, &Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Forall(x, a) => {
                    prefix.push((Quant::Forall, x.clone()));
                    cur = a;
                }
                Formula::Exists(x, a) => {
                    prefix.push((Quant::Exists, x.clone()));
                    cur = a;
                }
                _ => return (prefix, cur),
            }
        }
    }

    /// Alpha-normal form: every binder is renamed after its nesting depth, so
    /// alpha-equivalent formulas become structurally equal and no binder
    /// shadows another.
    pub fn normalize(&self) -> Formula {
        let free = self.free_vars();
        let stem = ["v", "w", "vv", "ww"]
            .into_iter()
            .find(|s| !free.iter().any(|v| is_stem_name(v, s)))
            .unwrap_or("v_");
        self.normalize_at(stem, 0, &BTreeMap::new())
    }

    fn normalize_at(&self, stem: &str, depth: usize, env: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|t| rename_term(t, env)).collect())
            }
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(
                a.normalize_at(stem, depth, env),
                b.normalize_at(stem, depth, env),
            ),
            Formula::Or(a, b) => Formula::or(
                a.normalize_at(stem, depth, env),
                b.normalize_at(stem, depth, env),
            ),
            Formula::Imp(a, b) => Formula::imp(
                a.normalize_at(stem, depth, env),
                b.normalize_at(stem, depth, env),
            ),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let name = format!("{stem}{depth}");
                let mut env = env.clone();
                env.insert(x.clone(), name.clone());
                let body = Box::new(a.normalize_at(stem, depth + 1, &env));
                match self {
                    Formula::Forall(..) => Formula::Forall(name, body),
                    _ => Formula::Exists(name, body),
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.normalize() == other.normalize()
    }

    /// Renames every binder to a name not used anywhere else in the formula
    /// and not in `avoid`. Afterwards all binders are pairwise distinct.
    pub fn rename_bound_apart(&self, avoid: &mut BTreeSet<String>) -> Formula {
        avoid.extend(self.all_vars());
        self.rename_apart_rec(avoid)
    }

    fn rename_apart_rec(&self, avoid: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Atom(..) | Formula::Bot => self.clone(),
            Formula::And(a, b) => {
                let a = a.rename_apart_rec(avoid);
                Formula::and(a, b.rename_apart_rec(avoid))
            }
            Formula::Or(a, b) => {
                let a = a.rename_apart_rec(avoid);
                Formula::or(a, b.rename_apart_rec(avoid))
            }
            Formula::Imp(a, b) => {
                let a = a.rename_apart_rec(avoid);
                Formula::imp(a, b.rename_apart_rec(avoid))
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let fresh = fresh_name(x, avoid);
                avoid.insert(fresh.clone());
                let body = a.substitute(x, &Term::Var(fresh.clone())).rename_apart_rec(avoid);
                match self {
                    Formula::Forall(..) => Formula::forall(&fresh, body),
                    _ => Formula::exists(&fresh, body),
                }
            }
        }
    }

    pub fn signature(&self) -> Result<Signature, FormulaError> {
        Signature::of(std::slice::from_ref(self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quant {
    Forall,
    Exists,
}

impl Quant {
    pub fn bind(self, var: &str, body: Formula) -> Formula {
        match self {
            Quant::Forall => Formula::forall(var, body),
            Quant::Exists => Formula::exists(var, body),
        }
    }
}

fn is_stem_name(v: &str, stem: &str) -> bool {
    v.strip_prefix(stem)
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

fn rename_term(t: &Term, env: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename_term(a, env)).collect()),
    }
}

/// `base` with primes appended until it avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Predicate and function symbols with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub preds: BTreeMap<String, usize>,
    pub funcs: BTreeMap<String, usize>,
}

impl Signature {
    /// Collects the symbols of all formulas, rejecting a name used with two arities.
    pub fn of(formulas: &[Formula]) -> Result<Signature, FormulaError> {
        let mut sig = Signature::default();
        for f in formulas {
            sig.add_formula(f)?;
        }
        Ok(sig)
    }

    pub fn add_formula(&mut self, f: &Formula) -> Result<(), FormulaError> {
        match f {
            Formula::Atom(p, args) => {
                add_symbol(&mut self.preds, p, args.len())?;
                args.iter().try_for_each(|t| self.add_term(t))
            }
            Formula::Bot => Ok(()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                self.add_formula(a)?;
                self.add_formula(b)
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => self.add_formula(a),
        }
    }

    pub fn add_term(&mut self, t: &Term) -> Result<(), FormulaError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                add_symbol(&mut self.funcs, f, args.len())?;
                args.iter().try_for_each(|a| self.add_term(a))
            }
        }
    }

    pub fn merge(&mut self, other: &Signature) -> Result<(), FormulaError> {
        for (p, &k) in &other.preds {
            add_symbol(&mut self.preds, p, k)?;
        }
        for (f, &k) in &other.funcs {
            add_symbol(&mut self.funcs, f, k)?;
        }
        Ok(())
    }

    pub fn uses_name(&self, name: &str) -> bool {
        self.preds.contains_key(name) || self.funcs.contains_key(name)
    }
}

fn add_symbol(map: &mut BTreeMap<String, usize>, name: &str, arity: usize) -> Result<(), FormulaError> {
    match map.get(name) {
        Some(&k) if k != arity => Err(FormulaError::Arity {
            symbol: name.to_string(),
            first: k,
            second: arity,
        }),
        Some(_) => Ok(()),
        None => {
            map.insert(name.to_string(), arity);
            Ok(())
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("symbol `{symbol}` used with arity {first} and arity {second}")]
    Arity { symbol: String, first: usize, second: usize },
}

// ---------------------------------------------------------------------------
// Printing

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        print_into(self, 0, true, &mut out);
        f.write_str(&out)
    }
}

/// Prints `f` in concrete syntax with minimal parentheses.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// `open` says whether the text may extend to the end of the enclosing
/// context; a quantifier body swallows everything to its right, so a
/// quantifier printed in a closed position needs parentheses.
fn print_into(f: &Formula, min_prec: u8, open: bool, out: &mut String) {
    let (prec, is_quant) = match f {
        _ if f.is_top() => (u8::MAX, false),
        Formula::Atom(..) | Formula::Bot => (u8::MAX, false),
        Formula::Imp(_, b) if **b == Formula::Bot => (PREC_UNARY, false),
        Formula::Imp(..) => (PREC_IMP, false),
        Formula::Or(..) => (PREC_OR, false),
        Formula::And(..) => (PREC_AND, false),
        Formula::Forall(..) | Formula::Exists(..) => (0, true),
    };
    let paren = if is_quant { !open } else { prec < min_prec };
    if paren {
        out.push('(');
    }
    let open = open || paren;
    match f {
        _ if f.is_top() => out.push_str("top"),
        Formula::Atom(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&a.to_string());
                }
                out.push(')');
            }
        }
        Formula::Bot => out.push_str("bot"),
        Formula::Imp(a, b) if **b == Formula::Bot => {
            out.push('~');
            print_into(a, PREC_UNARY, open, out);
        }
        Formula::Imp(a, b) => {
            print_into(a, PREC_IMP + 1, false, out);
            out.push_str(" -> ");
            print_into(b, PREC_IMP, open, out);
        }
        Formula::Or(a, b) => {
            print_into(a, PREC_OR, false, out);
            out.push_str(" | ");
            print_into(b, PREC_OR + 1, open, out);
        }
        Formula::And(a, b) => {
            print_into(a, PREC_AND, false, out);
            out.push_str(" & ");
            print_into(b, PREC_AND + 1, open, out);
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
            out.push_str(x);
            out.push_str(". ");
            print_into(a, 0, true, out);
        }
    }
    if paren {
        out.push(')');
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Bar,
    Amp,
    Tilde,
    Forall,
    Exists,
    Bot,
    Top,
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize, usize)>, FormulaError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut toks = Vec::new();
    loop {
        while lx.chars.peek().is_some_and(|c| c.is_whitespace()) {
            lx.bump();
        }
        let (line, col) = (lx.line, lx.col);
        let Some(&c) = lx.chars.peek() else {
            toks.push((Tok::Eof, line, col));
            return Ok(toks);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = lx.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            match s.as_str() {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "bot" => Tok::Bot,
                "top" => Tok::Top,
                _ => Tok::Ident(s),
            }
        } else {
            lx.bump();
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '|' | '∨' => Tok::Bar,
                '&' | '∧' => Tok::Amp,
                '~' | '¬' => Tok::Tilde,
                '→' => Tok::Arrow,
                '∀' => Tok::Forall,
                '∃' => Tok::Exists,
                '⊥' => Tok::Bot,
                '⊤' => Tok::Top,
                '-' if lx.chars.peek() == Some(&'>') => {
                    lx.bump();
                    Tok::Arrow
                }
                _ => {
                    return Err(FormulaError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        toks.push((tok, line, col));
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        let (_, line, col) = self.toks[self.pos];
        Err(FormulaError::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.next();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.next();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.next() {
            Tok::Tilde => Ok(Formula::neg(self.unary()?)),
            Tok::Bot => Ok(Formula::Bot),
            Tok::Top => Ok(Formula::top()),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            q @ (Tok::Forall | Tok::Exists) => {
                let var = match self.next() {
                    Tok::Ident(v) if starts_lower(&v) => v,
                    _ => {
                        self.pos -= 1;
                        return self.error("expected a lowercase variable after quantifier");
                    }
                };
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.formula()?;
                Ok(if q == Tok::Forall {
                    Formula::Forall(var, Box::new(body))
                } else {
                    Formula::Exists(var, Box::new(body))
                })
            }
            Tok::Ident(name) if !starts_lower(&name) => {
                let args = if *self.peek() == Tok::LParen {
                    self.next();
                    self.term_list()?
                } else {
                    Vec::new()
                };
                Ok(Formula::Atom(name, args))
            }
            tok => {
                self.pos = self.pos.saturating_sub(1);
                if matches!(tok, Tok::Eof) {
                    self.pos = self.toks.len() - 1;
                }
                self.error(format!("expected a formula, found {}", describe(&tok)))
            }
        }
    }

    /// Parses terms up to and including the closing parenthesis.
    fn term_list(&mut self) -> Result<Vec<Term>, FormulaError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.next();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.next() {
                Tok::Comma => {}
                Tok::RParen => return Ok(args),
                tok => {
                    self.pos -= 1;
                    return self.error(format!("expected `,` or `)`, found {}", describe(&tok)));
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        match self.next() {
            Tok::Ident(name) if starts_lower(&name) => {
                if *self.peek() == Tok::LParen {
                    self.next();
                    Ok(Term::App(name, self.term_list()?))
                } else {
                    Ok(Term::Var(name))
                }
            }
            tok => {
                self.pos = self.pos.saturating_sub(1);
                self.error(format!("expected a term, found {}", describe(&tok)))
            }
        }
    }
}

fn starts_lower(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase() || c == '_')
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Tilde => "`~`".into(),
        Tok::Forall => "`forall`".into(),
        Tok::Exists => "`exists`".into(),
        Tok::Bot => "`bot`".into(),
        Tok::Top => "`top`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a formula. Predicates start uppercase; a bare uppercase name is a
/// 0-ary predicate. Functions and constants are lowercase with parentheses,
/// bare lowercase names are variables.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after formula", describe(p.peek())));
    }
    f.signature()?;
    Ok(f)
}

/// Parses a single term such as `f(x, c())`.
pub fn parse_term(text: &str) -> Result<Term, FormulaError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after term", describe(p.peek())));
    }
    Ok(t)
}
