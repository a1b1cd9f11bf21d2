//! Seeded generators for formulas and finite interpretations, used by the
//! property tests, the proof-checker soundness sampler and the CLI.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::formula::{Formula, Signature, Term};
use crate::goedelset::GoedelSet;
use crate::semantics::FiniteInterpretation;
use crate::Q;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct FormulaShape {
    /// Predicate symbols with their arities.
    pub preds: Vec<(String, usize)>,
    /// Function symbols with their arities; constants have arity 0.
    pub funcs: Vec<(String, usize)>,
    /// Variable names available for binding.
    pub vars: Vec<String>,
    pub max_depth: usize,
    pub quantifiers: bool,
    pub bot: bool,
}

impl FormulaShape {
    /// Propositional formulas over the given 0-ary atoms.
    pub fn propositional(atoms: &[&str], max_depth: usize) -> FormulaShape {
        FormulaShape {
            preds: atoms.iter().map(|a| (a.to_string(), 0)).collect(),
            funcs: vec![],
            vars: vec![],
            max_depth,
            quantifiers: false,
            bot: true,
        }
    }

    /// A small first-order signature: unary `P`, `Q`, binary `R`, a
    /// constant `c` and a unary `f`.
    pub fn first_order(max_depth: usize) -> FormulaShape {
        FormulaShape {
            preds: vec![("P".into(), 1), ("Q".into(), 1), ("R".into(), 2), ("A".into(), 0)],
            funcs: vec![("c".into(), 0), ("f".into(), 1)],
            vars: vec!["x".into(), "y".into(), "z".into()],
            max_depth,
            quantifiers: true,
            bot: true,
        }
    }
}

fn random_term<R: Rng>(rng: &mut R, shape: &FormulaShape, bound: &[String], depth: usize) -> Term {
    let consts: Vec<&(String, usize)> = shape.funcs.iter().filter(|(_, k)| *k == 0).collect();
    let use_var = !bound.is_empty() && (depth == 0 || rng.gen_bool(0.6));
    if use_var {
        return Term::var(&bound[rng.gen_range(0..bound.len())]);
    }
    if depth > 0 && !shape.funcs.is_empty() && rng.gen_bool(0.3) {
        let (f, k) = &shape.funcs[rng.gen_range(0..shape.funcs.len())];
        let args = (0..*k).map(|_| random_term(rng, shape, bound, depth - 1)).collect();
        return Term::app(f, args);
    }
    match consts.len() {
        0 => Term::var(&bound[rng.gen_range(0..bound.len())]),
        n => Term::constant(&consts[rng.gen_range(0..n)].0),
    }
}

fn random_atom<R: Rng>(rng: &mut R, shape: &FormulaShape, bound: &[String]) -> Formula {
    // without variables or constants only 0-ary predicates can be formed
    let has_terms = !bound.is_empty() || shape.funcs.iter().any(|(_, k)| *k == 0);
    let usable: Vec<&(String, usize)> = shape.preds.iter().filter(|(_, k)| has_terms || *k == 0).collect();
    if shape.bot && rng.gen_ratio(1, 8) || usable.is_empty() {
        return Formula::Bot;
    }
    let (p, k) = usable[rng.gen_range(0..usable.len())];
    let args = (0..*k).map(|_| random_term(rng, shape, bound, 1)).collect();
    Formula::Atom(p.clone(), args)
}

fn random_rec<R: Rng>(rng: &mut R, shape: &FormulaShape, bound: &mut Vec<String>, depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 5) {
        return random_atom(rng, shape, bound);
    }
    let choices = if shape.quantifiers && !shape.vars.is_empty() { 5 } else { 3 };
    match rng.gen_range(0..choices) {
        0 => Formula::and(random_rec(rng, shape, bound, depth - 1), random_rec(rng, shape, bound, depth - 1)),
        1 => Formula::or(random_rec(rng, shape, bound, depth - 1), random_rec(rng, shape, bound, depth - 1)),
        2 => Formula::imp(random_rec(rng, shape, bound, depth - 1), random_rec(rng, shape, bound, depth - 1)),
        k => {
            let x = shape.vars[rng.gen_range(0..shape.vars.len())].clone();
            bound.push(x.clone());
            let body = random_rec(rng, shape, bound, depth - 1);
            bound.pop();
            if k == 3 {
                Formula::forall(&x, body)
            } else {
                Formula::exists(&x, body)
            }
        }
    }
}

/// A closed formula of depth at most `shape.max_depth`. Atoms only use
/// variables bound above them, so no free variables arise.
pub fn formula<R: Rng>(rng: &mut R, shape: &FormulaShape) -> Formula {
    random_rec(rng, shape, &mut Vec::new(), shape.max_depth)
}

/// A formula that may mention the given free variables.
pub fn open_formula<R: Rng>(rng: &mut R, shape: &FormulaShape, free: &[String]) -> Formula {
    random_rec(rng, shape, &mut free.to_vec(), shape.max_depth)
}

/// An interpretation of `sig` over `n` elements with atom values drawn from
/// `values`, which must be a subset of `truth_set`.
pub fn interpretation<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    n: usize,
    values: &[Q],
    truth_set: &GoedelSet,
) -> FiniteInterpretation {
    let mut out = FiniteInterpretation::with_size(n, truth_set.clone());
    for (p, &k) in &sig.preds {
        let vals = (0..n.pow(k as u32)).map(|_| values[rng.gen_range(0..values.len())].clone()).collect();
        out.set_pred(p, k, vals);
    }
    for (f, &k) in &sig.funcs {
        let vals = (0..n.pow(k as u32)).map(|_| rng.gen_range(0..n)).collect();
        out.set_func(f, k, vals);
    }
    out
}
