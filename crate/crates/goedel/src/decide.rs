//! Propositional decision procedures for the finite-valued logics `G_m`
//! and for the infinite-valued logic LC.
//!
//! Atoms of a quantifier-free formula, ground or not, are treated as
//! opaque propositional letters.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::goedelset::GoedelSet;
use crate::{fmt_q, Q};

/// Default cap on the number of valuations visited.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DecideError {
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("G_m needs m >= 2, got {0}")]
    BadM(usize),
    #[error("{atoms} atoms over {values} values exceed the budget of {budget} valuations")]
    Budget { atoms: usize, values: usize, budget: u64 },
}

/// Which propositional logic to decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Logic {
    LC,
    G(usize),
}

impl std::str::FromStr for Logic {
    type Err = String;

    fn from_str(s: &str) -> Result<Logic, String> {
        if s.eq_ignore_ascii_case("lc") {
            return Ok(Logic::LC);
        }
        s.strip_prefix(['G', 'g'])
            .and_then(|m| m.trim_start_matches('_').parse().ok())
            .map(Logic::G)
            .ok_or_else(|| format!("unknown logic `{s}`, expected LC or G<m>"))
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Logic::LC => write!(f, "LC"),
            Logic::G(m) => write!(f, "G{m}"),
        }
    }
}

/// Values for propositional letters, in first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropValuation {
    pub values: Vec<(Formula, Q)>,
}

impl PropValuation {
    pub fn get(&self, atom: &Formula) -> Option<&Q> {
        self.values.iter().find(|(a, _)| a == atom).map(|(_, v)| v)
    }

    /// Evaluates a quantifier-free formula; `None` if an atom is missing.
    pub fn eval(&self, f: &Formula) -> Option<Q> {
        let map: BTreeMap<&Formula, &Q> = self.values.iter().map(|(a, v)| (a, v)).collect();
        eval_qf(f, &|a| map.get(a).map(|v| (*v).clone()))
    }
}

impl fmt::Display for PropValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(a, v)| format!("{a}={}", fmt_q(v))).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for PropValuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.values.len()))?;
        for (a, v) in &self.values {
            m.serialize_entry(&a.to_string(), &fmt_q(v))?;
        }
        m.end()
    }
}

/// Evaluates a quantifier-free formula given values for its atoms.
pub fn eval_qf(f: &Formula, atom: &dyn Fn(&Formula) -> Option<Q>) -> Option<Q> {
    Some(match f {
        Formula::Atom(..) => atom(f)?,
        Formula::Bot => crate::zero(),
        Formula::And(a, b) => eval_qf(a, atom)?.min(eval_qf(b, atom)?),
        Formula::Or(a, b) => eval_qf(a, atom)?.max(eval_qf(b, atom)?),
        Formula::Imp(a, b) => {
            let (x, y) = (eval_qf(a, atom)?, eval_qf(b, atom)?);
            if x <= y {
                crate::one()
            } else {
                y
            }
        }
        Formula::Forall(..) | Formula::Exists(..) => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Valid,
    Countermodel { valuation: PropValuation, value: Q },
}

impl Decision {
    pub fn is_valid(&self) -> bool {
        matches!(self, Decision::Valid)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Valid => write!(f, "valid"),
            Decision::Countermodel { valuation, .. } => write!(f, "countermodel: {valuation}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Atom(usize),
    Bot,
    And,
    Or,
    Imp,
}

/// Postfix code over atom indices.
struct Compiled {
    atoms: Vec<Formula>,
    code: Vec<Op>,
}

fn compile(f: &Formula) -> Result<Compiled, DecideError> {
    fn go(f: &Formula, atoms: &mut Vec<Formula>, code: &mut Vec<Op>) -> Result<(), DecideError> {
        match f {
            Formula::Atom(..) => {
                let i = match atoms.iter().position(|a| a == f) {
                    Some(i) => i,
                    None => {
                        atoms.push(f.clone());
                        atoms.len() - 1
                    }
                };
                code.push(Op::Atom(i));
            }
            Formula::Bot => code.push(Op::Bot),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                go(a, atoms, code)?;
                go(b, atoms, code)?;
                code.push(match f {
                    Formula::And(..) => Op::And,
                    Formula::Or(..) => Op::Or,
                    _ => Op::Imp,
                });
            }
            Formula::Forall(..) | Formula::Exists(..) => return Err(DecideError::NotQuantifierFree),
        }
        Ok(())
    }
    let mut c = Compiled { atoms: vec![], code: vec![] };
    go(f, &mut c.atoms, &mut c.code)?;
    Ok(c)
}

fn run(code: &[Op], vals: &[u8], top: u8, stack: &mut Vec<u8>) -> u8 {
    stack.clear();
    for op in code {
        let v = match op {
            Op::Atom(i) => vals[*i],
            Op::Bot => 0,
            _ => {
                let b = stack.pop().unwrap();
                let a = stack.pop().unwrap();
                match op {
                    Op::And => a.min(b),
                    Op::Or => a.max(b),
                    _ => {
                        if a <= b {
                            top
                        } else {
                            b
                        }
                    }
                }
            }
        };
        stack.push(v);
    }
    stack[0]
}

/// Decides validity over `V_m` by visiting every valuation, first atom most
/// significant and values ascending; the first countermodel is returned.
pub fn decide_gm(f: &Formula, m: usize) -> Result<Decision, DecideError> {
    decide_gm_with_budget(f, m, DEFAULT_BUDGET)
}

pub fn decide_gm_with_budget(f: &Formula, m: usize, budget: u64) -> Result<Decision, DecideError> {
    if m < 2 {
        return Err(DecideError::BadM(m));
    }
    let c = compile(f)?;
    let n = c.atoms.len();
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget as u128 || m > u8::MAX as usize {
        return Err(DecideError::Budget { atoms: n, values: m, budget });
    }
    let values = GoedelSet::v_m(m).finite_values().expect("V_m is finite");
    let top = (m - 1) as u8;
    let mut vals = vec![0u8; n];
    let mut stack = Vec::with_capacity(c.code.len());
    loop {
        let r = run(&c.code, &vals, top, &mut stack);
        if r != top {
            let valuation = PropValuation {
                values: c.atoms.iter().zip(&vals).map(|(a, &i)| (a.clone(), values[i as usize].clone())).collect(),
            };
            return Ok(Decision::Countermodel { valuation, value: values[r as usize].clone() });
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(Decision::Valid);
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] <= top {
                break;
            }
            vals[i] = 0;
        }
    }
}

/// Number of distinct atoms of a quantifier-free formula.
pub fn atom_count(f: &Formula) -> Result<usize, DecideError> {
    Ok(compile(f)?.atoms.len())
}

/// LC-validity via `G_{n+2}`: the value of a formula only depends on how its
/// `n` atom values are ordered relative to each other and to 0 and 1, and
/// `n + 2` values realize every such order.
pub fn decide_lc(f: &Formula) -> Result<Decision, DecideError> {
    decide_lc_with_budget(f, DEFAULT_BUDGET)
}

pub fn decide_lc_with_budget(f: &Formula, budget: u64) -> Result<Decision, DecideError> {
    decide_gm_with_budget(f, atom_count(f)? + 2, budget)
}

pub fn decide(f: &Formula, logic: Logic, budget: u64) -> Result<Decision, DecideError> {
    match logic {
        Logic::LC => decide_lc_with_budget(f, budget),
        Logic::G(m) => decide_gm_with_budget(f, m, budget),
    }
}
