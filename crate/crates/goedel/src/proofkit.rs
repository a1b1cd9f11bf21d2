//! Hilbert-style derivations in IL and its extensions H, H_n and H_0, a
//! line-oriented proof file format, a checker that verifies the schema
//! bindings given at each step, and a brute-force soundness sampler.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{parse, parse_term, Formula, FormulaError, Term};
use crate::goedelset::GoedelSet;
use crate::semantics::{entails_bruteforce, Entailment, FiniteInterpretation, SearchConfig, SemanticsError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ProofError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("premise `{0}` is not closed")]
    OpenPremise(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Which axiom system a derivation claims to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    IL,
    /// IL + QS + LIN.
    H,
    /// H + FIN(n).
    Hn(usize),
    /// H + ISO_0.
    H0,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::IL => write!(f, "IL"),
            System::H => write!(f, "H"),
            System::Hn(n) => write!(f, "H_{n}"),
            System::H0 => write!(f, "H_0"),
        }
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<System, String> {
        match s.trim() {
            "IL" => return Ok(System::IL),
            "H" => return Ok(System::H),
            "H0" | "H_0" => return Ok(System::H0),
            _ => {}
        }
        s.trim()
            .strip_prefix('H')
            .map(|r| r.trim_start_matches('_'))
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 2)
            .map(System::Hn)
            .ok_or_else(|| format!("unknown system `{s}`, expected IL, H, H_<n> or H_0"))
    }
}

/// Value of a schema metavariable. Lowercase names bind terms, uppercase
/// names bind formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Formula(Formula),
    Term(Term),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Formula(x) => write!(f, "{x}"),
            Binding::Term(t) => write!(f, "{t}"),
        }
    }
}

pub type Bindings = BTreeMap<String, Binding>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Premise,
    Axiom { name: String, bindings: Bindings },
    /// Cited steps are 1-based.
    Rule { name: String, premises: Vec<usize>, bindings: Bindings },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub system: System,
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn premises(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::new();
        for s in &self.steps {
            if s.justification == Justification::Premise && !out.contains(&s.formula) {
                out.push(s.formula.clone());
            }
        }
        out
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    /// Proof file text; parses back to the same derivation.
    pub fn to_text(&self) -> String {
        let mut out = format!("system {}\n", self.system);
        for (i, s) in self.steps.iter().enumerate() {
            let just = match &s.justification {
                Justification::Premise => "premise".to_string(),
                Justification::Axiom { name, bindings } => format!("axiom {name}{}", fmt_bindings(bindings)),
                Justification::Rule { name, premises, bindings } => {
                    let cites: Vec<String> = premises.iter().map(usize::to_string).collect();
                    format!("rule {name} {}{}", cites.join(","), fmt_bindings(bindings))
                }
            };
            out.push_str(&format!("{}. {} ; {just}\n", i + 1, s.formula));
        }
        out
    }
}

fn fmt_bindings(b: &Bindings) -> String {
    if b.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = b.iter().map(|(k, v)| format!("{k}:={v}")).collect();
    format!(" [{}]", parts.join(", "))
}

/// Splits at commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_bindings(s: &str, line: usize) -> Result<Bindings, ProofError> {
    let err = |msg: String| ProofError::Parse { line, msg };
    let mut out = Bindings::new();
    if s.trim().is_empty() {
        return Ok(out);
    }
    for part in split_top(s) {
        let (k, v) = part.split_once(":=").ok_or_else(|| err(format!("binding `{}` lacks `:=`", part.trim())))?;
        let k = k.trim().to_string();
        let value = if k.starts_with(|c: char| c.is_ascii_lowercase()) {
            Binding::Term(parse_term(v).map_err(|e| err(format!("binding {k}: {e}")))?)
        } else {
            Binding::Formula(parse(v).map_err(|e| err(format!("binding {k}: {e}")))?)
        };
        if out.insert(k.clone(), value).is_some() {
            return Err(err(format!("metavariable {k} bound twice")));
        }
    }
    Ok(out)
}

/// Parses a proof file. The first non-comment line may be `system <tag>`;
/// without it the system is H.
pub fn parse_derivation(text: &str) -> Result<Derivation, ProofError> {
    let mut system = None;
    let mut steps = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |msg: String| ProofError::Parse { line, msg };
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(tag) = l.strip_prefix("system") {
            if system.is_some() || !steps.is_empty() {
                return Err(err("`system` must come first and only once".into()));
            }
            system = Some(tag.trim().trim_start_matches(':').parse::<System>().map_err(err)?);
            continue;
        }
        let (num, rest) = l.split_once('.').ok_or_else(|| err("expected `<n>. <formula> ; <justification>`".into()))?;
        let num: usize = num.trim().parse().map_err(|_| err(format!("bad step number `{}`", num.trim())))?;
        if num != steps.len() + 1 {
            return Err(err(format!("step {num} out of sequence, expected {}", steps.len() + 1)));
        }
        let (ftext, jtext) = rest.split_once(';').ok_or_else(|| err("missing `;` before the justification".into()))?;
        let formula = parse(ftext).map_err(|e| err(e.to_string()))?;
        let (head, bindings) = match jtext.find('[') {
            Some(i) => {
                let close = jtext.rfind(']').filter(|&c| c > i).ok_or_else(|| err("unclosed `[`".into()))?;
                (&jtext[..i], parse_bindings(&jtext[i + 1..close], line)?)
            }
            None => (jtext, Bindings::new()),
        };
        let mut words = head.split_whitespace();
        let justification = match words.next() {
            Some("premise") => Justification::Premise,
            Some("axiom") => {
                let name = words.next().ok_or_else(|| err("axiom needs a name".into()))?.to_string();
                Justification::Axiom { name, bindings }
            }
            Some("rule") => {
                let name = words.next().ok_or_else(|| err("rule needs a name".into()))?.to_string();
                let cites: String = words.collect::<Vec<_>>().join("");
                let premises = cites
                    .split(',')
                    .filter(|c| !c.is_empty())
                    .map(|c| c.parse::<usize>().map_err(|_| err(format!("bad step reference `{c}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Justification::Rule { name, premises, bindings }
            }
            other => return Err(err(format!("unknown justification `{}`", other.unwrap_or("")))),
        };
        steps.push(Step { formula, justification });
    }
    Ok(Derivation { system: system.unwrap_or(System::H), steps })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    BadCitation(String),
    UnknownSchema(String),
    NotInSystem { name: String, system: System },
    MissingBinding(String),
    UnexpectedBinding(String),
    BadBinding { name: String, msg: String },
    SideCondition { var: String, msg: String },
    Shape(String),
    Mismatch { expected: String },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::BadCitation(m) => write!(f, "bad citation: {m}"),
            Reason::UnknownSchema(n) => write!(f, "unknown axiom or rule `{n}`"),
            Reason::NotInSystem { name, system } => write!(f, "`{name}` is not part of {system}"),
            Reason::MissingBinding(n) => write!(f, "binding for metavariable {n} is missing"),
            Reason::UnexpectedBinding(n) => write!(f, "metavariable {n} does not occur in the schema"),
            Reason::BadBinding { name, msg } => write!(f, "binding {name}: {msg}"),
            Reason::SideCondition { var, msg } => write!(f, "side condition on {var} violated: {msg}"),
            Reason::Shape(m) => write!(f, "{m}"),
            Reason::Mismatch { expected } => write!(f, "formula does not match, expected `{expected}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    /// `step` is 1-based.
    Rejected { step: usize, reason: Reason },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => write!(f, "accepted"),
            Verdict::Rejected { step, reason } => write!(f, "rejected at step {step}: {reason}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckConfig {
    /// Only switched off by the mutation harness, to show that the sampler
    /// catches an unsound checker.
    pub enforce_side_conditions: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { enforce_side_conditions: true }
    }
}

struct Binds<'a> {
    b: &'a Bindings,
}

impl Binds<'_> {
    fn allow(&self, names: &[&str]) -> Result<(), Reason> {
        match self.b.keys().find(|k| !names.contains(&k.as_str())) {
            Some(k) => Err(Reason::UnexpectedBinding(k.clone())),
            None => Ok(()),
        }
    }

    fn formula(&self, name: &str) -> Result<Formula, Reason> {
        match self.b.get(name) {
            Some(Binding::Formula(f)) => Ok(f.clone()),
            Some(Binding::Term(_)) => Err(Reason::BadBinding { name: name.into(), msg: "expected a formula".into() }),
            None => Err(Reason::MissingBinding(name.into())),
        }
    }

    fn term(&self, name: &str) -> Result<Term, Reason> {
        match self.b.get(name) {
            Some(Binding::Term(t)) => Ok(t.clone()),
            Some(Binding::Formula(_)) => Err(Reason::BadBinding { name: name.into(), msg: "expected a term".into() }),
            None => Err(Reason::MissingBinding(name.into())),
        }
    }

    fn var(&self, name: &str) -> Result<String, Reason> {
        match self.term(name)? {
            Term::Var(x) => Ok(x),
            t => Err(Reason::BadBinding { name: name.into(), msg: format!("`{t}` is not a variable") }),
        }
    }
}

/// Axiom names available in a system.
pub fn axioms_of(system: System) -> Vec<String> {
    let mut names: Vec<String> =
        ["I3a", "I3b", "I4a", "I4b", "I5a", "I5b", "I9", "I11", "I12"].iter().map(|s| s.to_string()).collect();
    if system != System::IL {
        names.extend(["QS".to_string(), "LIN".to_string()]);
    }
    match system {
        System::Hn(n) => names.push(format!("FIN({n})")),
        System::H0 => names.push("ISO_0".into()),
        _ => {}
    }
    names
}

fn canonical_axiom(name: &str) -> String {
    match name {
        "ISO0" => "ISO_0".into(),
        _ => name.to_string(),
    }
}

/// The instance of axiom `name` under `bindings`, checking side conditions.
pub fn axiom_instance(name: &str, bindings: &Bindings, system: System, cfg: CheckConfig) -> Result<Formula, Reason> {
    let name = canonical_axiom(name);
    let b = Binds { b: bindings };
    let fin_n = name.strip_prefix("FIN(").and_then(|r| r.strip_suffix(')')).and_then(|n| n.parse::<usize>().ok());
    let known = matches!(
        name.as_str(),
        "I3a" | "I3b" | "I4a" | "I4b" | "I5a" | "I5b" | "I9" | "I11" | "I12" | "QS" | "LIN" | "ISO_0" | "FIN"
    ) || fin_n.is_some();
    if !known {
        return Err(Reason::UnknownSchema(name));
    }
    let fin_name = match system {
        System::Hn(n) if name == "FIN" || fin_n == Some(n) => Some(n),
        _ => None,
    };
    if fin_name.is_none() && !axioms_of(system).contains(&name) {
        return Err(Reason::NotInSystem { name, system });
    }
    let (a, bb, c) = (|| b.formula("A"), || b.formula("B"), || b.formula("C"));
    use Formula as F;
    if let Some(n) = fin_name {
        let names: Vec<String> = (1..n).map(|i| format!("A{i}")).collect();
        b.allow(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
        let vals = names.iter().map(|k| b.formula(k)).collect::<Result<Vec<_>, _>>()?;
        let mut chain = vec![F::top()];
        chain.extend(vals);
        chain.push(F::Bot);
        return Ok(F::disj(chain.windows(2).map(|w| F::imp(w[0].clone(), w[1].clone())).collect()));
    }
    Ok(match name.as_str() {
        "I3a" => {
            b.allow(&["A"])?;
            F::imp(F::or(a()?, a()?), a()?)
        }
        "I3b" => {
            b.allow(&["A"])?;
            F::imp(a()?, F::and(a()?, a()?))
        }
        "I4a" => {
            b.allow(&["A", "B"])?;
            F::imp(a()?, F::or(a()?, bb()?))
        }
        "I4b" => {
            b.allow(&["A", "B"])?;
            F::imp(F::and(a()?, bb()?), a()?)
        }
        "I5a" => {
            b.allow(&["A", "B"])?;
            F::imp(F::or(a()?, bb()?), F::or(bb()?, a()?))
        }
        "I5b" => {
            b.allow(&["A", "B"])?;
            F::imp(F::and(a()?, bb()?), F::and(bb()?, a()?))
        }
        "I9" => {
            b.allow(&["A"])?;
            F::imp(F::Bot, a()?)
        }
        "I11" | "I12" => {
            b.allow(&["A", "x", "t"])?;
            let (x, t, body) = (b.var("x")?, b.term("t")?, a()?);
            let inst = body.substitute(&x, &t);
            if name == "I11" {
                F::imp(F::forall(&x, body), inst)
            } else {
                F::imp(inst, F::exists(&x, body))
            }
        }
        "QS" => {
            b.allow(&["A", "C", "x"])?;
            let (x, body, side) = (b.var("x")?, a()?, c()?);
            if cfg.enforce_side_conditions && side.is_free(&x) {
                return Err(Reason::SideCondition { var: x, msg: "occurs free in C".into() });
            }
            F::imp(F::forall(&x, F::or(side.clone(), body.clone())), F::or(side, F::forall(&x, body)))
        }
        "LIN" => {
            b.allow(&["A", "B"])?;
            F::or(F::imp(a()?, bb()?), F::imp(bb()?, a()?))
        }
        "ISO_0" => {
            b.allow(&["A", "x"])?;
            let (x, body) = (b.var("x")?, a()?);
            F::imp(F::forall(&x, F::neg(F::neg(body.clone()))), F::neg(F::neg(F::forall(&x, body))))
        }
        _ => return Err(Reason::NotInSystem { name, system }),
    })
}

fn split_imp(f: &Formula, what: &str) -> Result<(Formula, Formula), Reason> {
    match f {
        Formula::Imp(a, b) => Ok(((**a).clone(), (**b).clone())),
        _ => Err(Reason::Shape(format!("{what} `{f}` is not a conditional"))),
    }
}

/// The conclusion a rule yields from the cited formulas.
pub fn rule_conclusion(
    name: &str,
    cited: &[&Formula],
    bindings: &Bindings,
    target: &Formula,
    cfg: CheckConfig,
) -> Result<Formula, Reason> {
    let b = Binds { b: bindings };
    let arity = match name {
        "I1" | "I2" => 2,
        "I6" | "I7" | "I8" | "I10" | "I13" => 1,
        _ => return Err(Reason::UnknownSchema(name.into())),
    };
    if cited.len() != arity {
        return Err(Reason::BadCitation(format!("{name} takes {arity} premise(s), {} cited", cited.len())));
    }
    use Formula as F;
    Ok(match name {
        "I1" => {
            b.allow(&[])?;
            let (a, c) = split_imp(cited[1], "second premise")?;
            if !a.alpha_eq(cited[0]) {
                return Err(Reason::Shape(format!("second premise is not `{} -> ...`", cited[0])));
            }
            c
        }
        "I2" => {
            b.allow(&[])?;
            let (a, b1) = split_imp(cited[0], "first premise")?;
            let (b2, c) = split_imp(cited[1], "second premise")?;
            if !b1.alpha_eq(&b2) {
                return Err(Reason::Shape(format!("middle formulas `{b1}` and `{b2}` differ")));
            }
            F::imp(a, c)
        }
        "I6" => {
            b.allow(&["C"])?;
            let (a, bb) = split_imp(cited[0], "premise")?;
            let c = match bindings.get("C") {
                Some(_) => b.formula("C")?,
                None => match target {
                    Formula::Imp(l, _) => match &**l {
                        Formula::Or(c, _) => (**c).clone(),
                        _ => return Err(Reason::Shape("conclusion is not `C | A -> C | B`".into())),
                    },
                    _ => return Err(Reason::Shape("conclusion is not `C | A -> C | B`".into())),
                },
            };
            F::imp(F::or(c.clone(), a), F::or(c, bb))
        }
        "I7" => {
            b.allow(&[])?;
            let (ab, c) = split_imp(cited[0], "premise")?;
            let Formula::And(a, bb) = ab else {
                return Err(Reason::Shape("premise is not `A & B -> C`".into()));
            };
            F::imp(*a, F::imp(*bb, c))
        }
        "I8" => {
            b.allow(&[])?;
            let (a, bc) = split_imp(cited[0], "premise")?;
            let (bb, c) = split_imp(&bc, "consequent of premise")?;
            F::imp(F::and(a, bb), c)
        }
        "I10" | "I13" => {
            b.allow(&["x"])?;
            let x = b.var("x")?;
            let (l, r) = split_imp(cited[0], "premise")?;
            let side = if name == "I10" { &l } else { &r };
            if cfg.enforce_side_conditions && side.is_free(&x) {
                let part = if name == "I10" { "antecedent" } else { "consequent" };
                return Err(Reason::SideCondition { var: x, msg: format!("occurs free in the {part} `{side}`") });
            }
            if name == "I10" {
                F::imp(l, F::forall(&x, r))
            } else {
                F::imp(F::exists(&x, l), r)
            }
        }
        _ => unreachable!(),
    })
}

pub fn check(d: &Derivation) -> Verdict {
    check_with(d, CheckConfig::default())
}

/// Checks every step in order; the first failing step is reported.
pub fn check_with(d: &Derivation, cfg: CheckConfig) -> Verdict {
    if d.steps.is_empty() {
        return Verdict::Rejected { step: 0, reason: Reason::Shape("empty derivation".into()) };
    }
    for (i, step) in d.steps.iter().enumerate() {
        let n = i + 1;
        let expected = match &step.justification {
            Justification::Premise => continue,
            Justification::Axiom { name, bindings } => axiom_instance(name, bindings, d.system, cfg),
            Justification::Rule { name, premises, bindings } => {
                match premises.iter().find(|&&p| p == 0 || p >= n) {
                    Some(bad) => Err(Reason::BadCitation(format!("step {n} cites step {bad}"))),
                    None => {
                        let cited: Vec<&Formula> = premises.iter().map(|&p| &d.steps[p - 1].formula).collect();
                        rule_conclusion(name, &cited, bindings, &step.formula, cfg)
                    }
                }
            }
        };
        match expected {
            Ok(f) if f.alpha_eq(&step.formula) => {}
            Ok(f) => return Verdict::Rejected { step: n, reason: Reason::Mismatch { expected: f.to_string() } },
            Err(reason) => return Verdict::Rejected { step: n, reason },
        }
    }
    Verdict::Accepted
}

/// Universal closure over the free variables, in name order.
pub fn universal_closure(f: &Formula) -> Formula {
    f.free_vars().iter().rev().fold(f.clone(), |g, x| Formula::forall(x, g))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Soundness {
    Consistent,
    /// The premises entail less than step `step` (1-based) in this
    /// interpretation.
    Violation { step: usize, countermodel: FiniteInterpretation },
}

/// Brute-forces `premises |= closure(step)` for every step over
/// interpretations into `v` with at most `max_universe` elements.
pub fn soundness_sample(
    d: &Derivation,
    v: &GoedelSet,
    max_universe: usize,
    budget: u64,
) -> Result<Soundness, ProofError> {
    let gamma = d.premises();
    if let Some(open) = gamma.iter().find(|g| !g.is_closed()) {
        return Err(ProofError::OpenPremise(open.to_string()));
    }
    let cfg = SearchConfig { max_universe, budget };
    for (i, s) in d.steps.iter().enumerate() {
        if let Entailment::Countermodel(m) = entails_bruteforce(&gamma, &universal_closure(&s.formula), v, cfg)? {
            return Ok(Soundness::Violation { step: i + 1, countermodel: m });
        }
    }
    Ok(Soundness::Consistent)
}

impl From<FormulaError> for ProofError {
    fn from(e: FormulaError) -> ProofError {
        ProofError::Parse { line: 0, msg: e.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MP: &str = "system H\n1. A ; premise\n2. A -> B ; premise\n3. B ; rule I1 1,2\n";

    #[test]
    fn modus_ponens_accepted_and_miscited_rejected() {
        let d = parse_derivation(MP).unwrap();
        assert_eq!(check(&d), Verdict::Accepted);
        assert_eq!(parse_derivation(&d.to_text()).unwrap(), d);
        let bad = parse_derivation(&MP.replace("I1 1,2", "I1 1,1")).unwrap();
        assert!(matches!(check(&bad), Verdict::Rejected { step: 3, reason: Reason::Shape(_) }));
        let forward = parse_derivation(&MP.replace("I1 1,2", "I1 1,3")).unwrap();
        assert!(matches!(check(&forward), Verdict::Rejected { step: 3, reason: Reason::BadCitation(_) }));
    }

    #[test]
    fn axiom_matching() {
        let cfg = CheckConfig::default();
        let lin = |a: &str, b: &str| -> Bindings {
            [("A".to_string(), Binding::Formula(parse(a).unwrap())), ("B".to_string(), Binding::Formula(parse(b).unwrap()))]
                .into_iter()
                .collect()
        };
        let f = axiom_instance("LIN", &lin("P(c)", "Q(c)"), System::H, cfg).unwrap();
        assert_eq!(f, parse("(P(c) -> Q(c)) | (Q(c) -> P(c))").unwrap());
        assert!(matches!(
            axiom_instance("LIN", &lin("A", "B"), System::IL, cfg),
            Err(Reason::NotInSystem { .. })
        ));

        let qs = parse_bindings("C:=P(x), A:=Q(x), x:=x", 1).unwrap();
        assert_eq!(
            axiom_instance("QS", &qs, System::H, cfg),
            Err(Reason::SideCondition { var: "x".into(), msg: "occurs free in C".into() })
        );

        let fin = parse_bindings("A1:=A1, A2:=A2", 1).unwrap();
        let f = axiom_instance("FIN", &fin, System::Hn(3), cfg).unwrap();
        assert_eq!(f, parse("(top -> A1) | (A1 -> A2) | (A2 -> bot)").unwrap());
        assert!(axiom_instance("FIN(3)", &fin, System::Hn(4), cfg).is_err());
        assert_eq!(
            axiom_instance("LIN", &parse_bindings("A:=P(c)", 1).unwrap(), System::H, cfg),
            Err(Reason::MissingBinding("B".into()))
        );
    }

    #[test]
    fn eigenvariable_condition() {
        let ok = "system IL\n1. forall x. (P(x) -> B) ; premise\n\
                  2. (forall x. (P(x) -> B)) -> (P(y) -> B) ; axiom I11 [A:=P(x) -> B, x:=x, t:=y]\n\
                  3. P(y) -> B ; rule I1 1,2\n\
                  4. (exists x. P(x)) -> B ; rule I13 3 [x:=y]\n";
        assert_eq!(check(&parse_derivation(ok).unwrap()), Verdict::Accepted);
        let broken = "system IL\n1. P(x) -> P(x) ; premise\n2. P(x) -> forall x. P(x) ; rule I10 1 [x:=x]\n";
        let d = parse_derivation(broken).unwrap();
        assert!(matches!(check(&d), Verdict::Rejected { step: 2, reason: Reason::SideCondition { .. } }));
        let lax = CheckConfig { enforce_side_conditions: false };
        assert_eq!(check_with(&d, lax), Verdict::Accepted);
    }

    #[test]
    fn soundness_of_mp_and_exists_elimination() {
        let d = parse_derivation(MP).unwrap();
        assert_eq!(soundness_sample(&d, &GoedelSet::v_m(3), 1, 1_000_000).unwrap(), Soundness::Consistent);
        let d = parse_derivation(
            "system IL\n1. forall x. (P(x) -> B) ; premise\n\
             2. (forall x. (P(x) -> B)) -> (P(x) -> B) ; axiom I11 [A:=P(x) -> B, x:=x, t:=x]\n\
             3. P(x) -> B ; rule I1 1,2\n\
             4. (exists x. P(x)) -> B ; rule I13 3 [x:=x]\n",
        )
        .unwrap();
        assert!(check(&d).is_accepted());
        assert_eq!(soundness_sample(&d, &GoedelSet::v_m(3), 2, 1_000_000).unwrap(), Soundness::Consistent);
    }

    #[test]
    fn parse_errors_and_systems() {
        assert!(matches!(parse_derivation("1. A ; lemma"), Err(ProofError::Parse { line: 1, .. })));
        assert!(matches!(parse_derivation("2. A ; premise"), Err(ProofError::Parse { .. })));
        assert_eq!("H_3".parse::<System>(), Ok(System::Hn(3)));
        assert_eq!("H0".parse::<System>(), Ok(System::H0));
        assert!("H_1".parse::<System>().is_err());
    }
}
