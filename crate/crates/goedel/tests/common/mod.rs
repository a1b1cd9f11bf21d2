//! Derivation corpus shared by the proof checker tests and the acceptance
//! run. Short derivations are written out as proof files; the longer ones
//! are assembled with a small builder that expands derived rules into
//! primitive steps.

#![allow(dead_code)]

use std::collections::HashMap;

use goedel::formula::{parse, Formula, Term};
use goedel::proofkit::{
    axiom_instance, parse_derivation, rule_conclusion, Binding, Bindings, CheckConfig, Derivation, Justification,
    Reason, Step, System,
};

pub struct Builder {
    pub d: Derivation,
    seen: HashMap<Formula, usize>,
}

pub fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn binds(pairs: &[(&str, Binding)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn fb(f: &Formula) -> Binding {
    Binding::Formula(f.clone())
}

fn var(x: &str) -> Binding {
    Binding::Term(Term::var(x))
}

impl Builder {
    pub fn new(system: System) -> Builder {
        Builder { d: Derivation { system, steps: vec![] }, seen: HashMap::new() }
    }

    pub fn get(&self, i: usize) -> Formula {
        self.d.steps[i - 1].formula.clone()
    }

    fn add(&mut self, formula: Formula, justification: Justification) -> usize {
        if let Some(&i) = self.seen.get(&formula) {
            return i;
        }
        self.d.steps.push(Step { formula: formula.clone(), justification });
        let n = self.d.steps.len();
        self.seen.insert(formula, n);
        n
    }

    pub fn premise(&mut self, formula: Formula) -> usize {
        self.d.steps.push(Step { formula: formula.clone(), justification: Justification::Premise });
        let n = self.d.steps.len();
        self.seen.insert(formula, n);
        n
    }

    pub fn axiom(&mut self, name: &str, b: &[(&str, Binding)]) -> usize {
        let bindings = binds(b);
        let formula = axiom_instance(name, &bindings, self.d.system, CheckConfig::default())
            .unwrap_or_else(|e| panic!("axiom {name}: {e}"));
        self.add(formula, Justification::Axiom { name: name.into(), bindings })
    }

    pub fn rule(&mut self, name: &str, cites: &[usize], b: &[(&str, Binding)]) -> usize {
        let bindings = binds(b);
        let cited: Vec<Formula> = cites.iter().map(|&i| self.get(i)).collect();
        let refs: Vec<&Formula> = cited.iter().collect();
        let formula = rule_conclusion(name, &refs, &bindings, &Formula::Bot, CheckConfig::default())
            .unwrap_or_else(|e| panic!("rule {name}: {e}"));
        self.add(formula, Justification::Rule { name: name.into(), premises: cites.to_vec(), bindings })
    }

    pub fn mp(&mut self, a: usize, imp: usize) -> usize {
        self.rule("I1", &[a, imp], &[])
    }

    pub fn chain(&mut self, i: usize, j: usize) -> usize {
        self.rule("I2", &[i, j], &[])
    }

    /// A -> A
    pub fn refl(&mut self, a: &Formula) -> usize {
        let s1 = self.axiom("I3b", &[("A", fb(a))]);
        let s2 = self.axiom("I4b", &[("A", fb(a)), ("B", fb(a))]);
        self.chain(s1, s2)
    }

    /// A -> (B -> A)
    pub fn k(&mut self, a: &Formula, b: &Formula) -> usize {
        let s = self.axiom("I4b", &[("A", fb(a)), ("B", fb(b))]);
        self.rule("I7", &[s], &[])
    }

    pub fn top(&mut self) -> usize {
        self.axiom("I9", &[("A", fb(&Formula::Bot))])
    }

    /// From `C` infer `A -> C`.
    pub fn weaken(&mut self, i: usize, a: &Formula) -> usize {
        let c = self.get(i);
        let k = self.k(&c, a);
        self.mp(i, k)
    }

    /// A & B -> B
    pub fn and_snd(&mut self, a: &Formula, b: &Formula) -> usize {
        let s1 = self.axiom("I5b", &[("A", fb(a)), ("B", fb(b))]);
        let s2 = self.axiom("I4b", &[("A", fb(b)), ("B", fb(a))]);
        self.chain(s1, s2)
    }

    /// (A -> B) & A -> B
    pub fn imp_mp(&mut self, a: &Formula, b: &Formula) -> usize {
        let r = self.refl(&Formula::imp(a.clone(), b.clone()));
        self.rule("I8", &[r], &[])
    }

    /// From `A -> (C -> X)` and `A -> C` infer `A -> X`.
    pub fn s_rule(&mut self, i: usize, j: usize) -> usize {
        let Formula::Imp(a, c) = self.get(j) else { panic!("s_rule: not a conditional") };
        let s1 = self.rule("I8", &[i], &[]);
        let s2 = self.axiom("I5b", &[("A", fb(&c)), ("B", fb(&a))]);
        let s3 = self.chain(s2, s1);
        let s4 = self.rule("I7", &[s3], &[]);
        let s5 = self.chain(j, s4);
        let s6 = self.rule("I8", &[s5], &[]);
        let s7 = self.axiom("I3b", &[("A", fb(&a))]);
        self.chain(s7, s6)
    }

    /// From `A -> B` and `A -> C` infer `A -> B & C`.
    pub fn imp_and(&mut self, i: usize, j: usize) -> usize {
        let (Formula::Imp(_, b), Formula::Imp(_, c)) = (self.get(i), self.get(j)) else {
            panic!("imp_and: not conditionals")
        };
        let bc = Formula::and((*b).clone(), (*c).clone());
        let r = self.refl(&bc);
        let intro = self.rule("I7", &[r], &[]);
        let s = self.chain(i, intro);
        self.s_rule(s, j)
    }

    /// From `A -> C` and `B -> C` infer `A | B -> C`.
    pub fn or_elim(&mut self, i: usize, j: usize) -> usize {
        let (Formula::Imp(a, c), Formula::Imp(_, _)) = (self.get(i), self.get(j)) else {
            panic!("or_elim: not conditionals")
        };
        let s1 = self.rule("I6", &[j], &[("C", fb(&a))]);
        let s2 = self.axiom("I5a", &[("A", fb(&a)), ("B", fb(&c))]);
        let s3 = self.rule("I6", &[i], &[("C", fb(&c))]);
        let s4 = self.axiom("I3a", &[("A", fb(&c))]);
        let t = self.chain(s1, s2);
        let t = self.chain(t, s3);
        self.chain(t, s4)
    }

    /// From `P -> P'` and `Q -> Q'` infer `P | Q -> P' | Q'`.
    pub fn or_map(&mut self, i: usize, j: usize) -> usize {
        let (Formula::Imp(_, p2), Formula::Imp(_, q2)) = (self.get(i), self.get(j)) else {
            panic!("or_map: not conditionals")
        };
        let l = self.axiom("I4a", &[("A", fb(&p2)), ("B", fb(&q2))]);
        let a = self.chain(i, l);
        let r1 = self.axiom("I4a", &[("A", fb(&q2)), ("B", fb(&p2))]);
        let r2 = self.axiom("I5a", &[("A", fb(&q2)), ("B", fb(&p2))]);
        let r = self.chain(r1, r2);
        let b = self.chain(j, r);
        self.or_elim(a, b)
    }

    /// From `X -> Y` infer `(Z -> X) -> (Z -> Y)`.
    pub fn post(&mut self, i: usize, z: &Formula) -> usize {
        let Formula::Imp(x, _) = self.get(i) else { panic!("post: not a conditional") };
        let m = self.imp_mp(z, &x);
        let c = self.chain(m, i);
        self.rule("I7", &[c], &[])
    }

    /// From `F` infer `forall x. F`. Sound when the premises are closed.
    pub fn generalize(&mut self, i: usize, x: &str) -> usize {
        let t = self.top();
        let w = self.weaken(i, &Formula::top());
        let g = self.rule("I10", &[w], &[("x", var(x))]);
        self.mp(t, g)
    }

    /// ~A | ~~A, by linearity.
    pub fn wem(&mut self, a: &Formula) -> usize {
        let na = Formula::neg(a.clone());
        // (A -> ~A) -> ~A
        let x = Formula::imp(a.clone(), na.clone());
        let p = self.imp_mp(a, &na);
        let snd = self.and_snd(&x, a);
        let both = self.imp_and(p, snd);
        let fin = self.imp_mp(a, &Formula::Bot);
        let c = self.chain(both, fin);
        let lem1 = self.rule("I7", &[c], &[]);
        // (~A -> A) -> ~~A
        let y = Formula::imp(na.clone(), a.clone());
        let p = self.imp_mp(&na, a);
        let snd = self.and_snd(&y, &na);
        let both = self.imp_and(snd, p);
        let c = self.chain(both, fin);
        let lem2 = self.rule("I7", &[c], &[]);
        let lin = self.axiom("LIN", &[("A", fb(a)), ("B", fb(&na))]);
        let m = self.or_map(lem1, lem2);
        self.mp(lin, m)
    }
}

pub struct Entry {
    pub name: &'static str,
    pub derivation: Derivation,
}

fn text(name: &'static str, src: &str) -> Entry {
    Entry { name, derivation: parse_derivation(src).unwrap_or_else(|e| panic!("{name}: {e}")) }
}

const MODUS_PONENS: &str = "\
system H
1. A ; premise
2. A -> B ; premise
3. B ; rule I1 1,2
";

const EXISTS_ELIM: &str = "\
system IL
1. forall x. (P(x) -> B) ; premise
2. (forall x. (P(x) -> B)) -> (P(x) -> B) ; axiom I11 [A:=P(x) -> B, x:=x, t:=x]
3. P(x) -> B ; rule I1 1,2
4. (exists x. P(x)) -> B ; rule I13 3 [x:=x]
";

const EXISTS_MONO: &str = "\
system IL
1. forall x. (P(x) -> Q(x)) ; premise
2. (forall x. (P(x) -> Q(x))) -> (P(x) -> Q(x)) ; axiom I11 [A:=P(x) -> Q(x), x:=x, t:=x]
3. P(x) -> Q(x) ; rule I1 1,2
4. Q(x) -> exists x. Q(x) ; axiom I12 [A:=Q(x), x:=x, t:=x]
5. P(x) -> exists x. Q(x) ; rule I2 3,4
6. (exists x. P(x)) -> exists x. Q(x) ; rule I13 5 [x:=x]
";

const IDENTITY: &str = "\
system IL
1. A -> A & A ; axiom I3b [A:=A]
2. A & A -> A ; axiom I4b [A:=A, B:=A]
3. A -> A ; rule I2 1,2
";

const CHAIN_WITH_PREMISE: &str = "\
system IL
1. A -> B ; premise
2. B -> C ; premise
3. A ; premise
4. B ; rule I1 3,1
5. C ; rule I1 4,2
";

const CHAIN_DISCHARGED: &str = "\
system IL
1. A -> B ; premise
2. B -> C ; premise
3. A -> C ; rule I2 1,2
";

const FORALL_WITH_PREMISE: &str = "\
system IL
1. forall x. (P(x) -> Q(x)) ; premise
2. forall x. P(x) ; premise
3. (forall x. P(x)) -> P(x) ; axiom I11 [A:=P(x), x:=x, t:=x]
4. P(x) ; rule I1 2,3
5. (forall x. (P(x) -> Q(x))) -> (P(x) -> Q(x)) ; axiom I11 [A:=P(x) -> Q(x), x:=x, t:=x]
6. P(x) -> Q(x) ; rule I1 1,5
7. Q(x) ; rule I1 4,6
8. Q(x) & top -> Q(x) ; axiom I4b [A:=Q(x), B:=top]
9. Q(x) -> (top -> Q(x)) ; rule I7 8
10. top -> Q(x) ; rule I1 7,9
11. top -> forall x. Q(x) ; rule I10 10 [x:=x]
12. top ; axiom I9 [A:=bot]
13. forall x. Q(x) ; rule I1 12,11
";

const FORALL_DISCHARGED: &str = "\
system IL
1. forall x. (P(x) -> Q(x)) ; premise
2. (forall x. P(x)) -> P(x) ; axiom I11 [A:=P(x), x:=x, t:=x]
3. (forall x. (P(x) -> Q(x))) -> (P(x) -> Q(x)) ; axiom I11 [A:=P(x) -> Q(x), x:=x, t:=x]
4. P(x) -> Q(x) ; rule I1 1,3
5. (forall x. P(x)) -> Q(x) ; rule I2 2,4
6. (forall x. P(x)) -> forall x. Q(x) ; rule I10 5 [x:=x]
";

const QS_SHIFT: &str = "\
system H
1. forall x. (B | P(x)) ; premise
2. (forall x. (B | P(x))) -> B | forall x. P(x) ; axiom QS [C:=B, A:=P(x), x:=x]
3. B | forall x. P(x) ; rule I1 1,2
";

const ISO_SHIFT: &str = "\
system H_0
1. forall x. ~~P(x) ; premise
2. (forall x. ~~P(x)) -> ~~forall x. P(x) ; axiom ISO_0 [A:=P(x), x:=x]
3. ~~forall x. P(x) ; rule I1 1,2
";

const EXISTS_INTRO: &str = "\
system IL
1. P(c()) ; premise
2. P(c()) -> exists x. P(x) ; axiom I12 [A:=P(x), x:=x, t:=c()]
3. exists x. P(x) ; rule I1 1,2
";

const EX_FALSO: &str = "\
system IL
1. bot ; premise
2. bot -> forall x. P(x) ; axiom I9 [A:=forall x. P(x)]
3. forall x. P(x) ; rule I1 1,2
";

/// ~Q -> ~P from P -> Q.
fn contraposition() -> Derivation {
    let (p, q) = (f("P(c())"), f("Q(c())"));
    let nq = Formula::neg(q.clone());
    let mut b = Builder::new(System::IL);
    let i = b.premise(Formula::imp(p.clone(), q.clone()));
    let snd = b.and_snd(&nq, &p);
    let to_q = b.chain(snd, i);
    let fst = b.axiom("I4b", &[("A", fb(&nq)), ("B", fb(&p))]);
    let both = b.imp_and(fst, to_q);
    let fin = b.imp_mp(&q, &Formula::Bot);
    let c = b.chain(both, fin);
    b.rule("I7", &[c], &[]);
    b.d
}

fn weak_excluded_middle() -> Derivation {
    let mut b = Builder::new(System::H);
    b.wem(&f("A"));
    b.d
}

/// A | ~A in H_2.
fn two_valued_excluded_middle() -> Derivation {
    let a = f("A");
    let top = Formula::top();
    let x = Formula::imp(top.clone(), a.clone());
    let mut b = Builder::new(System::Hn(2));
    let fin = b.axiom("FIN", &[("A1", fb(&a))]);
    let m = b.imp_mp(&top, &a);
    let r = b.refl(&x);
    let t = b.top();
    let w = b.weaken(t, &x);
    let pair = b.imp_and(r, w);
    let elim = b.chain(pair, m);
    let keep = b.refl(&Formula::neg(a));
    let map = b.or_map(elim, keep);
    b.mp(fin, map);
    b.d
}

/// forall y. (~forall x. R(x, y) -> exists x. ~R(x, y)) in H_0.
pub fn iso_lemma() -> Derivation {
    let a = f("R(x, y)");
    let na = Formula::neg(a.clone());
    let e = Formula::exists("x", na.clone());
    let g = Formula::forall("x", a.clone());
    let ng = Formula::neg(g.clone());
    let mut b = Builder::new(System::H0);
    let w = b.wem(&a);
    let intro = b.axiom("I12", &[("A", fb(&na)), ("x", var("x")), ("t", var("x"))]);
    let keep = b.refl(&Formula::neg(na.clone()));
    let m = b.or_map(intro, keep);
    let d = b.mp(w, m);
    let gen = b.generalize(d, "x");
    let qs = b.axiom("QS", &[("C", fb(&e)), ("A", fb(&Formula::neg(na))), ("x", var("x"))]);
    let split = b.mp(gen, qs);
    let iso = b.axiom("ISO_0", &[("A", fb(&a)), ("x", var("x"))]);
    let keep_e = b.refl(&e);
    let m = b.or_map(keep_e, iso);
    let shifted = b.mp(split, m);
    let left = b.k(&e, &ng);
    let efq = b.axiom("I9", &[("A", fb(&e))]);
    let right = b.post(efq, &ng);
    let elim = b.or_elim(left, right);
    let body = b.mp(shifted, elim);
    b.generalize(body, "y");
    b.d
}

/// Accepted derivations; the pairs `chain-*` and `forall-*` are related by
/// the deduction theorem.
pub fn corpus() -> Vec<Entry> {
    vec![
        text("modus-ponens", MODUS_PONENS),
        text("exists-elim", EXISTS_ELIM),
        text("exists-mono", EXISTS_MONO),
        text("identity", IDENTITY),
        text("chain-with-premise", CHAIN_WITH_PREMISE),
        text("chain-discharged", CHAIN_DISCHARGED),
        text("forall-with-premise", FORALL_WITH_PREMISE),
        text("forall-discharged", FORALL_DISCHARGED),
        text("qs-shift", QS_SHIFT),
        text("iso-shift", ISO_SHIFT),
        text("exists-intro", EXISTS_INTRO),
        text("ex-falso", EX_FALSO),
        Entry { name: "contraposition", derivation: contraposition() },
        Entry { name: "weak-excluded-middle", derivation: weak_excluded_middle() },
        Entry { name: "two-valued-excluded-middle", derivation: two_valued_excluded_middle() },
        Entry { name: "iso-lemma", derivation: iso_lemma() },
    ]
}

pub fn entry(name: &str) -> Derivation {
    corpus().into_iter().find(|e| e.name == name).unwrap_or_else(|| panic!("no corpus entry {name}")).derivation
}

pub struct Mutation {
    pub name: &'static str,
    pub derivation: Derivation,
    pub expect: fn(&Reason) -> bool,
    /// Mutations that only break a side condition; a checker without side
    /// conditions accepts them.
    pub side_condition_only: bool,
}

/// Replaces step `n` (1-based) with a proof file line.
fn with_line(base: &str, n: usize, line: &str) -> Derivation {
    let mut d = entry(base);
    let system = d.system;
    let step = parse_derivation(&format!("system {system}\n{}", renumber(line)))
        .unwrap_or_else(|e| panic!("{line}: {e}"))
        .steps
        .remove(0);
    d.steps[n - 1] = step;
    d
}

fn renumber(line: &str) -> String {
    match line.split_once(". ") {
        Some((_, rest)) => format!("1. {rest}"),
        None => line.to_string(),
    }
}

fn mutate(base: &str, edit: impl FnOnce(&mut Derivation)) -> Derivation {
    let mut d = entry(base);
    edit(&mut d);
    d
}

fn cites(d: &mut Derivation, n: usize, new: Vec<usize>) {
    match &mut d.steps[n - 1].justification {
        Justification::Rule { premises, .. } => *premises = new,
        _ => panic!("step {n} is not a rule step"),
    }
}

fn rebind(d: &mut Derivation, n: usize, key: &str, value: Option<&str>) {
    let b = match &mut d.steps[n - 1].justification {
        Justification::Rule { bindings, .. } | Justification::Axiom { bindings, .. } => bindings,
        Justification::Premise => panic!("step {n} is a premise"),
    };
    match value {
        None => {
            b.remove(key);
        }
        Some(v) if key.starts_with(|c: char| c.is_ascii_lowercase()) => {
            b.insert(key.into(), Binding::Term(goedel::formula::parse_term(v).unwrap()));
        }
        Some(v) => {
            b.insert(key.into(), Binding::Formula(f(v)));
        }
    }
}

fn rename(d: &mut Derivation, n: usize, new: &str) {
    match &mut d.steps[n - 1].justification {
        Justification::Rule { name, .. } | Justification::Axiom { name, .. } => *name = new.into(),
        Justification::Premise => panic!("step {n} is a premise"),
    }
}

fn citation(r: &Reason) -> bool {
    matches!(r, Reason::BadCitation(_) | Reason::Shape(_))
}

fn side(r: &Reason) -> bool {
    matches!(r, Reason::SideCondition { .. })
}

fn binding(r: &Reason) -> bool {
    matches!(
        r,
        Reason::Mismatch { .. } | Reason::MissingBinding(_) | Reason::UnexpectedBinding(_) | Reason::BadBinding { .. }
    )
}

fn schema(r: &Reason) -> bool {
    matches!(r, Reason::UnknownSchema(_) | Reason::NotInSystem { .. })
}

/// Twenty single-step corruptions of corpus entries.
pub fn mutations() -> Vec<Mutation> {
    let m = |name, derivation, expect: fn(&Reason) -> bool| Mutation { name, derivation, expect, side_condition_only: false };
    // the closing generalization is `mp(top, top -> forall y. ..)`
    let iso = iso_lemma();
    let close = match &iso.steps.last().unwrap().justification {
        Justification::Rule { premises, .. } => premises[1],
        _ => unreachable!(),
    };
    vec![
        m("mp-swapped-citations", mutate("modus-ponens", |d| cites(d, 3, vec![2, 1])), citation),
        m("mp-cites-itself", mutate("modus-ponens", |d| cites(d, 3, vec![1, 3])), citation),
        m("mp-same-step-twice", mutate("modus-ponens", |d| cites(d, 3, vec![1, 1])), citation),
        m("mp-one-citation", mutate("modus-ponens", |d| cites(d, 3, vec![2])), citation),
        m("chain-cites-step-zero", mutate("chain-discharged", |d| cites(d, 3, vec![0, 2])), citation),
        m("chain-reversed", mutate("chain-discharged", |d| cites(d, 3, vec![2, 1])), citation),
        Mutation {
            name: "forall-eigenvariable-free-in-antecedent",
            derivation: with_line("forall-discharged", 6, "6. P(x) -> forall x. Q(x) ; rule I10 4 [x:=x]"),
            expect: side,
            side_condition_only: true,
        },
        Mutation {
            name: "exists-eigenvariable-free-in-consequent",
            derivation: with_line("exists-mono", 6, "6. (exists x. P(x)) -> Q(x) ; rule I13 3 [x:=x]"),
            expect: side,
            side_condition_only: true,
        },
        m("qs-variable-free-in-c", mutate("qs-shift", |d| rebind(d, 2, "C", Some("B | P(x)"))), side),
        m("i11-wrong-term", with_line("exists-elim", 2, "2. (forall x. (P(x) -> B)) -> (P(c) -> B) ; axiom I11 [A:=P(x) -> B, x:=x, t:=x]"), binding),
        m("i12-term-as-variable", mutate("exists-intro", |d| rebind(d, 2, "x", Some("c()"))), binding),
        m("i4b-missing-binding", mutate("identity", |d| rebind(d, 2, "B", None)), binding),
        m("i4b-wrong-binding", mutate("identity", |d| rebind(d, 2, "B", Some("B"))), binding),
        m("i3b-extra-binding", mutate("identity", |d| rebind(d, 1, "D", Some("A"))), binding),
        m("iso-wrong-body", mutate("iso-shift", |d| rebind(d, 2, "A", Some("Q(x)"))), binding),
        m("unknown-axiom", mutate("identity", |d| rename(d, 2, "I4c")), schema),
        m("fin-outside-system", mutate("two-valued-excluded-middle", |d| rename(d, 1, "FIN(3)")), schema),
        m("iso-in-plain-h", mutate("iso-shift", |d| d.system = System::H), schema),
        m("i7-for-i8", mutate("forall-with-premise", |d| rename(d, 9, "I8")), |r| citation(r) || binding(r)),
        m("generalize-wrong-variable", mutate("iso-lemma", |d| rebind(d, close, "x", Some("x"))), binding),
    ]
}
