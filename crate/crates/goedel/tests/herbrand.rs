//! Prover properties over random prenex formulas.

use goedel::decide::{decide_gm, Decision};
use goedel::formula::{Formula, Quant};
use goedel::goedelset::GoedelSet;
use goedel::herbrand::{prove_prenex, reassemble, verify_certificate, Certificate, Mode, ProofOutcome, ProverConfig};
use goedel::random::{self, FormulaShape};
use goedel::semantics::{entails_bruteforce, SearchConfig};
use proptest::prelude::*;
use rand::Rng;

fn random_prenex(seed: u64) -> Formula {
    let mut r = random::rng(seed);
    let vars = ["x", "y", "z"];
    let n = r.gen_range(1..=3);
    let prefix: Vec<(Quant, String)> = (0..n)
        .map(|i| (if r.gen_bool(0.5) { Quant::Forall } else { Quant::Exists }, vars[i].to_string()))
        .collect();
    let shape = FormulaShape {
        preds: vec![("P".into(), 1), ("R".into(), 2), ("A".into(), 0)],
        funcs: vec![],
        vars: vec![],
        max_depth: 3,
        quantifiers: false,
        bot: true,
    };
    let free: Vec<String> = prefix.iter().map(|(_, x)| x.clone()).collect();
    let matrix = random::open_formula(&mut r, &shape, &free);
    prefix.iter().rev().fold(matrix, |f, (q, x)| q.bind(x, f))
}

fn cfg(mode: Mode) -> ProverConfig {
    ProverConfig { mode, max_level: 4, max_nodes: 200_000 }
}

fn valid_over(f: &Formula, m: usize) -> bool {
    let c = SearchConfig { max_universe: 2, budget: 5_000_000 };
    entails_bruteforce(&[], f, &GoedelSet::v_m(m), c).map(|e| e.holds()).unwrap_or(true)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn certificates_are_sound_and_reassemble(seed in any::<u64>()) {
        let f = random_prenex(seed);
        for mode in [Mode::Uncountable, Mode::Finite(2), Mode::Finite(3)] {
            let Ok(ProofOutcome::Valid(cert)) = prove_prenex(&f, cfg(mode)) else { continue };
            prop_assert!(verify_certificate(&cert).unwrap(), "{}", f);
            let back = Certificate::from_json(&cert.to_json()).unwrap();
            prop_assert_eq!(&back, &cert);
            let trace = reassemble(&cert).unwrap();
            prop_assert!(trace.end().alpha_eq(&f));
            let ms: Vec<usize> = match mode {
                Mode::Uncountable => vec![2, 3, 4],
                Mode::Finite(n) => vec![n],
            };
            for m in ms {
                prop_assert!(valid_over(&f, m), "{} proved in {} but fails over V_{}", f, mode, m);
            }
        }
    }

    #[test]
    fn finite_mode_proves_what_uncountable_proves(seed in any::<u64>()) {
        let f = random_prenex(seed);
        if let Ok(ProofOutcome::Valid(_)) = prove_prenex(&f, cfg(Mode::Uncountable)) {
            for n in 2..=4 {
                let out = prove_prenex(&f, cfg(Mode::Finite(n))).unwrap();
                prop_assert!(matches!(out, ProofOutcome::Valid(_)), "{} in finite:{}", f, n);
            }
        }
    }

    #[test]
    fn prover_is_deterministic(seed in any::<u64>()) {
        let f = random_prenex(seed);
        let a = prove_prenex(&f, cfg(Mode::Finite(3)));
        let b = prove_prenex(&f, cfg(Mode::Finite(3)));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn certificate_disjunction_is_checked_by_decision_procedure() {
    let f = goedel::parse("exists x. forall y. (A(y) -> A(x))").unwrap();
    let ProofOutcome::Valid(cert) = prove_prenex(&f, ProverConfig::new(Mode::Finite(3), 8)).unwrap() else {
        panic!("expected a proof")
    };
    let ds: Vec<Formula> = cert.disjuncts.iter().map(|d| goedel::parse(d).unwrap()).collect();
    let disj = goedel::herbrand::right_disjunction(&ds);
    assert!(decide_gm(&disj, 3).unwrap().is_valid());
    assert!(matches!(decide_gm(&disj, 4).unwrap(), Decision::Countermodel { .. }));
    let json: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
    assert_eq!(json["mode"], "finite:3");
    let first = &json["leaves"][0]["order"];
    assert_eq!(first[0][0], "bot");
}
