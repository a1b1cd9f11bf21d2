mod common;

use goedel::goedelset::GoedelSet;
use goedel::proofkit::{check, check_with, parse_derivation, soundness_sample, CheckConfig, Soundness, System, Verdict};

const BUDGET: u64 = 50_000_000;

/// Truth sets a derivation in `system` must be sound for.
fn sample_sets(system: System) -> Vec<usize> {
    match system {
        System::Hn(n) => (2..=n).collect(),
        _ => vec![3, 4],
    }
}

#[test]
fn corpus_is_accepted_and_round_trips() {
    let corpus = common::corpus();
    assert!(corpus.len() >= 10);
    for e in &corpus {
        assert_eq!(check(&e.derivation), Verdict::Accepted, "{}", e.name);
        let back = parse_derivation(&e.derivation.to_text()).unwrap();
        assert_eq!(back, e.derivation, "{}", e.name);
    }
}

#[test]
fn corpus_is_sound_on_small_models() {
    for e in common::corpus() {
        for m in sample_sets(e.derivation.system) {
            let r = soundness_sample(&e.derivation, &GoedelSet::v_m(m), 2, BUDGET).unwrap();
            assert_eq!(r, Soundness::Consistent, "{} over V_{m}", e.name);
        }
    }
}

#[test]
fn deduction_pairs_share_conclusions() {
    for (with, without) in [("chain-with-premise", "chain-discharged"), ("forall-with-premise", "forall-discharged")] {
        let (a, b) = (common::entry(with), common::entry(without));
        let extra: Vec<_> = a.premises().into_iter().filter(|p| !b.premises().contains(p)).collect();
        assert_eq!(extra.len(), 1);
        let expect = goedel::Formula::imp(extra[0].clone(), a.conclusion().unwrap().clone());
        assert!(b.conclusion().unwrap().alpha_eq(&expect), "{with} / {without}");
    }
}

#[test]
fn mutations_are_rejected_for_the_right_reason() {
    let muts = common::mutations();
    assert_eq!(muts.len(), 20);
    for m in muts {
        match check(&m.derivation) {
            Verdict::Rejected { reason, .. } => assert!((m.expect)(&reason), "{}: {reason}", m.name),
            Verdict::Accepted => panic!("{} accepted", m.name),
        }
    }
}

/// With side conditions switched off the eigenvariable mutations slip
/// through the checker, and the sampler catches them.
#[test]
fn sampler_catches_a_lax_checker() {
    let lax = CheckConfig { enforce_side_conditions: false };
    let caught: Vec<_> = common::mutations().into_iter().filter(|m| m.side_condition_only).collect();
    assert!(!caught.is_empty());
    for m in caught {
        assert_eq!(check_with(&m.derivation, lax), Verdict::Accepted, "{}", m.name);
        let r = soundness_sample(&m.derivation, &GoedelSet::v_m(2), 2, BUDGET).unwrap();
        assert!(matches!(r, Soundness::Violation { .. }), "{}", m.name);
    }
}

#[test]
fn iso_lemma_conclusion() {
    let d = common::iso_lemma();
    let goal = goedel::parse("forall y. ((~forall x. R(x, y)) -> exists x. ~R(x, y))").unwrap();
    assert!(d.conclusion().unwrap().alpha_eq(&goal), "{}", d.conclusion().unwrap());
    assert!(d.premises().is_empty());
}
