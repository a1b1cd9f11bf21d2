//! Browser bindings. Every entry point takes plain strings and returns a
//! JSON document with a `kind` field; errors come back as
//! `{"kind": "error", "message": ...}` rather than exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use goedel::decide::{decide as decide_formula, Decision, Logic, DEFAULT_BUDGET};
use goedel::goedelset::GoedelSet;
use goedel::herbrand::{prove_prenex, Mode, ProofOutcome, ProverConfig};
use goedel::{fmt_q, parse};

/// Tree nodes explored before `prove` gives up; keeps the page responsive.
const WEB_MAX_NODES: usize = 200_000;

fn error(msg: impl ToString) -> Value {
    json!({ "kind": "error", "message": msg.to_string() })
}

fn classify_value(set: &str) -> Value {
    match GoedelSet::parse(set) {
        Ok(v) => {
            let c = v.classify();
            json!({ "kind": "classification", "set": v.to_string(), "summary": c.summary(), "classification": c })
        }
        Err(e) => error(e),
    }
}

fn decide_value(formula: &str, logic: &str) -> Value {
    let f = match parse(formula) {
        Ok(f) => f,
        Err(e) => return error(e),
    };
    let logic: Logic = match logic.parse() {
        Ok(l) => l,
        Err(e) => return error(e),
    };
    match decide_formula(&f, logic, DEFAULT_BUDGET) {
        Ok(Decision::Valid) => json!({ "kind": "valid", "logic": logic.to_string() }),
        Ok(Decision::Countermodel { valuation, value }) => json!({
            "kind": "countermodel",
            "logic": logic.to_string(),
            "valuation": valuation,
            "value": fmt_q(&value),
        }),
        Err(e) => error(e),
    }
}

fn prove_value(formula: &str, mode: &str, max_level: usize) -> Value {
    let f = match parse(formula) {
        Ok(f) => f,
        Err(e) => return error(e),
    };
    let mode: Mode = match mode.parse() {
        Ok(m) => m,
        Err(e) => return error(e),
    };
    let cfg = ProverConfig { mode, max_level, max_nodes: WEB_MAX_NODES };
    match prove_prenex(&f, cfg) {
        Ok(ProofOutcome::Valid(cert)) => json!({ "kind": "valid", "certificate": cert }),
        Ok(ProofOutcome::Unknown { level }) => json!({ "kind": "unknown", "level": level }),
        Err(e) => error(e),
    }
}

/// Classifies a truth-value set such as `{0} + [1/2,1]`.
#[wasm_bindgen]
pub fn classify(set: &str) -> String {
    classify_value(set).to_string()
}

/// Decides a propositional formula in `LC` or `G<m>`.
#[wasm_bindgen]
pub fn decide(formula: &str, logic: &str) -> String {
    decide_value(formula, logic).to_string()
}

/// Runs the Herbrand prover in mode `uncountable` or `finite:<n>`.
#[wasm_bindgen]
pub fn prove(formula: &str, mode: &str, max_level: usize) -> String {
    prove_value(formula, mode, max_level).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn entry_points_return_json() {
        let c = doc(classify("{0} + [1/2,1]"));
        assert_eq!(c["summary"], "uncountable, 0 isolated → axiomatizable (H_0)");
        assert_eq!(doc(classify("[1/2,1]"))["kind"], "error");

        let fin3 = "(top -> A1) | (A1 -> A2) | (A2 -> bot)";
        assert_eq!(doc(decide(fin3, "G3"))["kind"], "valid");
        let d = doc(decide(fin3, "G4"));
        assert_eq!((d["kind"].as_str(), d["value"].as_str()), (Some("countermodel"), Some("2/3")));
        assert_eq!(doc(decide("A &", "LC"))["kind"], "error");

        let p = doc(prove("exists x. exists y. (P(x) -> P(y))", "uncountable", 2));
        assert_eq!(p["kind"], "valid");
        assert!(p["certificate"]["disjuncts"].is_array());
        let u = doc(prove("exists x. forall y. (A(y) -> A(x))", "uncountable", 4));
        assert_eq!(u["kind"], "unknown");
        assert_eq!(doc(prove("exists x. forall y. (A(y) -> A(x))", "finite:3", 6))["kind"], "valid");
        assert_eq!(doc(prove("P(c())", "sideways", 2))["kind"], "error");
    }
}
