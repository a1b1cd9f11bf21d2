//! `goedel`: command-line front end for the workbench.
//!
//! Exit codes: 0 valid/accepted/holds, 1 invalid/rejected/countermodel,
//! 2 unknown (a budget or level bound was hit), 3 usage or input error.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use goedel::decide::{decide, Decision, DecideError, Logic};
use goedel::formula::{parse, Formula, Signature};
use goedel::goedelset::{embed_into_perfect, GoedelSet, SetAtom};
use goedel::herbrand::{prove_prenex, reassemble, verify_certificate, HerbrandError, Mode, ProofOutcome, ProverConfig};
use goedel::proofkit::{check, parse_derivation, soundness_sample, Soundness, Verdict};
use goedel::semantics::{
    entails_bruteforce, interpretation_from_json, interpretation_to_json, one_entails_bruteforce, Entailment,
    Interpretation, SearchConfig, SemanticsError,
};
use goedel::transforms::{forall_free_shift, prenex_crisp, prenex_weakening, to_ag, to_ah, to_bot_free};
use goedel::{fmt_q, parse_rational};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "goedel", version, about = "Workbench for first-order Goedel logics")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Search budget (interpretations, valuations or tree nodes).
    #[arg(long, global = true, env = "GOEDEL_BUDGET", default_value_t = 10_000_000)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it in normal form.
    Parse { formula: String },
    /// Evaluate a closed formula in an interpretation file.
    Eval {
        formula: String,
        /// Interpretation in the JSON file format.
        #[arg(long)]
        interp: String,
    },
    /// Search for a countermodel to `premises |= goal` over a finite truth set.
    Entail {
        goal: String,
        #[arg(long = "premise")]
        premises: Vec<String>,
        #[arg(long, default_value = "{0,1/2,1}")]
        truth_set: String,
        #[arg(long, default_value_t = 2)]
        max_universe: usize,
        /// Use 1-entailment instead of entailment.
        #[arg(long)]
        one: bool,
    },
    /// Classify a truth-value set.
    Classify { set: String },
    /// Decide a propositional formula in LC or G<m>.
    Decide {
        formula: String,
        #[arg(long, default_value = "LC")]
        logic: String,
    },
    /// Search for a Herbrand certificate of a closed prenex formula.
    Prove {
        formula: String,
        #[arg(long, default_value = "uncountable")]
        mode: String,
        #[arg(long, default_value_t = 6)]
        max_level: usize,
        /// Also print the rule trace rebuilding the formula.
        #[arg(long)]
        trace: bool,
        /// Write the certificate JSON to this path.
        #[arg(long)]
        certificate: Option<String>,
    },
    /// Check a certificate file produced by `prove`.
    CheckCert { file: String },
    /// Check a proof file.
    CheckProof {
        file: String,
        /// Also compare every step against the premises over this finite set.
        #[arg(long)]
        truth_set: Option<String>,
        #[arg(long, default_value_t = 2)]
        max_universe: usize,
    },
    /// Apply a formula transformation to the formula in a file (`-` for stdin).
    Transform {
        #[arg(long, value_enum)]
        kind: Kind,
        file: String,
        /// Allow one-way quantifier shifts when prenexing.
        #[arg(long)]
        weak: bool,
    },
    /// Embed increasing rationals into a perfect piece of a truth set.
    Embed {
        #[arg(long)]
        truth_set: String,
        points: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ag,
    Ah,
    Botfree,
    Forallfree,
    Prenex,
}

/// A finished command: exit code, text rendering and JSON rendering.
struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

impl Outcome {
    fn new(code: u8, text: impl Into<String>, json: Value) -> Outcome {
        Outcome { code, text: text.into(), json }
    }
}

/// Failure before a result: exit 2 for exhausted budgets, 3 otherwise.
struct Failure {
    code: u8,
    msg: String,
}

fn input(msg: impl ToString) -> Failure {
    Failure { code: 3, msg: msg.to_string() }
}

fn budget(msg: impl ToString) -> Failure {
    Failure { code: 2, msg: msg.to_string() }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Failure {
        match e {
            SemanticsError::Budget { .. } => budget(e),
            _ => input(e),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Failure {
        match e {
            DecideError::Budget { .. } => budget(e),
            _ => input(e),
        }
    }
}

impl From<HerbrandError> for Failure {
    fn from(e: HerbrandError) -> Failure {
        match e {
            HerbrandError::Budget(_) | HerbrandError::Decide(DecideError::Budget { .. }) => budget(e),
            _ => input(e),
        }
    }
}

fn read(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(input)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| input(format!("{path}: {e}")))
}

/// A formula given inline, or `@path` to read it from a file.
fn formula_arg(text: &str) -> Result<Formula, Failure> {
    let src = match text.strip_prefix('@') {
        Some(path) => read(path)?,
        None => text.to_string(),
    };
    let body: String = src.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
    parse(&body).map_err(input)
}

fn truth_set(text: &str) -> Result<GoedelSet, Failure> {
    GoedelSet::parse(text).map_err(|e| input(format!("truth set `{text}`: {e}")))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let b = cli.budget;
    Ok(match &cli.command {
        Command::Parse { formula } => {
            let f = formula_arg(formula)?;
            let sig = Signature::of(std::slice::from_ref(&f)).map_err(input)?;
            let free: Vec<String> = f.free_vars().into_iter().collect();
            Outcome::new(0, f.to_string(), json!({
                "kind": "parsed",
                "formula": f.to_string(),
                "closed": free.is_empty(),
                "free_vars": free,
                "predicates": sig.preds,
                "functions": sig.funcs,
            }))
        }
        Command::Eval { formula, interp } => {
            let f = formula_arg(formula)?;
            let i = interpretation_from_json(&read(interp)?)?;
            let v = i.eval(&f)?;
            Outcome::new(0, fmt_q(&v), json!({ "kind": "value", "formula": f.to_string(), "value": fmt_q(&v) }))
        }
        Command::Entail { goal, premises, truth_set: ts, max_universe, one } => {
            let goal = formula_arg(goal)?;
            let gamma = premises.iter().map(|p| formula_arg(p)).collect::<Result<Vec<_>, _>>()?;
            let v = truth_set(ts)?;
            let cfg = SearchConfig { max_universe: *max_universe, budget: b };
            let r = if *one {
                one_entails_bruteforce(&gamma, &goal, &v, cfg)?
            } else {
                entails_bruteforce(&gamma, &goal, &v, cfg)?
            };
            match r {
                Entailment::Holds => Outcome::new(
                    0,
                    format!("holds (universes up to {max_universe}, truth set {v})"),
                    json!({ "kind": "holds", "max_universe": max_universe, "truth_set": v.to_string() }),
                ),
                Entailment::Countermodel(m) => {
                    let m = interpretation_to_json(&Interpretation::Finite(m));
                    let text = format!("countermodel:\n{}", serde_json::to_string_pretty(&m).unwrap_or_default());
                    Outcome::new(1, text, json!({ "kind": "countermodel", "countermodel": m }))
                }
            }
        }
        Command::Classify { set } => {
            let v = truth_set(set)?;
            let c = v.classify();
            Outcome::new(0, c.summary(), json!({
                "kind": "classification",
                "set": v.to_string(),
                "summary": c.summary(),
                "classification": c,
            }))
        }
        Command::Decide { formula, logic } => {
            let f = formula_arg(formula)?;
            let logic: Logic = logic.parse().map_err(input)?;
            match decide(&f, logic, b)? {
                Decision::Valid => Outcome::new(0, "valid", json!({ "kind": "valid", "logic": logic.to_string() })),
                d @ Decision::Countermodel { .. } => {
                    let Decision::Countermodel { valuation, value } = &d else { unreachable!() };
                    Outcome::new(1, d.to_string(), json!({
                        "kind": "countermodel",
                        "logic": logic.to_string(),
                        "valuation": valuation,
                        "value": fmt_q(value),
                    }))
                }
            }
        }
        Command::Prove { formula, mode, max_level, trace, certificate } => {
            let f = formula_arg(formula)?;
            let mode: Mode = mode.parse()?;
            let mut cfg = ProverConfig::new(mode, *max_level);
            cfg.max_nodes = usize::try_from(b).unwrap_or(usize::MAX);
            match prove_prenex(&f, cfg)? {
                ProofOutcome::Unknown { level } => Outcome::new(
                    2,
                    format!("unknown: open branches at level {level}"),
                    json!({ "kind": "unknown", "level": level, "mode": mode.to_string() }),
                ),
                ProofOutcome::Valid(cert) => {
                    if let Some(path) = certificate {
                        fs::write(path, cert.to_json()).map_err(|e| input(format!("{path}: {e}")))?;
                    }
                    let mut text = format!("valid in mode {mode}, depth {}\ndisjuncts:\n", cert.depth());
                    for d in &cert.disjuncts {
                        text.push_str(&format!("  {d}\n"));
                    }
                    let mut out = json!({ "kind": "valid", "certificate": serde_json::to_value(&cert).unwrap_or(Value::Null) });
                    if *trace {
                        let t = reassemble(&cert)?;
                        text.push_str("trace:\n");
                        for s in &t.steps {
                            text.push_str(&format!("  {s}\n"));
                        }
                        out["trace"] = t.steps.iter().map(|s| Value::String(s.to_string())).collect();
                    }
                    Outcome::new(0, text.trim_end(), out)
                }
            }
        }
        Command::CheckCert { file } => {
            let cert = goedel::herbrand::Certificate::from_json(&read(file)?)?;
            let ok = verify_certificate(&cert)?;
            let text = if ok { "certificate verified" } else { "certificate rejected" };
            Outcome::new(if ok { 0 } else { 1 }, text, json!({ "kind": if ok { "accepted" } else { "rejected" } }))
        }
        Command::CheckProof { file, truth_set: ts, max_universe } => {
            let d = parse_derivation(&read(file)?).map_err(input)?;
            match check(&d) {
                Verdict::Rejected { step, reason } => Outcome::new(
                    1,
                    format!("rejected at step {step}: {reason}"),
                    json!({ "kind": "rejected", "step": step, "reason": reason.to_string() }),
                ),
                Verdict::Accepted => {
                    let concl = d.conclusion().map(|f| f.to_string()).unwrap_or_default();
                    let mut text = format!("accepted ({} steps, system {}): {concl}", d.steps.len(), d.system);
                    let mut out = json!({ "kind": "accepted", "steps": d.steps.len(), "system": d.system.to_string(), "conclusion": concl });
                    if let Some(ts) = ts {
                        let v = truth_set(ts)?;
                        match soundness_sample(&d, &v, *max_universe, b).map_err(|e| match e {
                            goedel::proofkit::ProofError::Semantics(s) => Failure::from(s),
                            other => input(other),
                        })? {
                            Soundness::Consistent => {
                                text.push_str(&format!("\nno step fails over {v} with up to {max_universe} elements"));
                                out["sample"] = json!({ "kind": "consistent", "truth_set": v.to_string() });
                            }
                            Soundness::Violation { step, countermodel } => {
                                let m = interpretation_to_json(&Interpretation::Finite(countermodel));
                                text = format!("accepted, but step {step} is not entailed by the premises:\n{m:#}");
                                out = json!({ "kind": "unsound", "step": step, "countermodel": m });
                                return Ok(Outcome::new(1, text, out));
                            }
                        }
                    }
                    Outcome::new(0, text, out)
                }
            }
        }
        Command::Transform { kind, file, weak } => {
            let f = formula_arg(&format!("@{file}"))?;
            transform(*kind, &f, *weak)?
        }
        Command::Embed { truth_set: ts, points } => {
            let v = truth_set(ts)?;
            let pts = points
                .iter()
                .map(|p| parse_rational(p).ok_or_else(|| input(format!("bad rational `{p}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let kernel = v.cb_kernel();
            let target: &SetAtom = kernel.first().ok_or_else(|| input(format!("{v} has no perfect part")))?;
            let out = embed_into_perfect(&pts, target).map_err(input)?;
            let strs: Vec<String> = out.iter().map(fmt_q).collect();
            Outcome::new(0, strs.join(" "), json!({ "kind": "embedding", "target": target.to_string(), "points": strs }))
        }
    })
}

fn transform(kind: Kind, f: &Formula, weak: bool) -> Result<Outcome, Failure> {
    let (name, header, result) = match kind {
        Kind::Ag | Kind::Ah => {
            let r = if matches!(kind, Kind::Ag) { to_ag(f) } else { to_ah(f) };
            let r = r.map_err(input)?;
            let name = if matches!(kind, Kind::Ag) { "ag" } else { "ah" };
            let fresh: Vec<String> = r.fresh.preds.iter().map(|(p, k)| format!("{p}/{k}"))
                .chain(r.fresh.funcs.iter().map(|(p, k)| format!("{p}/{k}")))
                .collect();
            (name, vec![r.note.to_string(), format!("fresh symbols: {}", fresh.join(", "))], r.formula)
        }
        Kind::Botfree => {
            let r = to_bot_free(f).map_err(input)?;
            let note = format!("bottom replaced by {}{}", r.letter, if r.guarded { ", guarded" } else { "" });
            ("botfree", vec![note], r.formula)
        }
        Kind::Forallfree => ("forallfree", vec![], forall_free_shift(f).map_err(input)?),
        Kind::Prenex => {
            let r = if weak { prenex_weakening(f) } else { prenex_crisp(f) };
            match r {
                Ok(p) => {
                    let mut h = vec![if p.is_equivalent() { "equivalent to the input" } else { "implies the input" }.to_string()];
                    h.extend(p.shifts.iter().map(|s| format!("shift: {s}")));
                    ("prenex", h, p.formula)
                }
                Err(e @ goedel::transforms::TransformError::Inadmissible { .. }) => {
                    return Ok(Outcome::new(1, format!("rejected: {e}"), json!({ "kind": "rejected", "reason": e.to_string() })));
                }
                Err(e) => return Err(input(e)),
            }
        }
    };
    let mut text = format!("# transform {name} of: {f}\n");
    for h in &header {
        text.push_str(&format!("# {h}\n"));
    }
    text.push_str(&result.to_string());
    Ok(Outcome::new(0, text, json!({
        "kind": "transformed",
        "transform": name,
        "input": f.to_string(),
        "notes": header,
        "formula": result.to_string(),
    })))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let (code, stdout, stderr) = match run(&cli) {
        Ok(o) => {
            let body = if cli.json {
                let mut j = o.json;
                j["schema_version"] = json!(SCHEMA_VERSION);
                serde_json::to_string_pretty(&j).unwrap_or_default()
            } else {
                o.text
            };
            (o.code, Some(body), None)
        }
        Err(f) => {
            if cli.json {
                let j = json!({ "schema_version": SCHEMA_VERSION, "kind": "error", "code": f.code, "message": f.msg });
                (f.code, Some(serde_json::to_string_pretty(&j).unwrap_or_default()), None)
            } else {
                (f.code, None, Some(format!("error: {}", f.msg)))
            }
        }
    };
    if let Some(s) = stdout {
        println!("{s}");
    }
    if let Some(s) = stderr {
        eprintln!("{s}");
    }
    ExitCode::from(code)
}
