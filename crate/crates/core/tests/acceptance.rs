//! One pass/fail line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nact::enumerate::{enumerate, index_of};
use nact::formula::{
    alpha_eq, alpha_key_term, expand_keep_equality, ko, lookup, parse_formula, singleton, Formula, Term,
};
use nact::ledger::{read_ledger, run};
use nact::model::{all_models, check_system, classify, search_models, ClassKind, FiniteModel};
use nact::prover::{check_trace, derive, prove, ProofBudget, ProofStatus, Tree};
use nact::sa::{body_of, classify_sa, sa_formula, VerdictKind};
use nact::schema::{SchemaId, SystemSpec};
use nact::stratify::{stratify, Stratification};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, why: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why.into())
    }
}

fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    alpha_key_term(a) == alpha_key_term(b)
}

// signed formulas derived anywhere below a node, split labels included
fn derived(t: &Tree, out: &mut Vec<(bool, Formula)>) {
    for s in t.steps() {
        out.extend(s.conclusions.iter().map(|c| (c.sign, c.formula.clone())));
    }
    if let Tree::Split { children, .. } = t {
        for (s, c) in children {
            out.push((s.sign, s.formula.clone()));
            derived(c, out);
        }
    }
}

fn find_cut<'a>(t: &'a Tree, d: &Formula) -> Option<&'a [(nact::prover::Signed, Tree)]> {
    match t {
        Tree::Closed { .. } => None,
        Tree::Split { children, .. } => {
            if children.iter().any(|(s, _)| alpha_eq(&s.formula, d)) && children.len() == 2 {
                return Some(children);
            }
            children.iter().find_map(|(_, c)| find_cut(c, d))
        }
    }
}

fn si_prime() -> Outcome {
    let axioms = [Formula::Set(lookup("si'").unwrap())];
    let start = Instant::now();
    let r = prove(&axioms, &Formula::Falsum, &ProofBudget::default());
    let took = start.elapsed();
    ensure(r.status == ProofStatus::Proved, format!("{:?} after {} steps", r.status, r.steps_used))?;
    ensure(r.steps_used <= 50_000 && took < Duration::from_secs(60), format!("{} steps, {took:?}", r.steps_used))?;
    let trace = r.trace.as_ref().unwrap();
    check_trace(&axioms, &Formula::Falsum, r.status, trace).map_err(|e| format!("checker: {e:?}"))?;
    // {si'} in si' is split on, and each side derives the other
    let d = expand_keep_equality(&parse_formula("{$si'} in $si'").unwrap());
    let sides = find_cut(&trace.tree, &d).ok_or("no split on {si'} in si'")?;
    let Formula::Set(si) = expand_keep_equality(&axioms[0]) else { unreachable!() };
    for (s, sub) in sides {
        let mut seen = Vec::new();
        derived(sub, &mut seen);
        // the opposite literal, possibly about a witness c with si' = c
        let mut names = vec![si.clone()];
        for (sign, f) in &seen {
            if let (true, Formula::Equal(a, Term::Var(c))) = (sign, f) {
                if alpha_eq_term(a, &si) {
                    names.push(Term::Var(*c));
                }
            }
        }
        let other = names.iter().any(|t| {
            let opposite = expand_keep_equality(&Formula::Member(singleton(t), t.clone()));
            seen.iter().any(|(sign, f)| *sign != s.sign && alpha_eq(f, &opposite))
        });
        ensure(other, format!("the {} side never derives its opposite", if s.sign { "T" } else { "F" }))?;
    }
    Ok(format!("{} steps, {:.2?}, {{si'}} in si' <-> not {{si'}} in si', trace re-checked", r.steps_used, took))
}

fn small_models() -> Outcome {
    let nact = SystemSpec::custom("5+6", [SchemaId::Axiom5, SchemaId::Axiom6]);
    let one = FiniteModel::new(vec![vec![]]).unwrap();
    let report = check_system(&one, &nact).unwrap();
    ensure(report.holds, "1/0 fails axiom 5 or 6")?;
    ensure(
        (0..2).all(|c| oracle_holds(&one, SchemaId::Axiom5, c) && oracle_holds(&one, SchemaId::Axiom6, c)),
        "oracle disagrees on 1/0",
    )?;
    let plus = SystemSpec::custom("5a+6c", [SchemaId::Axiom5a, SchemaId::Axiom6c]);
    let found = search_models(3, &plus).unwrap();
    ensure(found.is_empty(), format!("{} models of 5a+6c", found.len()))?;
    let mut checked = 0;
    for n in 1..=3 {
        for m in all_models(n) {
            checked += 1;
            let ok = (0..1u32 << n)
                .all(|c| oracle_holds(&m, SchemaId::Axiom5a, c) && oracle_holds(&m, SchemaId::Axiom6c, c));
            ensure(!ok, format!("oracle finds a 5a+6c model {}", m.compact()))?;
        }
    }
    Ok(format!("1/0 satisfies 5 and 6; no 5a+6c model among {checked} models of size <= 3"))
}

fn trichotomy_of(m: &FiniteModel) -> usize {
    let mut bad = 0;
    let all = (1u32 << m.size()) - 1;
    for c in 0..=all {
        let kind = classify(m, c);
        let exact = [kind == ClassKind::Slim, kind.is_medium(), kind == ClassKind::Mighty];
        if exact.iter().filter(|b| **b).count() != 1 || kind != oracle_kind(m, c) {
            bad += 1;
        }
    }
    // Slim ∪ Mighty and Ko(Medium) as sets of classes
    let outer: HashSet<u32> = (0..=all).filter(|&c| !classify(m, c).is_medium()).collect();
    let medium: HashSet<u32> = (0..=all).filter(|&c| oracle_kind(m, c).is_medium()).collect();
    let ko_medium: HashSet<u32> = (0..=all).filter(|c| !medium.contains(c)).collect();
    if outer != ko_medium {
        bad += 1;
    }
    bad
}

fn trichotomy() -> Outcome {
    let (mut models, mut bad) = (0, 0);
    for n in 1..=3 {
        for m in all_models(n) {
            models += 1;
            bad += trichotomy_of(&m);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sampled = 0;
    while sampled < 1000 {
        let ext: Vec<u32> = (0..4).map(|_| rng.gen_range(0..16)).collect();
        let Ok(m) = FiniteModel::from_masks(ext) else { continue };
        sampled += 1;
        bad += trichotomy_of(&m);
    }
    ensure(bad == 0, format!("{bad} violations"))?;
    Ok(format!("{models} models with n <= 3 and {sampled} sampled with n = 4, 0 violations"))
}

fn stratifier() -> Outcome {
    let corpus = enumerate(500);
    let mut stratified = 0;
    for f in &corpus {
        let s = stratify(f);
        ensure(s.is_stratified() == brute_force(f), format!("disagrees with brute force on {f}"))?;
        if let Stratification::Stratified(t) = &s {
            ensure(t.verifies(f), format!("bad witness for {f}"))?;
            stratified += 1;
        }
        let n = Formula::not(f.clone());
        ensure(stratify(&n).is_stratified() == s.is_stratified(), format!("negation closure fails at {f}"))?;
    }
    Ok(format!("500 formulas ({stratified} stratified), brute force and negation closure agree"))
}

fn enumerator() -> Outcome {
    let four: Vec<String> = enumerate(4).iter().map(|f| f.to_string()).collect();
    ensure(four == ["verum", "falsum", "x in x", "not x in x"], format!("{four:?}"))?;
    for (i, f) in enumerate(500).iter().enumerate() {
        ensure(index_of(f) == Ok(i), format!("index_of({f}) = {:?}, expected {i}", index_of(f)))?;
    }
    Ok("[verum, falsum, x in x, not x in x]; index_of round-trips on 500".into())
}

fn sa_verdicts() -> Outcome {
    let sys = SystemSpec::preset("NACT-PriNSA").unwrap();
    let budget = ProofBudget::default();
    let body = |name: &str| body_of(&lookup(name).unwrap()).unwrap();
    let ko_ru = body_of(&ko(&lookup("Ru").unwrap())).unwrap();
    let expected = [
        ("0", body("0"), VerdictKind::NSAValidSet),
        ("V", body("V"), VerdictKind::SAValid),
        ("Ru", body("Ru"), VerdictKind::SAValid),
        ("Ko(Ru)", ko_ru, VerdictKind::Unknown),
    ];
    let mut shown = Vec::new();
    for (name, a, want) in &expected {
        let got = classify_sa(a, &sys, &budget).map_err(|e| e.to_string())?.kind();
        ensure(got == *want, format!("{name}: {got:?}, expected {want:?}"))?;
        shown.push(format!("{name} {got:?}"));
    }
    // both directions are never derivable for the same formula
    let small = ProofBudget::with_steps(300);
    let mut corpus: Vec<Formula> = expected.iter().map(|(_, a, _)| a.clone()).collect();
    corpus.extend(enumerate(80).into_iter().skip(2));
    for a in &corpus {
        let axioms = nact::sa::instance_axioms(a, &sys).map_err(|e| e.to_string())?;
        if derive(&axioms, &Formula::Falsum, &small).is_proved() {
            continue;
        }
        let sa = sa_formula(a, &sys).unwrap();
        let yes = derive(&axioms, &sa, &small).is_proved();
        let no = derive(&axioms, &Formula::not(sa), &small).is_proved();
        ensure(!(yes && no), format!("both SA and its negation derivable for {a}"))?;
    }
    Ok(format!("{}; never both SAValid and NSAValidSet on {} formulas", shown.join(", "), corpus.len()))
}

fn ledger() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let whole = dir.path().join("whole.jsonl");
    let parts = dir.path().join("parts.jsonl");
    let sys = SystemSpec::preset("NACT-PriNSA").unwrap();
    let budget = ProofBudget::with_steps(60);
    let report = run(&sys, 1000, &budget, &whole, false).map_err(|e| e.to_string())?;
    ensure(report.enumerated == 1000, format!("{} enumerated", report.enumerated))?;
    ensure(
        report.classified + report.skipped == report.enumerated,
        format!("{} + {} != {}", report.classified, report.skipped, report.enumerated),
    )?;
    // quarantine: scan the raw lines
    let text = std::fs::read_to_string(&whole).map_err(|e| e.to_string())?;
    let mut bad: Vec<(u64, Formula)> = Vec::new();
    let mut records = 0;
    for line in text.lines().skip(1) {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if v["kind"] != "record" {
            continue;
        }
        records += 1;
        let f = parse_formula(v["formula"].as_str().unwrap()).map_err(|e| e.to_string())?;
        let ancestor = bad.iter().find(|(_, q)| mentions(&f, q)).map(|(i, _)| *i);
        ensure(v["quarantined_by"].as_u64() == ancestor, format!("quarantine mismatch at {f}"))?;
        ensure(ancestor.is_none() || v["verdict"].is_null(), format!("{f} was processed despite its ancestor"))?;
        if v["verdict"] == "Inconsistent" {
            bad.push((v["index"].as_u64().unwrap(), f));
        }
    }
    ensure(records == 1000, format!("{records} record lines"))?;
    run(&sys, 400, &budget, &parts, false).map_err(|e| e.to_string())?;
    run(&sys, 1000, &budget, &parts, true).map_err(|e| e.to_string())?;
    let same = std::fs::read(&whole).ok() == std::fs::read(&parts).ok();
    ensure(same, "resumed ledger differs from the single run")?;
    read_ledger(&parts).map_err(|e| e.to_string())?;
    Ok(format!(
        "1000 enumerated = {} classified + {} skipped, {} quarantined ancestors, resume byte-identical",
        report.classified,
        report.skipped,
        bad.len()
    ))
}

fn schema_logic() -> Outcome {
    let budget = ProofBudget::with_steps(2000);
    for a in sample(100, 8) {
        let r = prove(&instance(SchemaId::Axiom5, &a), &conjunction(instance(SchemaId::Axiom5a, &a)), &budget);
        ensure(r.is_proved(), format!("Axiom5 => Axiom5a not proved at {a}"))?;
        let r = prove(&instance(SchemaId::SiNSA, &a), &conjunction(instance(SchemaId::PriNSA, &a)), &budget);
        ensure(r.is_proved(), format!("SiNSA => PriNSA not proved at {a}"))?;
    }
    Ok("100 sampled formulas: Axiom5 => Axiom5a and SiNSA => PriNSA proved".into())
}

fn soundness() -> Outcome {
    let budget = ProofBudget::with_steps(500);
    let (mut decided, mut total) = (0, 0);
    for (axioms, goal) in corpus() {
        total += 1;
        let r = prove(&axioms, &goal, &budget);
        if r.status == ProofStatus::OutOfBudget {
            continue;
        }
        decided += 1;
        let bad = countermodels(&axioms, &goal, &r);
        ensure(bad.is_empty(), format!("{goal} ({:?}) fails in {bad:?}", r.status))?;
    }
    Ok(format!("{decided} of {total} sequents decided, all hold in every model of size <= 2"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("si' paradox", si_prime),
        ("small models", small_models),
        ("trichotomy", trichotomy),
        ("stratifier oracle", stratifier),
        ("enumerator prefix", enumerator),
        ("SA library verdicts", sa_verdicts),
        ("ledger discipline", ledger),
        ("schema logic", schema_logic),
        ("prover soundness", soundness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
