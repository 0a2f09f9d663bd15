mod common;

use common::*;

use nact::formula::lookup;
use nact::formula::Formula;
use nact::prover::{check_trace, prove, ProofBudget, ProofStatus};
use nact::sa::{body_of, classify_sa, Verdict};
use nact::schema::{axioms_for, instantiate, SchemaId, SystemSpec};

#[test]
fn schema_implications_on_sampled_formulas() {
    let budget = ProofBudget::with_steps(2000);
    for a in sample(100, 8) {
        let r = prove(&instance(SchemaId::Axiom5, &a), &conjunction(instance(SchemaId::Axiom5a, &a)), &budget);
        assert!(r.is_proved(), "Axiom5 => Axiom5a at {a}");
        let r = prove(&instance(SchemaId::SiNSA, &a), &conjunction(instance(SchemaId::PriNSA, &a)), &budget);
        assert!(r.is_proved(), "SiNSA => PriNSA at {a}");
    }
}

#[test]
fn proved_sequents_hold_in_small_models() {
    let budget = ProofBudget::with_steps(500);
    let mut decided = 0;
    for (axioms, goal) in corpus() {
        let r = prove(&axioms, &goal, &budget);
        if r.status == ProofStatus::OutOfBudget {
            continue;
        }
        decided += 1;
        if let Err(e) = check_trace(&axioms, &goal, r.status, r.trace.as_ref().unwrap()) {
            panic!("{axioms:?} |- {goal} {:?}: {e:?}", r.status);
        }
        let bad = countermodels(&axioms, &goal, &r);
        assert!(bad.is_empty(), "{axioms:?} |- {goal}: {:?} fails in {bad:?}", r.status);
    }
    assert!(decided >= 40, "only {decided} sequents decided");
}

#[test]
fn verdict_proofs_hold_in_small_models() {
    let sys = SystemSpec::preset("NACT-PriNSA").unwrap();
    for name in ["0", "V", "Ru"] {
        let a = body_of(&lookup(name).unwrap()).unwrap();
        let axioms = axioms_for(&instantiate(&sys, &a).unwrap());
        let v = classify_sa(&a, &sys, &ProofBudget::default()).unwrap();
        let (proof, goal) = match &v {
            Verdict::SAValid { proof } => (proof, nact::sa::sa_formula(&a, &sys).unwrap()),
            Verdict::NSAValidSet { proof } => (proof, Formula::not(nact::sa::sa_formula(&a, &sys).unwrap())),
            other => panic!("{name}: {:?}", other.kind()),
        };
        assert!(countermodels(&axioms, &goal, proof).is_empty(), "{name}");
    }
}
