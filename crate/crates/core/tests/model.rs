mod common;

use common::*;

use std::collections::BTreeMap;

use nact::enumerate::enumerate;
use nact::formula::{expand, lookup, Formula, Var};
use nact::model::{all_models, check_system, classify, eval, search_models, ClassKind, FiniteModel};
use nact::schema::{SchemaId, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn trichotomy_violations(m: &FiniteModel) -> usize {
    let mut bad = 0;
    for c in 0..(1u32 << m.size()) {
        let kind = classify(m, c);
        let flags = [kind == ClassKind::Slim, kind.is_medium(), kind == ClassKind::Mighty];
        if flags.iter().filter(|b| **b).count() != 1 || kind != oracle_kind(m, c) {
            bad += 1;
        }
        // slim or mighty exactly when the class is outside Medium
        let slim_or_mighty = matches!(oracle_kind(m, c), ClassKind::Slim | ClassKind::Mighty);
        if slim_or_mighty == kind.is_medium() {
            bad += 1;
        }
        let k = classify(m, complement(m, c));
        let involution = match kind {
            ClassKind::Slim => k == ClassKind::Mighty,
            ClassKind::Mighty => k == ClassKind::Slim,
            ClassKind::Medium { .. } => k.is_medium(),
        };
        if !involution {
            bad += 1;
        }
    }
    bad
}

#[test]
fn trichotomy_small_models_exhaustive() {
    let mut total = 0;
    for n in 1..=3 {
        for m in all_models(n) {
            total += trichotomy_violations(&m);
        }
    }
    assert_eq!(total, 0);
}

#[test]
fn trichotomy_sampled_four_element_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total = 0;
    let mut sampled = 0;
    while sampled < 1000 {
        let ext: Vec<u32> = (0..4).map(|_| rng.gen_range(0..16)).collect();
        let Ok(m) = FiniteModel::from_masks(ext) else { continue };
        sampled += 1;
        total += trichotomy_violations(&m);
    }
    assert_eq!(total, 0);
}

#[test]
fn check_system_agrees_with_per_class_loop() {
    let ids = [SchemaId::Axiom5, SchemaId::Axiom6, SchemaId::Axiom5a, SchemaId::Axiom6c, SchemaId::Sharp2];
    for n in 1..=3 {
        for m in all_models(n) {
            for id in ids {
                let sys = SystemSpec::custom("one", [id]);
                let report = check_system(&m, &sys).unwrap();
                let expected: Vec<u32> = (0..1u32 << n).filter(|&c| !oracle_holds(&m, id, c)).collect();
                let got: Vec<u32> = report.counterexamples.iter().map(|(_, c)| *c).collect();
                assert_eq!(got, expected, "{id} in {}", m.compact());
                assert_eq!(report.holds, expected.is_empty());
            }
        }
    }
}

#[test]
fn small_model_claims() {
    let nact = SystemSpec::custom("5+6", [SchemaId::Axiom5, SchemaId::Axiom6]);
    let empty = FiniteModel::new(vec![vec![]]).unwrap();
    let report = check_system(&empty, &nact).unwrap();
    assert!(report.holds && report.counterexamples.is_empty());
    assert!(search_models(1, &nact).unwrap().contains(&empty));
    let selfish = FiniteModel::new(vec![vec![0]]).unwrap();
    assert!(!check_system(&selfish, &nact).unwrap().holds);
    let two = FiniteModel::new(vec![vec![], vec![0]]).unwrap();
    assert!(check_system(&two, &nact).unwrap().holds);

    let plus = SystemSpec::custom("5a+6c", [SchemaId::Axiom5a, SchemaId::Axiom6c]);
    assert!(search_models(3, &plus).unwrap().is_empty());
    // the same search by brute force with the oracle
    for n in 1..=3 {
        for m in all_models(n) {
            let ok = (0..1u32 << n)
                .all(|c| oracle_holds(&m, SchemaId::Axiom5a, c) && oracle_holds(&m, SchemaId::Axiom6c, c));
            assert!(!ok, "{}", m.compact());
        }
    }
}

#[test]
fn search_is_ordered_and_complete() {
    let none = SystemSpec::custom("none", []);
    let all = search_models(2, &none).unwrap();
    // 2 injective maps at n = 1, 4 * 3 at n = 2
    assert_eq!(all.len(), 2 + 12);
    assert!(all.windows(2).all(|w| (w[0].size(), w[0].exts()) < (w[1].size(), w[1].exts())));
}

#[test]
fn eval_respects_expand() {
    let mut corpus: Vec<Formula> = enumerate(300);
    for name in ["0", "V", "Ru", "Ru2", "si", "si'"] {
        let t = lookup(name).unwrap();
        corpus.push(Formula::Set(t.clone()));
        corpus.push(Formula::Member(t.clone(), t.clone()));
        corpus.push(Formula::Fund(t.clone()));
        corpus.push(Formula::Equal(nact::formula::Term::Var(Var::X), t));
    }
    for n in 1..=2 {
        for m in all_models(n) {
            for f in &corpus {
                for e in 0..n {
                    let env = BTreeMap::from([(Var::X, e)]);
                    assert_eq!(
                        eval(&m, f, &env).unwrap(),
                        eval(&m, &expand(f), &env).unwrap(),
                        "{f} in {}",
                        m.compact()
                    );
                }
            }
        }
    }
}
