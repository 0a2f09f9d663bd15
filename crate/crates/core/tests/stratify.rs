mod common;

use common::*;

use nact::enumerate::enumerate;
use nact::formula::{lookup, parse_formula, Formula, Term, Var};
use nact::stratify::{stratify, Stratification};

#[test]
fn agrees_with_brute_force_on_the_stream() {
    let mut stratified = 0;
    for f in enumerate(500) {
        let s = stratify(&f);
        assert_eq!(s.is_stratified(), brute_force(&f), "{f}");
        match &s {
            Stratification::Stratified(t) => {
                assert!(t.verifies(&f), "{f}");
                stratified += 1;
            }
            Stratification::Unstratifiable(cycle) => {
                assert!(!cycle.is_empty());
            }
        }
    }
    // both outcomes occur in the sample
    assert!(stratified > 0 && stratified < 500);
}

#[test]
fn negation_closure() {
    let mut corpus = enumerate(500);
    for name in ["0", "V", "Ru", "si", "si'"] {
        let t = lookup(name).unwrap();
        corpus.push(Formula::Set(t.clone()));
        corpus.push(Formula::Member(Term::Var(Var::X), t));
    }
    for f in corpus {
        let n = Formula::not(f.clone());
        assert_eq!(stratify(&f).is_stratified(), stratify(&n).is_stratified(), "{f}");
        if let Stratification::Stratified(t) = stratify(&n) {
            assert!(t.verifies(&n));
        }
    }
}

#[test]
fn library_classes() {
    let p = |s: &str| parse_formula(s).unwrap();
    assert!(stratify(&p("set($V)")).is_stratified());
    assert!(stratify(&p("set($0)")).is_stratified());
    assert!(!stratify(&p("set($Ru)")).is_stratified());
    assert!(!stratify(&p("x in x")).is_stratified());
    assert!(!stratify(&p("forall x1: (x1 in x and not x in x1)")).is_stratified());
    assert!(stratify(&p("forall x1: (x1 in x implies x1 = x1)")).is_stratified());
}
