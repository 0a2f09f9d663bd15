//! Named class terms. Closed constants are written in the concrete syntax;
//! parametric constructions are built directly so their binders can be
//! chosen fresh for the arguments.

use std::collections::BTreeSet;

use super::ops::fresh_var;
use super::parse::parse_term;
use super::{Formula, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTerm {
    pub name: &'static str,
    pub definition: Term,
}

/// Closed constants, in the order `library()` lists them.
pub const NAMES: &[&str] = &["0", "V", "Ru", "Ru2", "si", "si'", "On", "Omega"];

fn definition_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "0" => "{x: not x = x}",
        "V" => "{x: x = x}",
        "Ru" => "{x: not x in x}",
        "Ru2" => "{|x: not exists x1: (x in x1 and x1 in x)|}",
        "si" => "{x: exists x1: x = {x1}}",
        "si'" => "{x: exists x1: (x = {x1} and not {x1} in x1)}",
        // transitive sets of transitive sets
        "On" => concat!(
            "{x: forall x1: forall x2: (x1 in x2 and x2 in x implies x1 in x) and ",
            "forall x1: (x1 in x implies forall x2: forall x3: (x2 in x3 and x3 in x1 implies x2 in x1))}"
        ),
        // ordinals all of whose elements (and itself) are zero or successors
        "Omega" => concat!(
            "{x: x in $On and forall x1: (x1 in x or x1 = x implies x1 = $0 or ",
            "exists x2: forall x3: (x3 in x1 iff x3 in x2 or x3 = x2))}"
        ),
        _ => return None,
    })
}

fn binder_for(args: &[&Term]) -> Var {
    let mut avoid = BTreeSet::new();
    for a in args {
        avoid.extend(a.all_vars());
    }
    fresh_var(&avoid)
}

/// `Ko(t) = {z: not z in t}`
pub fn ko(t: &Term) -> Term {
    let z = binder_for(&[t]);
    Term::abs(z, Formula::not(Formula::Member(Term::Var(z), t.clone())))
}

/// `{t} = {|z: z = t|}`
pub fn singleton(t: &Term) -> Term {
    let z = binder_for(&[t]);
    Term::restricted(z, Formula::Equal(Term::Var(z), t.clone()))
}

/// `{a, b} = {|z: z = a or z = b|}`
pub fn pair(a: &Term, b: &Term) -> Term {
    let z = binder_for(&[a, b]);
    Term::restricted(z, Formula::or(Formula::Equal(Term::Var(z), a.clone()), Formula::Equal(Term::Var(z), b.clone())))
}

/// `Power(t) = {z: forall w (w in z implies w in t)}`
pub fn power(t: &Term) -> Term {
    let z = binder_for(&[t]);
    let w = Var(z.0 + 1);
    Term::abs(
        z,
        Formula::forall(
            w,
            Formula::implies(Formula::Member(Term::Var(w), Term::Var(z)), Formula::Member(Term::Var(w), t.clone())),
        ),
    )
}

/// `Union(t) = {z: exists w (w in t and z in w)}`
pub fn union(t: &Term) -> Term {
    let z = binder_for(&[t]);
    let w = Var(z.0 + 1);
    Term::abs(
        z,
        Formula::exists(
            w,
            Formula::and(Formula::Member(Term::Var(w), t.clone()), Formula::Member(Term::Var(z), Term::Var(w))),
        ),
    )
}

/// Kuratowski pair `{{a}, {a, b}}`.
pub fn opair(a: &Term, b: &Term) -> Term {
    pair(&singleton(a), &pair(a, b))
}

/// `f[d] = {y: exists u (u in d and <u, y> in f)}`
pub fn image(f: &Term, d: &Term) -> Term {
    let y = binder_for(&[f, d]);
    let u = Var(y.0 + 1);
    Term::abs(
        y,
        Formula::exists(
            u,
            Formula::and(
                Formula::Member(Term::Var(u), d.clone()),
                Formula::Member(opair(&Term::Var(u), &Term::Var(y)), f.clone()),
            ),
        ),
    )
}

/// `Function(f)`: every element of `f` is an ordered pair and `f` is single-valued.
pub fn function(f: &Term) -> Formula {
    let p = binder_for(&[f]);
    let (a, b, c) = (Var(p.0 + 1), Var(p.0 + 2), Var(p.0 + 3));
    let v = |x: Var| Term::Var(x);
    let pairs = Formula::forall(
        p,
        Formula::implies(
            Formula::Member(v(p), f.clone()),
            Formula::exists(a, Formula::exists(b, Formula::Equal(v(p), opair(&v(a), &v(b))))),
        ),
    );
    let single_valued = Formula::forall(
        a,
        Formula::forall(
            b,
            Formula::forall(
                c,
                Formula::implies(
                    Formula::and(
                        Formula::Member(opair(&v(a), &v(b)), f.clone()),
                        Formula::Member(opair(&v(a), &v(c)), f.clone()),
                    ),
                    Formula::Equal(v(b), v(c)),
                ),
            ),
        ),
    );
    Formula::and(pairs, single_valued)
}

/// Resolve `$name` or `$name(args)`.
pub fn named_term(name: &str, args: &[Term]) -> Option<Term> {
    match (name, args) {
        ("Ko", [t]) => Some(ko(t)),
        ("Single", [t]) => Some(singleton(t)),
        ("Pair", [a, b]) => Some(pair(a, b)),
        ("Power", [t]) => Some(power(t)),
        ("Union", [t]) => Some(union(t)),
        ("OPair", [a, b]) => Some(opair(a, b)),
        ("Image", [f, d]) => Some(image(f, d)),
        (_, []) => {
            let text = definition_text(name)?;
            Some(parse_term(text).expect("library definitions parse"))
        }
        _ => None,
    }
}

pub fn lookup(name: &str) -> Option<Term> {
    named_term(name, &[])
}

pub fn library() -> Vec<NamedTerm> {
    NAMES.iter().map(|&name| NamedTerm { name, definition: lookup(name).expect("known name") }).collect()
}
