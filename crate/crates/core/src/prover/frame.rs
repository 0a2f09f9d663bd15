//! Shapes the frame rules recognise, in the core form the prover works on.

use crate::formula::{expand_keep_equality, pair, singleton, Formula, Term};

pub fn term_size(t: &Term) -> usize {
    t.size()
}

fn core(t: Term) -> Term {
    match expand_keep_equality(&Formula::Set(t)) {
        Formula::Set(t) => t,
        _ => unreachable!("expansion keeps atoms"),
    }
}

/// `{a}` as the prover spells it.
pub fn singleton_core(a: &Term) -> Term {
    core(singleton(a))
}

/// `{a, b}` as the prover spells it.
pub fn pair_core(a: &Term, b: &Term) -> Term {
    core(pair(a, b))
}

pub fn is_singleton(t: &Term) -> bool {
    match t {
        Term::Abs { var, body, restricted: true } => match body.as_ref() {
            Formula::Equal(Term::Var(z), a) => z == var && !a.free_vars().contains(var),
            _ => false,
        },
        _ => false,
    }
}

/// The components of `{|z: not (not z = a and not z = b)|}`.
pub fn as_pair(t: &Term) -> Option<(Term, Term)> {
    let Term::Abs { var, body, restricted: true } = t else { return None };
    let Formula::Not(inner) = body.as_ref() else { return None };
    let Formula::And(l, r) = inner.as_ref() else { return None };
    let side = |f: &Formula| match f {
        Formula::Not(e) => match e.as_ref() {
            Formula::Equal(Term::Var(z), a) if z == var && !a.free_vars().contains(var) => Some(a.clone()),
            _ => None,
        },
        _ => None,
    };
    Some((side(l)?, side(r)?))
}

/// `z in t iff z in s` in core form; one extensionality instance of `t = s`.
pub fn eq_instance(z: &Term, t: &Term, s: &Term) -> Formula {
    let zt = Formula::Member(z.clone(), t.clone());
    let zs = Formula::Member(z.clone(), s.clone());
    let imp = |a: Formula, b: Formula| Formula::not(Formula::and(a, Formula::not(b)));
    Formula::and(imp(zt.clone(), zs.clone()), imp(zs, zt))
}

pub enum Parts {
    Single(Term),
    Pair(Term, Term),
}

pub fn parts(t: &Term) -> Option<Parts> {
    if is_singleton(t) {
        if let Term::Abs { body, .. } = t {
            if let Formula::Equal(_, a) = body.as_ref() {
                return Some(Parts::Single(a.clone()));
            }
        }
    }
    as_pair(t).map(|(a, b)| Parts::Pair(a, b))
}
