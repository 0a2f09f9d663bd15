use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Formula, Term, Var, BOUND_BASE};

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        free_f(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every variable that occurs, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        vars_f(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

impl Term {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        free_t(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        vars_t(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

fn free_t(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) {
                out.insert(*v);
            }
        }
        Term::Abs { var, body, .. } => {
            bound.push(*var);
            free_f(body, bound, out);
            bound.pop();
        }
    }
}

fn free_f(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Verum | Formula::Falsum => {}
        Formula::Member(a, b) | Formula::Equal(a, b) => {
            free_t(a, bound, out);
            free_t(b, bound, out);
        }
        Formula::Set(t) | Formula::Slim(t) | Formula::Fund(t) => free_t(t, bound, out),
        Formula::Not(a) => free_f(a, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            free_f(a, bound, out);
            free_f(b, bound, out);
        }
        Formula::ForAll(v, a) | Formula::Exists(v, a) => {
            bound.push(*v);
            free_f(a, bound, out);
            bound.pop();
        }
    }
}

fn vars_t(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            out.insert(*v);
        }
        Term::Abs { var, body, .. } => {
            out.insert(*var);
            vars_f(body, out);
        }
    }
}

fn vars_f(f: &Formula, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Verum | Formula::Falsum => {}
        Formula::Member(a, b) | Formula::Equal(a, b) => {
            vars_t(a, out);
            vars_t(b, out);
        }
        Formula::Set(t) | Formula::Slim(t) | Formula::Fund(t) => vars_t(t, out),
        Formula::Not(a) => vars_f(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            vars_f(a, out);
            vars_f(b, out);
        }
        Formula::ForAll(v, a) | Formula::Exists(v, a) => {
            out.insert(*v);
            vars_f(a, out);
        }
    }
}

/// Smallest ordinary variable above every ordinary variable in `avoid`.
pub fn fresh_var<'a>(avoid: impl IntoIterator<Item = &'a Var>) -> Var {
    let max = avoid.into_iter().filter(|v| v.0 < BOUND_BASE).map(|v| v.0).max();
    Var(max.map_or(1, |m| m + 1))
}

/// True iff the only free variable is `x`.
pub fn is_parameter_free(f: &Formula) -> bool {
    f.free_vars().iter().all(|v| *v == Var::X)
}

/// Capture-avoiding substitution of `t` for the free occurrences of `v`.
pub fn substitute(f: &Formula, v: Var, t: &Term) -> Formula {
    let tfree = t.free_vars();
    subst_f(f, v, t, &tfree)
}

pub fn subst_term(s: &Term, v: Var, t: &Term) -> Term {
    let tfree = t.free_vars();
    subst_t(s, v, t, &tfree)
}

fn subst_t(s: &Term, v: Var, t: &Term, tfree: &BTreeSet<Var>) -> Term {
    match s {
        Term::Var(w) if *w == v => t.clone(),
        Term::Var(_) => s.clone(),
        Term::Abs { var, body, restricted } => {
            let (var, body) = subst_binder(*var, body, v, t, tfree);
            Term::Abs { var, body, restricted: *restricted }
        }
    }
}

fn subst_binder(w: Var, body: &Arc<Formula>, v: Var, t: &Term, tfree: &BTreeSet<Var>) -> (Var, Arc<Formula>) {
    if w == v {
        return (w, body.clone());
    }
    if tfree.contains(&w) {
        let body_free = body.free_vars();
        if !body_free.contains(&v) {
            return (w, body.clone());
        }
        let mut avoid = body.all_vars();
        avoid.extend(tfree.iter().copied());
        avoid.insert(v);
        let fresh = fresh_var(&avoid);
        let renamed = subst_f(body, w, &Term::Var(fresh), &BTreeSet::from([fresh]));
        return (fresh, Arc::new(subst_f(&renamed, v, t, tfree)));
    }
    (w, Arc::new(subst_f(body, v, t, tfree)))
}

fn subst_f(f: &Formula, v: Var, t: &Term, tfree: &BTreeSet<Var>) -> Formula {
    let sf = |a: &Arc<Formula>| Arc::new(subst_f(a, v, t, tfree));
    let st = |a: &Term| subst_t(a, v, t, tfree);
    match f {
        Formula::Verum | Formula::Falsum => f.clone(),
        Formula::Member(a, b) => Formula::Member(st(a), st(b)),
        Formula::Equal(a, b) => Formula::Equal(st(a), st(b)),
        Formula::Set(a) => Formula::Set(st(a)),
        Formula::Slim(a) => Formula::Slim(st(a)),
        Formula::Fund(a) => Formula::Fund(st(a)),
        Formula::Not(a) => Formula::Not(sf(a)),
        Formula::And(a, b) => Formula::And(sf(a), sf(b)),
        Formula::Or(a, b) => Formula::Or(sf(a), sf(b)),
        Formula::Implies(a, b) => Formula::Implies(sf(a), sf(b)),
        Formula::Iff(a, b) => Formula::Iff(sf(a), sf(b)),
        Formula::ForAll(w, a) => {
            let (w, a) = subst_binder(*w, a, v, t, tfree);
            Formula::ForAll(w, a)
        }
        Formula::Exists(w, a) => {
            let (w, a) = subst_binder(*w, a, v, t, tfree);
            Formula::Exists(w, a)
        }
    }
}

/// Rewrite into the core language `{not, and, forall, in, set, slim}`.
/// Equality unfolds by extensionality and `fund` by its definition.
pub fn expand(f: &Formula) -> Formula {
    expand_f(f, true)
}

/// Like [`expand`] but leaves equality atoms folded.
pub fn expand_keep_equality(f: &Formula) -> Formula {
    expand_f(f, false)
}

fn expand_t(t: &Term, eq: bool) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Abs { var, body, restricted } => {
            Term::Abs { var: *var, body: Arc::new(expand_f(body, eq)), restricted: *restricted }
        }
    }
}

fn not(f: Formula) -> Formula {
    Formula::Not(Arc::new(f))
}

fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Arc::new(a), Arc::new(b))
}

// not (a and not b)
fn imp(a: Formula, b: Formula) -> Formula {
    not(and(a, not(b)))
}

/// Extensional equality `forall z (z in t <=> z in s)` in core form.
pub(crate) fn equality_body(z: Var, t: &Term, s: &Term) -> Formula {
    let zt = Formula::Member(Term::Var(z), t.clone());
    let zs = Formula::Member(Term::Var(z), s.clone());
    and(imp(zt.clone(), zs.clone()), imp(zs, zt))
}

fn expand_f(f: &Formula, eq: bool) -> Formula {
    match f {
        Formula::Verum | Formula::Falsum => f.clone(),
        Formula::Member(a, b) => Formula::Member(expand_t(a, eq), expand_t(b, eq)),
        Formula::Set(a) => Formula::Set(expand_t(a, eq)),
        Formula::Slim(a) => Formula::Slim(expand_t(a, eq)),
        Formula::Equal(a, b) => {
            let (a, b) = (expand_t(a, eq), expand_t(b, eq));
            if !eq {
                return Formula::Equal(a, b);
            }
            let mut avoid = a.all_vars();
            avoid.extend(b.all_vars());
            let z = fresh_var(&avoid);
            Formula::ForAll(z, Arc::new(equality_body(z, &a, &b)))
        }
        Formula::Fund(a) => {
            // exists y (y in t and forall w not (w in y and w in t))
            let a = expand_t(a, eq);
            let avoid = a.all_vars();
            let y = fresh_var(&avoid);
            let w = Var(y.0 + 1);
            let inner = Formula::ForAll(
                w,
                Arc::new(not(and(
                    Formula::Member(Term::Var(w), Term::Var(y)),
                    Formula::Member(Term::Var(w), a.clone()),
                ))),
            );
            let body = and(Formula::Member(Term::Var(y), a), inner);
            not(Formula::ForAll(y, Arc::new(not(body))))
        }
        Formula::Not(a) => not(expand_f(a, eq)),
        Formula::And(a, b) => and(expand_f(a, eq), expand_f(b, eq)),
        Formula::Or(a, b) => not(and(not(expand_f(a, eq)), not(expand_f(b, eq)))),
        Formula::Implies(a, b) => imp(expand_f(a, eq), expand_f(b, eq)),
        Formula::Iff(a, b) => {
            let (a, b) = (expand_f(a, eq), expand_f(b, eq));
            and(imp(a.clone(), b.clone()), imp(b, a))
        }
        Formula::ForAll(v, a) => Formula::ForAll(*v, Arc::new(expand_f(a, eq))),
        Formula::Exists(v, a) => not(Formula::ForAll(*v, Arc::new(not(expand_f(a, eq))))),
    }
}

pub fn is_core(f: &Formula) -> bool {
    fn term(t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Abs { body, .. } => is_core(body),
        }
    }
    match f {
        Formula::Verum | Formula::Falsum => true,
        Formula::Member(a, b) => term(a) && term(b),
        Formula::Set(a) | Formula::Slim(a) => term(a),
        Formula::Not(a) => is_core(a),
        Formula::And(a, b) => is_core(a) && is_core(b),
        Formula::ForAll(_, a) => is_core(a),
        _ => false,
    }
}

pub fn contains_set_atom(f: &Formula) -> bool {
    fn term(t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::Abs { body, .. } => contains_set_atom(body),
        }
    }
    match f {
        Formula::Verum | Formula::Falsum => false,
        Formula::Set(_) => true,
        Formula::Member(a, b) | Formula::Equal(a, b) => term(a) || term(b),
        Formula::Slim(a) | Formula::Fund(a) => term(a),
        Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => contains_set_atom(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            contains_set_atom(a) || contains_set_atom(b)
        }
    }
}

/// All subformula occurrences in pre-order, including those inside
/// abstraction bodies.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    fn term(t: &Term, out: &mut Vec<Formula>) {
        if let Term::Abs { body, .. } = t {
            walk(body, out);
        }
    }
    fn walk(f: &Formula, out: &mut Vec<Formula>) {
        out.push(f.clone());
        match f {
            Formula::Verum | Formula::Falsum => {}
            Formula::Member(a, b) | Formula::Equal(a, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Set(a) | Formula::Slim(a) | Formula::Fund(a) => term(a, out),
            Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => walk(a, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}

/// Depth-numbered renaming: a binder with `d` enclosing binders becomes
/// `x{offset + d}`, where `offset` is one above the largest free ordinary
/// variable. For parameter-free formulas the binders are `x1, x2, ...`.
pub fn canonical(f: &Formula) -> Formula {
    let offset = fresh_var(&f.free_vars()).0;
    let mut r = Renamer { scope: Vec::new(), name: |depth: u32, _: u32| Var(offset + depth) };
    r.formula(f)
}

/// Height-numbered renaming into the reserved bound block. The name of a
/// binder depends only on the subterm it heads, so equal subterms get
/// identical text wherever they occur. Two formulas are alpha-equivalent
/// iff their keys are equal.
pub fn alpha_key(f: &Formula) -> Formula {
    let mut r = Renamer { scope: Vec::new(), name: |_: u32, height: u32| Var::bound(height) };
    r.formula(f)
}

pub fn alpha_key_term(t: &Term) -> Term {
    let mut r = Renamer { scope: Vec::new(), name: |_: u32, height: u32| Var::bound(height) };
    r.term(t)
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_key(a) == alpha_key(b)
}

fn height_t(t: &Term) -> u32 {
    match t {
        Term::Var(_) => 0,
        Term::Abs { body, .. } => 1 + height_f(body),
    }
}

/// Maximum binder nesting inside `f`.
fn height_f(f: &Formula) -> u32 {
    match f {
        Formula::Verum | Formula::Falsum => 0,
        Formula::Member(a, b) | Formula::Equal(a, b) => height_t(a).max(height_t(b)),
        Formula::Set(a) | Formula::Slim(a) | Formula::Fund(a) => height_t(a),
        Formula::Not(a) => height_f(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            height_f(a).max(height_f(b))
        }
        Formula::ForAll(_, a) | Formula::Exists(_, a) => 1 + height_f(a),
    }
}

struct Renamer<F: Fn(u32, u32) -> Var> {
    scope: Vec<(Var, Var)>,
    name: F,
}

impl<F: Fn(u32, u32) -> Var> Renamer<F> {
    fn lookup(&self, v: Var) -> Var {
        self.scope.iter().rev().find(|(from, _)| *from == v).map_or(v, |(_, to)| *to)
    }

    fn binder(&mut self, v: Var, body: &Formula) -> (Var, Arc<Formula>) {
        let depth = self.scope.len() as u32;
        let to = (self.name)(depth, 1 + height_f(body));
        self.scope.push((v, to));
        let body = Arc::new(self.formula(body));
        self.scope.pop();
        (to, body)
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.lookup(*v)),
            Term::Abs { var, body, restricted } => {
                let (var, body) = self.binder(*var, body);
                Term::Abs { var, body, restricted: *restricted }
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Verum | Formula::Falsum => f.clone(),
            Formula::Member(a, b) => Formula::Member(self.term(a), self.term(b)),
            Formula::Equal(a, b) => Formula::Equal(self.term(a), self.term(b)),
            Formula::Set(a) => Formula::Set(self.term(a)),
            Formula::Slim(a) => Formula::Slim(self.term(a)),
            Formula::Fund(a) => Formula::Fund(self.term(a)),
            Formula::Not(a) => Formula::Not(Arc::new(self.formula(a))),
            Formula::And(a, b) => Formula::And(Arc::new(self.formula(a)), Arc::new(self.formula(b))),
            Formula::Or(a, b) => Formula::Or(Arc::new(self.formula(a)), Arc::new(self.formula(b))),
            Formula::Implies(a, b) => Formula::Implies(Arc::new(self.formula(a)), Arc::new(self.formula(b))),
            Formula::Iff(a, b) => Formula::Iff(Arc::new(self.formula(a)), Arc::new(self.formula(b))),
            Formula::ForAll(v, a) => {
                let (v, a) = self.binder(*v, a);
                Formula::ForAll(v, a)
            }
            Formula::Exists(v, a) => {
                let (v, a) = self.binder(*v, a);
                Formula::Exists(v, a)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{lookup, parse_formula};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn expand_disjunction_and_exists() {
        assert_eq!(expand(&p("x in x or x in x1")), p("not (not x in x and not x in x1)"));
        assert_eq!(expand(&p("exists x2: x in x2")), p("not forall x2: not x in x2"));
    }

    #[test]
    fn expand_equality_by_extensionality() {
        let e = expand(&p("x = x1"));
        assert_eq!(e, p("forall x2: (not (x2 in x and not x2 in x1) and not (x2 in x1 and not x2 in x))"));
        assert!(is_core(&e));
    }

    #[test]
    fn expand_fund() {
        let e = expand(&p("fund(x)"));
        assert_eq!(e, p("not forall x1: not (x1 in x and forall x2: not (x2 in x1 and x2 in x))"));
    }

    #[test]
    fn expand_reaches_into_abstractions() {
        let e = expand(&Formula::Set(lookup("si'").unwrap()));
        assert!(is_core(&e));
        assert_eq!(expand(&e), e);
    }

    #[test]
    fn substitute_replaces_every_free_occurrence() {
        let v = lookup("V").unwrap();
        let f = substitute(&p("x in x"), Var::X, &v);
        assert_eq!(f, Formula::Member(v.clone(), v));
    }

    #[test]
    fn substitute_leaves_bound_variable_alone() {
        let f = p("forall x: x in x1");
        assert_eq!(substitute(&f, Var::X, &Term::Var(Var(5))), f);
    }

    #[test]
    fn substitute_avoids_capture() {
        let f = substitute(&p("forall x1: x in x1"), Var::X, &Term::Var(Var(1)));
        assert_eq!(f, p("forall x2: x1 in x2"));
    }

    #[test]
    fn parameter_freedom() {
        assert!(is_parameter_free(&p("x in x")));
        assert!(!is_parameter_free(&p("x in x1")));
        assert!(is_parameter_free(&p("forall x1: x in x1")));
    }

    #[test]
    fn alpha_keys_ignore_binder_names() {
        let a = p("forall x1: x in x1 and forall x5: x5 in x");
        let b = p("forall x7: x in x7 and forall x2: x2 in x");
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &p("forall x1: x1 in x and forall x5: x5 in x")));
        // keys of a subterm do not depend on where the subterm sits
        let si = lookup("si'").unwrap();
        let inner = alpha_key(&Formula::Set(si.clone()));
        let outer = alpha_key(&p("forall x3: x3 in x3").clone());
        let both = alpha_key(&Formula::and(Formula::Set(si), outer.clone()));
        match both {
            Formula::And(l, _) => assert_eq!(*l, inner),
            _ => unreachable!(),
        }
    }

    #[test]
    fn canonical_numbers_binders_by_depth() {
        let f = p("forall x9: (x in x9 and forall x4: x4 in x9)");
        assert_eq!(canonical(&f), p("forall x1: (x in x1 and forall x2: x2 in x1)"));
    }
}
