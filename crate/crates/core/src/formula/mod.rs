//! The membership-only language with class abstraction.
//!
//! A [`Formula`] keeps the surface connectives (`or`, `implies`, `iff`,
//! `exists`, `=` and `fund(..)`) so that parsing and printing round-trip;
//! [`expand`] rewrites everything into the core `{not, and, forall, in, set,
//! slim}`.

mod library;
mod ops;
mod parse;
mod print;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use library::{
    function, image, ko, library, lookup, named_term, opair, pair, power, singleton, union, NamedTerm, NAMES,
};
pub use ops::{
    alpha_eq, alpha_key, alpha_key_term, canonical, contains_set_atom, expand, expand_keep_equality, fresh_var,
    is_core, is_parameter_free, subformulas, subst_term, substitute,
};
pub use parse::{parse_formula, parse_term, ParseError};
pub use print::named;

/// First index of the block reserved for bound variables in alpha-normal form.
pub const BOUND_BASE: u32 = 1 << 20;
/// First index of the block reserved for prover witness constants.
pub const CONST_BASE: u32 = 1 << 24;

/// A variable. `Var(0)` is `x`, `Var(k)` is `x{k}`; two high blocks hold
/// alpha-normal bound names (`b{k}`) and witness constants (`c{k}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub u32);

impl Var {
    pub const X: Var = Var(0);

    pub fn new(index: u32) -> Var {
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn constant(k: u32) -> Var {
        Var(CONST_BASE + k)
    }

    pub fn is_constant(self) -> bool {
        self.0 >= CONST_BASE
    }

    pub(crate) fn bound(height: u32) -> Var {
        Var(BOUND_BASE + height)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "x"),
            k if k < BOUND_BASE => write!(f, "x{k}"),
            k if k < CONST_BASE => write!(f, "b{}", k - BOUND_BASE),
            k => write!(f, "c{}", k - CONST_BASE),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// `{x: body}` when `restricted` is false, `{|x: body|}` when true.
    Abs {
        var: Var,
        body: Arc<Formula>,
        restricted: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Verum,
    Falsum,
    Member(Term, Term),
    Set(Term),
    Slim(Term),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    ForAll(Var, Arc<Formula>),
    // surface forms
    Fund(Term),
    Equal(Term, Term),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Exists(Var, Arc<Formula>),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn abs(var: Var, body: Formula) -> Term {
        Term::Abs { var, body: Arc::new(body), restricted: false }
    }

    pub fn restricted(var: Var, body: Formula) -> Term {
        Term::Abs { var, body: Arc::new(body), restricted: true }
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Abs { .. } => None,
        }
    }

    /// Node count: one per variable occurrence, abstraction binder, and
    /// formula node inside the body.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs { body, .. } => 1 + body.size(),
        }
    }
}

impl Formula {
    pub fn member(t: Term, s: Term) -> Formula {
        Formula::Member(t, s)
    }

    pub fn equal(t: Term, s: Term) -> Formula {
        Formula::Equal(t, s)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::ForAll(v, Arc::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Arc::new(body))
    }

    pub fn set(t: Term) -> Formula {
        Formula::Set(t)
    }

    pub fn slim(t: Term) -> Formula {
        Formula::Slim(t)
    }

    pub fn fund(t: Term) -> Formula {
        Formula::Fund(t)
    }

    /// `Mighty(t)`, written as `slim(Ko(t))`; on finite universes the two agree.
    pub fn mighty(t: Term) -> Formula {
        Formula::Slim(library::ko(&t))
    }

    /// Node count of the formula. Atoms count one node plus the nodes of any
    /// abstraction terms they carry (variables are free).
    pub fn size(&self) -> usize {
        fn term(t: &Term) -> usize {
            match t {
                Term::Var(_) => 0,
                Term::Abs { body, .. } => 1 + body.size(),
            }
        }
        match self {
            Formula::Verum | Formula::Falsum => 1,
            Formula::Member(a, b) | Formula::Equal(a, b) => 1 + term(a) + term(b),
            Formula::Set(t) | Formula::Slim(t) | Formula::Fund(t) => 1 + term(t),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::ForAll(_, a) | Formula::Exists(_, a) => 1 + a.size(),
        }
    }
}

/// Parse either a formula or, failing that, a bare term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Formula(Formula),
    Term(Term),
}

pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    match parse_formula(text) {
        Ok(f) => Ok(Parsed::Formula(f)),
        Err(fe) => match parse_term(text) {
            Ok(t) => Ok(Parsed::Term(t)),
            Err(_) => Err(fe),
        },
    }
}

// Formulas and terms serialise as their concrete syntax.
impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Term, D::Error> {
        let text = String::deserialize(d)?;
        parse_term(&text).map_err(serde::de::Error::custom)
    }
}
