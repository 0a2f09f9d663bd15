use std::collections::HashMap;
use std::fmt::{self, Write};
use std::sync::OnceLock;

use super::library::{ko, library, pair, singleton};
use super::ops::alpha_key_term;
use super::{Formula, Term};

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(_) | Formula::ForAll(..) | Formula::Exists(..) => UNARY,
        _ => ATOM,
    }
}

struct Printer {
    named: bool,
}

impl Printer {
    fn formula(&self, out: &mut String, f: &Formula, min: u8) {
        let paren = prec(f) < min;
        if paren {
            out.push('(');
        }
        match f {
            Formula::Verum => out.push_str("verum"),
            Formula::Falsum => out.push_str("falsum"),
            Formula::Member(a, b) => {
                self.term(out, a);
                out.push_str(" in ");
                self.term(out, b);
            }
            Formula::Equal(a, b) => {
                self.term(out, a);
                out.push_str(" = ");
                self.term(out, b);
            }
            Formula::Set(t) | Formula::Slim(t) | Formula::Fund(t) => {
                out.push_str(match f {
                    Formula::Set(_) => "set(",
                    Formula::Slim(_) => "slim(",
                    _ => "fund(",
                });
                self.term(out, t);
                out.push(')');
            }
            Formula::Not(a) => {
                out.push_str("not ");
                self.formula(out, a, UNARY);
            }
            Formula::And(a, b) => self.binary(out, a, " and ", b, AND, UNARY),
            Formula::Or(a, b) => self.binary(out, a, " or ", b, OR, AND),
            Formula::Implies(a, b) => self.binary(out, a, " implies ", b, OR, IMPLIES),
            Formula::Iff(a, b) => self.binary(out, a, " iff ", b, IMPLIES, IMPLIES),
            Formula::ForAll(v, a) | Formula::Exists(v, a) => {
                let kw = if matches!(f, Formula::ForAll(..)) { "forall" } else { "exists" };
                let _ = write!(out, "{kw} {v}: ");
                self.formula(out, a, UNARY);
            }
        }
        if paren {
            out.push(')');
        }
    }

    fn binary(&self, out: &mut String, a: &Formula, op: &str, b: &Formula, left: u8, right: u8) {
        self.formula(out, a, left);
        out.push_str(op);
        self.formula(out, b, right);
    }

    fn term(&self, out: &mut String, t: &Term) {
        if self.named {
            if let Some(s) = self.abbreviate(t) {
                out.push_str(&s);
                return;
            }
        }
        match t {
            Term::Var(v) => {
                let _ = write!(out, "{v}");
            }
            Term::Abs { var, body, restricted } => {
                out.push_str(if *restricted { "{|" } else { "{" });
                let _ = write!(out, "{var}: ");
                self.formula(out, body, IFF);
                out.push_str(if *restricted { "|}" } else { "}" });
            }
        }
    }

    fn abbreviate(&self, t: &Term) -> Option<String> {
        let Term::Abs { var, body, .. } = t else { return None };
        let key = alpha_key_term(t);
        if let Some(name) = constants().get(&key) {
            return Some(format!("${name}"));
        }
        // recognise the parametric shapes by rebuilding them from the argument
        let arg = match body.as_ref() {
            Formula::Equal(Term::Var(z), a) if z == var => Some(("single", a.clone(), None)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Member(Term::Var(z), a) if z == var => Some(("ko", a.clone(), None)),
                _ => None,
            },
            Formula::Or(l, r) => match (l.as_ref(), r.as_ref()) {
                (Formula::Equal(Term::Var(z1), a), Formula::Equal(Term::Var(z2), b)) if z1 == var && z2 == var => {
                    Some(("pair", a.clone(), Some(b.clone())))
                }
                _ => None,
            },
            _ => None,
        }?;
        let (kind, a, b) = arg;
        if a.free_vars().contains(var) || b.as_ref().is_some_and(|b| b.free_vars().contains(var)) {
            return None;
        }
        let rebuilt = match (kind, &b) {
            ("single", _) => singleton(&a),
            ("ko", _) => ko(&a),
            (_, Some(b)) => pair(&a, b),
            _ => return None,
        };
        if alpha_key_term(&rebuilt) != key {
            return None;
        }
        let mut s = String::new();
        match (kind, b) {
            ("single", _) => {
                s.push('{');
                self.term(&mut s, &a);
                s.push('}');
            }
            ("ko", _) => {
                s.push_str("$Ko(");
                self.term(&mut s, &a);
                s.push(')');
            }
            (_, Some(b)) => {
                s.push('{');
                self.term(&mut s, &a);
                s.push_str(", ");
                self.term(&mut s, &b);
                s.push('}');
            }
            _ => return None,
        }
        Some(s)
    }
}

fn constants() -> &'static HashMap<Term, &'static str> {
    static MAP: OnceLock<HashMap<Term, &'static str>> = OnceLock::new();
    MAP.get_or_init(|| {
        let mut m = HashMap::new();
        for entry in library() {
            m.insert(alpha_key_term(&entry.definition), entry.name);
        }
        // Ko(Ru) is common enough to deserve its own spelling
        let ru = super::library::lookup("Ru").unwrap();
        m.insert(alpha_key_term(&ko(&ru)), "Ko($Ru)");
        m
    })
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        Printer { named: false }.formula(&mut s, self, IFF);
        f.write_str(&s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        Printer { named: false }.term(&mut s, self);
        f.write_str(&s)
    }
}

/// Print with library constants abbreviated (`$Ru`, `{t}`, `$Ko(t)`, ...).
/// Parsing the result gives back the formula up to renaming of bound
/// variables.
pub fn named(f: &Formula) -> String {
    let f = readable(f);
    let mut s = String::new();
    Printer { named: true }.formula(&mut s, &f, IFF);
    s
}

/// Rename internal bound names back into the ordinary `x{k}` range.
fn readable(f: &Formula) -> Formula {
    if f.all_vars().iter().all(|v| v.0 < super::BOUND_BASE || v.is_constant()) {
        return f.clone();
    }
    super::ops::canonical(f)
}
