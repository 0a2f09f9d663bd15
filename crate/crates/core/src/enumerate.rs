//! The canonical stream of parameter-free formulas, shortest first.
//!
//! The stream starts with `verum` and `falsum`; after that every formula is
//! built from membership atoms with `not`, `and` and `forall`. Ordering:
//!
//! 1. node count (each atom, connective and quantifier counts one);
//! 2. constructor rank `member < not < and < forall`;
//! 3. children left to right under this same order (variable indices for
//!    atoms).
//!
//! Bound variables are numbered by depth (`x1` for the outermost binder,
//! `x2` below it, ...), every quantifier binds a variable its body uses, and
//! `x` is the only free variable, so each alpha-class appears exactly once.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::formula::{Formula, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("formula is not in canonical enumeration form: {0}")]
    NotCanonical(String),
}

fn rank(f: &Formula) -> u8 {
    match f {
        Formula::Verum => 0,
        Formula::Falsum => 1,
        Formula::Member(..) => 2,
        Formula::Not(_) => 3,
        Formula::And(..) => 4,
        Formula::ForAll(..) => 5,
        _ => 6,
    }
}

fn var_index(t: &Term) -> u32 {
    t.as_var().map_or(u32::MAX, Var::index)
}

/// The stream order on canonical formulas.
pub fn stream_cmp(a: &Formula, b: &Formula) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| rank(a).cmp(&rank(b))).then_with(|| match (a, b) {
        (Formula::Member(a1, a2), Formula::Member(b1, b2)) => {
            var_index(a1).cmp(&var_index(b1)).then(var_index(a2).cmp(&var_index(b2)))
        }
        (Formula::Not(x), Formula::Not(y)) => stream_cmp(x, y),
        (Formula::And(x1, x2), Formula::And(y1, y2)) => stream_cmp(x1, y1).then_with(|| stream_cmp(x2, y2)),
        (Formula::ForAll(v, x), Formula::ForAll(w, y)) => v.cmp(w).then_with(|| stream_cmp(x, y)),
        _ => Ordering::Equal,
    })
}

/// Memoised levels: all canonical non-constant formulas of a given size with
/// `scope` enclosing binders.
#[derive(Default)]
struct Levels {
    memo: HashMap<(usize, u32), Arc<Vec<Formula>>>,
}

impl Levels {
    fn get(&mut self, size: usize, scope: u32) -> Arc<Vec<Formula>> {
        if let Some(v) = self.memo.get(&(size, scope)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            for i in 0..=scope {
                for j in 0..=scope {
                    out.push(Formula::Member(Term::Var(Var(i)), Term::Var(Var(j))));
                }
            }
        } else if size > 1 {
            for f in self.get(size - 1, scope).iter() {
                out.push(Formula::not(f.clone()));
            }
            for left in 1..size - 1 {
                let ls = self.get(left, scope);
                let rs = self.get(size - 1 - left, scope);
                for a in ls.iter() {
                    for b in rs.iter() {
                        out.push(Formula::and(a.clone(), b.clone()));
                    }
                }
            }
            let bound = Var(scope + 1);
            for body in self.get(size - 1, scope + 1).iter() {
                if body.free_vars().contains(&bound) {
                    out.push(Formula::forall(bound, body.clone()));
                }
            }
        }
        let out = Arc::new(out);
        self.memo.insert((size, scope), out.clone());
        out
    }
}

/// Iterator over the canonical stream.
pub struct FormulaStream {
    levels: Levels,
    size: usize,
    offset: usize,
    current: Arc<Vec<Formula>>,
    max_len: Option<usize>,
    emitted: usize,
}

impl FormulaStream {
    pub fn new() -> FormulaStream {
        FormulaStream {
            levels: Levels::default(),
            size: 0,
            offset: 0,
            current: Arc::new(vec![Formula::Verum, Formula::Falsum]),
            max_len: None,
            emitted: 0,
        }
    }

    /// Stop after the last formula with at most `max_len` nodes.
    pub fn with_max_len(mut self, max_len: usize) -> FormulaStream {
        self.max_len = Some(max_len);
        self
    }

    /// Number of formulas emitted so far (the ordinal of the next one).
    pub fn cursor(&self) -> usize {
        self.emitted
    }
}

impl Default for FormulaStream {
    fn default() -> Self {
        FormulaStream::new()
    }
}

impl Iterator for FormulaStream {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        while self.offset >= self.current.len() {
            self.size += 1;
            if self.max_len.is_some_and(|m| self.size > m) {
                return None;
            }
            self.current = self.levels.get(self.size, 0);
            self.offset = 0;
        }
        let f = self.current[self.offset].clone();
        self.offset += 1;
        self.emitted += 1;
        Some(f)
    }
}

/// The first `k` formulas of the stream.
pub fn enumerate(k: usize) -> Vec<Formula> {
    FormulaStream::new().take(k).collect()
}

fn canonical_below(f: &Formula, scope: u32) -> Result<(), String> {
    match f {
        Formula::Member(a, b) => {
            for t in [a, b] {
                match t.as_var() {
                    Some(v) if v.index() <= scope => {}
                    _ => return Err(format!("atom argument `{t}` is not in scope")),
                }
            }
            Ok(())
        }
        Formula::Not(a) => canonical_below(a, scope),
        Formula::And(a, b) => {
            canonical_below(a, scope)?;
            canonical_below(b, scope)
        }
        Formula::ForAll(v, body) => {
            if v.index() != scope + 1 {
                return Err(format!("binder `{v}` should be `{}`", Var(scope + 1)));
            }
            if !body.free_vars().contains(v) {
                return Err(format!("binder `{v}` is vacuous"));
            }
            canonical_below(body, scope + 1)
        }
        Formula::Verum | Formula::Falsum => Err("verum/falsum only occur as whole formulas".into()),
        other => Err(format!("`{other}` is outside the enumerated core")),
    }
}

pub fn is_stream_canonical(f: &Formula) -> bool {
    matches!(f, Formula::Verum | Formula::Falsum) || canonical_below(f, 0).is_ok()
}

/// Position of `f` in the stream.
pub fn index_of(f: &Formula) -> Result<usize, EnumerateError> {
    match f {
        Formula::Verum => return Ok(0),
        Formula::Falsum => return Ok(1),
        _ => {}
    }
    canonical_below(f, 0).map_err(|why| EnumerateError::NotCanonical(format!("{f}: {why}")))?;
    let mut levels = Levels::default();
    let size = f.size();
    let mut index = 2;
    for s in 1..size {
        index += levels.get(s, 0).len();
    }
    let level = levels.get(size, 0);
    let pos = level
        .binary_search_by(|probe| stream_cmp(probe, f))
        .map_err(|_| EnumerateError::NotCanonical(f.to_string()))?;
    Ok(index + pos)
}
