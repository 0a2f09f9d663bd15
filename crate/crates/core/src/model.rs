//! Finite models: a universe `0..n` of sets, each with an extension.
//!
//! Classes are bitmasks over the universe. Since `ext` is injective an
//! element is determined by its extension, so terms evaluate to classes and
//! an element is simply a class that some element realizes. Quantifiers
//! range over elements; abstractions denote arbitrary subclasses.
//!
//! Serialized form: the size followed by one row per element, row `i`
//! having character `j` equal to `1` iff `j` is in `ext(i)`. The text form
//! puts each on its own line (`2\n00\n10\n`); the compact form joins them
//! with `/` (`2/00/10`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Term, Var};
use crate::schema::{schema_body, SchemaId, SystemSpec};

/// Largest universe a model may have.
pub const MAX_SIZE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unbound variable {0}")]
    UnboundVariable(Var),
    #[error("{0} refers to provability and cannot be checked in a model")]
    NotModelCheckable(SchemaId),
    #[error("element {0} is outside the universe")]
    NoSuchElement(usize),
    #[error("extensions are not injective")]
    NotInjective,
    #[error("universe size must be between 1 and {MAX_SIZE}")]
    BadSize,
    #[error("malformed model: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteModel {
    n: usize,
    ext: Vec<u32>,
}

impl FiniteModel {
    /// `ext[i]` lists the members of element `i`.
    pub fn new(ext: Vec<Vec<usize>>) -> Result<FiniteModel, ModelError> {
        let n = ext.len();
        let masks = ext
            .iter()
            .map(|row| {
                row.iter()
                    .try_fold(0u32, |m, &j| if j < n { Ok(m | 1 << j) } else { Err(ModelError::NoSuchElement(j)) })
            })
            .collect::<Result<Vec<u32>, _>>()?;
        FiniteModel::from_masks(masks)
    }

    pub fn from_masks(ext: Vec<u32>) -> Result<FiniteModel, ModelError> {
        let n = ext.len();
        if n == 0 || n > MAX_SIZE {
            return Err(ModelError::BadSize);
        }
        if ext.iter().any(|&m| m >> n != 0) {
            return Err(ModelError::Malformed("extension mentions an element outside the universe".into()));
        }
        let mut seen = ext.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != n {
            return Err(ModelError::NotInjective);
        }
        Ok(FiniteModel { n, ext })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ext(&self, e: usize) -> u32 {
        self.ext[e]
    }

    pub fn exts(&self) -> &[u32] {
        &self.ext
    }

    pub fn universe(&self) -> u32 {
        full(self.n)
    }

    /// All `2^n` classes in increasing order.
    pub fn classes(&self) -> impl Iterator<Item = u32> {
        0..=self.universe()
    }

    /// The element whose extension is `c`, if `c` is a set.
    pub fn element(&self, c: u32) -> Option<usize> {
        self.ext.iter().position(|&m| m == c)
    }

    pub fn is_set(&self, c: u32) -> bool {
        self.element(c).is_some()
    }

    pub fn ko(&self, c: u32) -> u32 {
        self.universe() & !c
    }

    pub fn rows(&self) -> Vec<String> {
        self.ext.iter().map(|&m| (0..self.n).map(|j| if m >> j & 1 == 1 { '1' } else { '0' }).collect()).collect()
    }

    pub fn compact(&self) -> String {
        let mut s = self.n.to_string();
        for r in self.rows() {
            s.push('/');
            s.push_str(&r);
        }
        s
    }

    fn parse_parts<'a>(mut parts: impl Iterator<Item = &'a str>) -> Result<FiniteModel, ModelError> {
        let bad = |m: &str| ModelError::Malformed(m.to_string());
        let n: usize = parts.next().ok_or_else(|| bad("empty"))?.trim().parse().map_err(|_| bad("size"))?;
        let mut ext = Vec::with_capacity(n);
        for row in parts {
            let row = row.trim();
            if row.is_empty() {
                continue;
            }
            if row.len() != n {
                return Err(bad("row length differs from the size"));
            }
            let mut m = 0u32;
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '1' => m |= 1 << j,
                    '0' => {}
                    _ => return Err(bad("rows hold only 0 and 1")),
                }
            }
            ext.push(m);
        }
        if ext.len() != n {
            return Err(bad("row count differs from the size"));
        }
        FiniteModel::from_masks(ext)
    }

    pub fn from_compact(s: &str) -> Result<FiniteModel, ModelError> {
        FiniteModel::parse_parts(s.split('/'))
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for r in self.rows() {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for FiniteModel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<FiniteModel, ModelError> {
        FiniteModel::parse_parts(s.lines())
    }
}

impl Serialize for FiniteModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.compact())
    }
}

impl<'de> Deserialize<'de> for FiniteModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<FiniteModel, D::Error> {
        let s = String::deserialize(d)?;
        FiniteModel::from_compact(&s).map_err(serde::de::Error::custom)
    }
}

fn full(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn is_slim(m: &FiniteModel, c: u32) -> bool {
    let k = c.count_ones() as usize;
    k < m.n - k
}

pub fn is_mighty(m: &FiniteModel, c: u32) -> bool {
    let k = c.count_ones() as usize;
    k > m.n - k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    Slim,
    /// Equipollent with its complement; `complemented` when both the class
    /// and its complement are sets.
    Medium {
        complemented: bool,
    },
    Mighty,
}

impl ClassKind {
    pub fn is_medium(self) -> bool {
        matches!(self, ClassKind::Medium { .. })
    }
}

pub fn classify(m: &FiniteModel, c: u32) -> ClassKind {
    if is_slim(m, c) {
        ClassKind::Slim
    } else if is_mighty(m, c) {
        ClassKind::Mighty
    } else {
        ClassKind::Medium { complemented: m.is_set(c) && m.is_set(m.ko(c)) }
    }
}

struct Eval<'m> {
    m: &'m FiniteModel,
    index: HashMap<u32, usize>,
    env: Vec<(Var, u32)>,
}

impl Eval<'_> {
    fn lookup(&self, v: Var) -> Result<u32, ModelError> {
        self.env.iter().rev().find(|(w, _)| *w == v).map(|(_, c)| *c).ok_or(ModelError::UnboundVariable(v))
    }

    fn with<T>(&mut self, v: Var, c: u32, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((v, c));
        let out = f(self);
        self.env.pop();
        out
    }

    fn term(&mut self, t: &Term) -> Result<u32, ModelError> {
        match t {
            Term::Var(v) => self.lookup(*v),
            Term::Abs { var, body, .. } => {
                let mut c = 0;
                for e in 0..self.m.n {
                    if self.with(*var, self.m.ext[e], |s| s.formula(body))? {
                        c |= 1 << e;
                    }
                }
                Ok(c)
            }
        }
    }

    fn exists(&mut self, v: Var, body: &Formula) -> Result<bool, ModelError> {
        for e in 0..self.m.n {
            if self.with(v, self.m.ext[e], |s| s.formula(body))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn formula(&mut self, f: &Formula) -> Result<bool, ModelError> {
        Ok(match f {
            Formula::Verum => true,
            Formula::Falsum => false,
            Formula::Member(t, s) => {
                let (t, s) = (self.term(t)?, self.term(s)?);
                self.index.get(&t).is_some_and(|&e| s >> e & 1 == 1)
            }
            Formula::Equal(t, s) => self.term(t)? == self.term(s)?,
            Formula::Set(t) => {
                let c = self.term(t)?;
                self.index.contains_key(&c)
            }
            Formula::Slim(t) => is_slim(self.m, self.term(t)?),
            Formula::Fund(t) => {
                let c = self.term(t)?;
                (0..self.m.n).any(|y| c >> y & 1 == 1 && self.m.ext[y] & c == 0)
            }
            Formula::Not(a) => !self.formula(a)?,
            Formula::And(a, b) => self.formula(a)? && self.formula(b)?,
            Formula::Or(a, b) => self.formula(a)? || self.formula(b)?,
            Formula::Implies(a, b) => !self.formula(a)? || self.formula(b)?,
            Formula::Iff(a, b) => self.formula(a)? == self.formula(b)?,
            Formula::ForAll(v, a) => !self.exists(*v, &Formula::not((**a).clone()))?,
            Formula::Exists(v, a) => self.exists(*v, a)?,
        })
    }
}

/// Truth of `f` with free variables bound to elements.
pub fn eval(m: &FiniteModel, f: &Formula, env: &BTreeMap<Var, usize>) -> Result<bool, ModelError> {
    let mut classes = BTreeMap::new();
    for (&v, &e) in env {
        if e >= m.n {
            return Err(ModelError::NoSuchElement(e));
        }
        classes.insert(v, m.ext[e]);
    }
    eval_classes(m, f, &classes)
}

/// Truth of `f` with free variables bound to arbitrary classes; a variable
/// bound to a class no element realizes behaves as a proper class.
pub fn eval_classes(m: &FiniteModel, f: &Formula, env: &BTreeMap<Var, u32>) -> Result<bool, ModelError> {
    let index = m.ext.iter().enumerate().map(|(e, &c)| (c, e)).collect();
    let mut ev = Eval { m, index, env: env.iter().map(|(&v, &c)| (v, c)).collect() };
    ev.formula(f)
}

/// Value of a term as a class.
pub fn eval_term(m: &FiniteModel, t: &Term, env: &BTreeMap<Var, u32>) -> Result<u32, ModelError> {
    let index = m.ext.iter().enumerate().map(|(e, &c)| (c, e)).collect();
    let mut ev = Eval { m, index, env: env.iter().map(|(&v, &c)| (v, c)).collect() };
    ev.term(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemCheck {
    pub holds: bool,
    pub counterexamples: Vec<(SchemaId, u32)>,
    /// Classes for which the construction a schema speaks about (power
    /// class, union) is not realized by any element of the model.
    pub unrealized: Vec<(SchemaId, u32)>,
}

pub fn is_model_checkable(id: SchemaId) -> bool {
    use SchemaId::*;
    matches!(id, Axiom5 | Axiom6 | Axiom5a | Axiom6c | Sharp2 | Sharp3 | Sharp4) || id.is_constant()
}

/// The class parameter schema instances are evaluated at.
fn parameter() -> Var {
    Var::constant(0)
}

/// The schema's instance for the class `P`, as a formula with `P` free.
pub fn class_instance(id: SchemaId, system: &SystemSpec) -> Result<Vec<Formula>, ModelError> {
    if !is_model_checkable(id) {
        return Err(ModelError::NotModelCheckable(id));
    }
    let a = Formula::Member(Term::Var(Var::X), Term::Var(parameter()));
    Ok(schema_body(id, system, &a).expect("model-checkable schemata always instantiate"))
}

fn construction(id: SchemaId, c: &Term) -> Option<Term> {
    match id {
        SchemaId::Sharp2 => Some(crate::formula::power(c)),
        SchemaId::Sharp3 => Some(crate::formula::union(c)),
        _ => None,
    }
}

/// Evaluate every active schema at every class of `m`.
pub fn check_system(m: &FiniteModel, system: &SystemSpec) -> Result<SystemCheck, ModelError> {
    let mut templates = Vec::new();
    for &id in &system.active {
        templates.push((id, class_instance(id, system)?));
    }
    let p = parameter();
    let mut out = SystemCheck { holds: true, counterexamples: Vec::new(), unrealized: Vec::new() };
    for (id, fs) in &templates {
        let classes: Vec<u32> = if id.is_constant() { vec![0] } else { m.classes().collect() };
        for c in classes {
            let env = BTreeMap::from([(p, c)]);
            for f in fs {
                if !eval_classes(m, f, &env)? {
                    out.holds = false;
                    out.counterexamples.push((*id, c));
                    break;
                }
            }
            if let Some(t) = construction(*id, &Term::Var(p)) {
                if !m.is_set(eval_term(m, &t, &env)?) {
                    out.unrealized.push((*id, c));
                }
            }
        }
    }
    Ok(out)
}

/// Every model of size `n` with injective extensions, in lexicographic
/// order of the extension vector.
pub fn all_models(n: usize) -> Vec<FiniteModel> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<u32>, out: &mut Vec<FiniteModel>) {
        if cur.len() == n {
            out.push(FiniteModel { n, ext: cur.clone() });
            return;
        }
        for m in 0..=full(n) {
            if !cur.contains(&m) {
                cur.push(m);
                go(n, cur, out);
                cur.pop();
            }
        }
    }
    go(n, &mut cur, &mut out);
    out
}

/// All models of size at most `n_max` that satisfy `system`, smaller sizes
/// first and lexicographic within a size.
pub fn search_models(n_max: usize, system: &SystemSpec) -> Result<Vec<FiniteModel>, ModelError> {
    if n_max > 4 {
        return Err(ModelError::BadSize);
    }
    for &id in &system.active {
        class_instance(id, system)?;
    }
    let mut found = Vec::new();
    for n in 1..=n_max {
        let candidates = all_models(n);
        let threads = std::thread::available_parallelism().map_or(1, |p| p.get()).min(candidates.len());
        let chunk = candidates.len().div_ceil(threads);
        let parts: Vec<Result<Vec<FiniteModel>, ModelError>> = std::thread::scope(|s| {
            let handles: Vec<_> = candidates
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        let mut ok = Vec::new();
                        for m in part {
                            if check_system(m, system)?.holds {
                                ok.push(m.clone());
                            }
                        }
                        Ok(ok)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("model search thread panicked")).collect()
        });
        for p in parts {
            found.extend(p?);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn model(rows: &[&[usize]]) -> FiniteModel {
        FiniteModel::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn atoms_and_classes() {
        let empty = model(&[&[]]);
        let selfish = model(&[&[0]]);
        let none = BTreeMap::new();
        assert!(eval(&empty, &Formula::Verum, &none).unwrap());
        assert!(eval(&empty, &parse_formula("set({x: not x = x})").unwrap(), &none).unwrap());
        let env = BTreeMap::from([(Var::X, 0)]);
        assert!(eval(&selfish, &parse_formula("x in x").unwrap(), &env).unwrap());
        assert_eq!(eval(&selfish, &parse_formula("x in x1").unwrap(), &env), Err(ModelError::UnboundVariable(Var(1))));
    }

    #[test]
    fn sizes() {
        let m4 = FiniteModel::from_masks(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(classify(&m4, 0b0001), ClassKind::Slim);
        assert!(classify(&m4, 0b0011).is_medium());
        let m3 = FiniteModel::from_masks(vec![0, 1, 2]).unwrap();
        assert_eq!(classify(&m3, 0b011), ClassKind::Mighty);
    }

    #[test]
    fn injectivity_and_serialization() {
        assert_eq!(FiniteModel::from_masks(vec![0, 0]), Err(ModelError::NotInjective));
        let m = model(&[&[], &[0]]);
        assert_eq!(m.to_string(), "2\n00\n10\n");
        assert_eq!(m.compact(), "2/00/10");
        assert_eq!(m.to_string().parse::<FiniteModel>().unwrap(), m);
        assert_eq!(FiniteModel::from_compact("2/00/10").unwrap(), m);
        assert_eq!(serde_json::to_string(&m).unwrap(), "\"2/00/10\"");
    }

    #[test]
    fn nsa_rules_are_not_checkable() {
        let sys = SystemSpec::preset("NACT-PriNSA").unwrap();
        assert!(matches!(check_system(&model(&[&[]]), &sys), Err(ModelError::NotModelCheckable(_))));
    }

    #[test]
    fn one_element_models() {
        let sys = SystemSpec::preset("NACT#").unwrap();
        assert!(check_system(&model(&[&[]]), &sys).unwrap().holds);
        let r = check_system(&model(&[&[0]]), &sys).unwrap();
        assert!(r.counterexamples.contains(&(SchemaId::Axiom6, 0)));
        assert!(check_system(&model(&[&[], &[0]]), &sys).unwrap().holds);
        assert_eq!(search_models(1, &SystemSpec::custom("empty", [])).unwrap().len(), 2);
    }
}
