//! NF stratification as a system of difference constraints.
//!
//! Every binder occurrence and every abstraction term gets its own type
//! node. An atom `u in v` asks for `type(v) = type(u) + 1`, an equality
//! asks for equal types, and an abstraction `{z: A}` sits one above `z`.
//! `set(..)` and `slim(..)` arguments are typed but never constrained.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{expand_keep_equality, Formula, Term, Var};

/// A type node. Bound variables are told apart by the position of their
/// binder in a pre-order walk of the (expanded) formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    Free(Var),
    Bound { var: Var, binder: usize },
    Abstraction { binder: usize },
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Free(v) => write!(f, "{v}"),
            Node::Bound { var, binder } => write!(f, "{var}#{binder}"),
            Node::Abstraction { binder } => write!(f, "{{..}}#{binder}"),
        }
    }
}

/// `type(upper) = type(lower) + offset`, with the atom that imposed it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub lower: Node,
    pub upper: Node,
    pub offset: i64,
    pub origin: String,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            0 => write!(f, "t({}) = t({})", self.upper, self.lower),
            k => write!(f, "t({}) = t({}) + {k}", self.upper, self.lower),
        }?;
        write!(f, "  [{}]", self.origin)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeAssignment {
    /// Sorted by node; every component is shifted so its least type is 0.
    pub types: Vec<(Node, i64)>,
}

impl TypeAssignment {
    pub fn get(&self, n: &Node) -> Option<i64> {
        self.types.binary_search_by(|(m, _)| m.cmp(n)).ok().map(|i| self.types[i].1)
    }

    /// True iff every constraint of `f` holds under this assignment.
    pub fn verifies(&self, f: &Formula) -> bool {
        let sys = constraints(f);
        sys.constraints.iter().all(|c| match (self.get(&c.lower), self.get(&c.upper)) {
            (Some(l), Some(u)) => u == l + c.offset,
            _ => false,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratification {
    Stratified(TypeAssignment),
    /// A cycle of constraints whose offsets do not sum to zero.
    Unstratifiable(Vec<Constraint>),
}

impl Stratification {
    pub fn is_stratified(&self) -> bool {
        matches!(self, Stratification::Stratified(_))
    }
}

/// The constraint system of a formula, after `fund`, `or`, `exists`, ...
/// have been expanded (equality stays folded).
#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    pub nodes: Vec<Node>,
    pub constraints: Vec<Constraint>,
}

struct Collector {
    sys: ConstraintSystem,
    scope: Vec<(Var, Node)>,
    binders: usize,
}

impl Collector {
    fn node(&mut self, n: Node) -> Node {
        if !self.sys.nodes.contains(&n) {
            self.sys.nodes.push(n);
        }
        n
    }

    fn lookup(&mut self, v: Var) -> Node {
        match self.scope.iter().rev().find(|(w, _)| *w == v) {
            Some((_, n)) => *n,
            None => self.node(Node::Free(v)),
        }
    }

    fn fresh_binder(&mut self, var: Var) -> Node {
        let n = Node::Bound { var, binder: self.binders };
        self.binders += 1;
        self.node(n)
    }

    fn term(&mut self, t: &Term) -> Node {
        match t {
            Term::Var(v) => self.lookup(*v),
            Term::Abs { var, body, .. } => {
                let abs = self.node(Node::Abstraction { binder: self.binders });
                let bound = self.fresh_binder(*var);
                self.sys.constraints.push(Constraint {
                    lower: bound,
                    upper: abs,
                    offset: 1,
                    origin: format!("abstraction over {var}"),
                });
                self.scope.push((*var, bound));
                self.formula(body);
                self.scope.pop();
                abs
            }
        }
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::Verum | Formula::Falsum => {}
            Formula::Member(a, b) | Formula::Equal(a, b) => {
                let lower = self.term(a);
                let upper = self.term(b);
                let offset = if matches!(f, Formula::Member(..)) { 1 } else { 0 };
                self.sys.constraints.push(Constraint { lower, upper, offset, origin: f.to_string() });
            }
            Formula::Set(t) | Formula::Slim(t) | Formula::Fund(t) => {
                self.term(t);
            }
            Formula::Not(a) => self.formula(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.formula(a);
                self.formula(b);
            }
            Formula::ForAll(v, a) | Formula::Exists(v, a) => {
                let n = self.fresh_binder(*v);
                self.scope.push((*v, n));
                self.formula(a);
                self.scope.pop();
            }
        }
    }
}

pub fn constraints(f: &Formula) -> ConstraintSystem {
    let f = expand_keep_equality(f);
    let mut c = Collector { sys: ConstraintSystem::default(), scope: Vec::new(), binders: 0 };
    c.formula(&f);
    c.sys
}

/// Decide stratifiability. On success the assignment satisfies every
/// constraint; on failure the returned constraints form a cycle with a
/// nonzero offset sum.
pub fn stratify(f: &Formula) -> Stratification {
    let sys = constraints(f);
    let n = sys.nodes.len();
    let index = |node: &Node| sys.nodes.iter().position(|m| m == node).expect("collected node");
    // adjacency: (neighbour, weight, constraint index)
    let mut adj: Vec<Vec<(usize, i64, usize)>> = vec![Vec::new(); n];
    for (ci, c) in sys.constraints.iter().enumerate() {
        let (l, u) = (index(&c.lower), index(&c.upper));
        adj[l].push((u, c.offset, ci));
        adj[u].push((l, -c.offset, ci));
    }
    let mut pot: Vec<Option<i64>> = vec![None; n];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if pot[root].is_some() {
            continue;
        }
        pot[root] = Some(0);
        let mut members = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            let pa = pot[a].unwrap();
            for &(b, w, ci) in &adj[a] {
                match pot[b] {
                    None => {
                        pot[b] = Some(pa + w);
                        parent[b] = Some((a, ci));
                        members.push(b);
                        queue.push_back(b);
                    }
                    Some(pb) if pb != pa + w => {
                        return Stratification::Unstratifiable(cycle(&sys, &parent, a, b, ci));
                    }
                    Some(_) => {}
                }
            }
        }
        components.push(members);
    }
    let mut types = Vec::with_capacity(n);
    for members in components {
        let min = members.iter().map(|&i| pot[i].unwrap()).min().unwrap_or(0);
        types.extend(members.into_iter().map(|i| (sys.nodes[i], pot[i].unwrap() - min)));
    }
    types.sort();
    Stratification::Stratified(TypeAssignment { types })
}

/// Down the tree from the common ancestor to `a`, across the closing edge,
/// and from `b` back up to the ancestor.
fn cycle(
    sys: &ConstraintSystem,
    parent: &[Option<(usize, usize)>],
    a: usize,
    b: usize,
    closing: usize,
) -> Vec<Constraint> {
    let path = |mut v: usize| {
        let mut out = vec![(v, None)];
        while let Some((p, ci)) = parent[v] {
            out.last_mut().unwrap().1 = Some(ci);
            out.push((p, None));
            v = p;
        }
        out
    };
    let (mut pa, mut pb) = (path(a), path(b));
    while pa.len() > 1 && pb.len() > 1 && pa[pa.len() - 2].0 == pb[pb.len() - 2].0 {
        pa.pop();
        pb.pop();
    }
    pa.last_mut().unwrap().1 = None;
    pb.last_mut().unwrap().1 = None;
    let mut out = Vec::new();
    out.extend(pa.iter().rev().filter_map(|(_, ci)| *ci));
    out.push(closing);
    out.extend(pb.iter().filter_map(|(_, ci)| *ci));
    out.into_iter().map(|ci| sys.constraints[ci].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn strat(s: &str) -> Stratification {
        stratify(&parse_formula(s).unwrap())
    }

    #[test]
    fn single_membership() {
        let Stratification::Stratified(t) = strat("x in x1") else { panic!() };
        assert_eq!(t.get(&Node::Free(Var(0))), Some(0));
        assert_eq!(t.get(&Node::Free(Var(1))), Some(1));
    }

    #[test]
    fn russell_body_is_unstratifiable() {
        for s in ["x in x", "not x in x"] {
            let Stratification::Unstratifiable(c) = strat(s) else { panic!("{s}") };
            assert_eq!(c.len(), 1);
            assert_eq!(c.iter().map(|c| c.offset).sum::<i64>(), 1);
        }
    }

    #[test]
    fn singleton_body_is_stratified() {
        let f = parse_formula("exists x1: x = {x1}").unwrap();
        let Stratification::Stratified(t) = stratify(&f) else { panic!() };
        assert!(t.verifies(&f));
    }

    #[test]
    fn cycles_sum_to_nonzero() {
        for s in [
            "forall x1: (x in x1 and x1 in x)",
            "exists x1: exists x2: (x in x1 and x1 in x2 and x = x2)",
            "fund(x)",
            "x in {x1: x1 in x}",
        ] {
            let Stratification::Unstratifiable(c) = strat(s) else { panic!("{s}") };
            // walk the cycle, orienting each edge, and sum
            let touches = |k: &Constraint, n: Node| k.lower == n || k.upper == n;
            let start = match c.get(1) {
                Some(next) if touches(next, c[0].lower) => c[0].upper,
                _ => c[0].lower,
            };
            let mut at = start;
            let mut sum = 0;
            for k in &c {
                if k.lower == at {
                    sum += k.offset;
                    at = k.upper;
                } else {
                    assert_eq!(k.upper, at, "{s}: broken cycle");
                    sum -= k.offset;
                    at = k.lower;
                }
            }
            assert_eq!(at, start, "{s}: cycle does not close");
            assert_ne!(sum, 0, "{s}");
        }
    }

    #[test]
    fn set_atoms_are_unconstrained() {
        assert!(strat("set(x) and x in x1").is_stratified());
        assert!(strat("set({x1: x1 in x1})").is_stratified() == false);
        assert!(strat("slim(x) and set(x1) and x in x1").is_stratified());
    }
}
