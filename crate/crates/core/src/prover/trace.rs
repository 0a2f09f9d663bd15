use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Term};

/// A formula with a truth sign: `T φ` asserts φ, `F φ` denies it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signed {
    pub sign: bool,
    pub formula: Formula,
}

impl Signed {
    pub fn t(formula: Formula) -> Signed {
        Signed { sign: true, formula }
    }

    pub fn f(formula: Formula) -> Signed {
        Signed { sign: false, formula }
    }

    pub fn flip(&self) -> Signed {
        Signed { sign: !self.sign, formula: self.formula.clone() }
    }
}

impl fmt::Display for Signed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.sign { "T" } else { "F" }, self.formula)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// `T not A`, `F not A`, `T A and B`.
    Alpha,
    /// `T t in {z: φ}` gives `T set(t)` and `T φ(t)`.
    Unfold,
    /// `T t in s` gives `T set(t)`.
    SetOfMember,
    /// `F forall v A` gives a fresh set `c` with `F A(c)`.
    Delta,
    /// `T forall v A` and `T set(t)` give `T A(t)`.
    Gamma,
    /// `T t = s` and `T set(z)` give `T (z in t iff z in s)`.
    EqGamma,
    /// `F t = s` gives a fresh set `c` separating `t` and `s`.
    EqDelta,
    /// Frame rule `set(a)` gives `set({a})`.
    Singleton,
    /// Frame rule `set(a)`, `set(b)` give `set({a, b})`.
    Pair,
    /// A two-way branching formula with one side already refuted.
    BetaUnit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: Rule,
    /// Positions on the current branch (roots first, then every conclusion
    /// in order of appearance).
    pub premises: Vec<usize>,
    pub term: Option<Term>,
    pub conclusions: Vec<Signed>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    Complement(usize, usize),
    /// `T falsum`
    Falsum(usize),
    /// `F verum`
    Verum(usize),
    /// `F t = t`
    Reflexive(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    Beta { premise: usize },
    Cut,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tree {
    Closed { steps: Vec<Step>, closure: Closure },
    Split { steps: Vec<Step>, kind: SplitKind, children: Vec<(Signed, Tree)> },
}

impl Tree {
    pub fn steps(&self) -> &[Step] {
        match self {
            Tree::Closed { steps, .. } | Tree::Split { steps, .. } => steps,
        }
    }

    fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Tree)) {
        f(self);
        if let Tree::Split { children, .. } = self {
            for (_, c) in children {
                c.visit(f);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub roots: Vec<Signed>,
    pub tree: Tree,
}

impl Trace {
    pub fn all_steps(&self) -> Vec<&Step> {
        let mut out = Vec::new();
        self.tree.visit(&mut |t| out.extend(t.steps()));
        out
    }

    /// Formulas the proof branched on by excluded middle.
    pub fn cut_formulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.tree.visit(&mut |t| {
            if let Tree::Split { kind: SplitKind::Cut, children, .. } = t {
                out.push(&children[0].0.formula);
            }
        });
        out
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.tree.visit(&mut |t| n += 1 + t.steps().len());
        n
    }

    /// One JSON record per line: roots, then steps, splits and closures in
    /// depth-first order, each tagged with its branch path.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .roots
            .iter()
            .map(|r| serde_json::json!({"kind": "root", "formula": r.to_string()}).to_string())
            .collect();
        fn walk(t: &Tree, path: &str, out: &mut Vec<String>) {
            for s in t.steps() {
                out.push(
                    serde_json::json!({
                        "kind": "step",
                        "path": path,
                        "rule": format!("{:?}", s.rule),
                        "premises": s.premises,
                        "term": s.term.as_ref().map(|t| t.to_string()),
                        "conclusions": s.conclusions.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    })
                    .to_string(),
                );
            }
            match t {
                Tree::Closed { closure, .. } => out.push(
                    serde_json::json!({"kind": "close", "path": path, "closure": format!("{closure:?}")}).to_string(),
                ),
                Tree::Split { kind, children, .. } => {
                    out.push(
                        serde_json::json!({
                            "kind": "split",
                            "path": path,
                            "split": format!("{kind:?}"),
                            "branches": children.iter().map(|(s, _)| s.to_string()).collect::<Vec<_>>(),
                        })
                        .to_string(),
                    );
                    for (i, (_, c)) in children.iter().enumerate() {
                        walk(c, &format!("{path}{i}"), out);
                    }
                }
            }
        }
        walk(&self.tree, "", &mut out);
        out
    }
}
