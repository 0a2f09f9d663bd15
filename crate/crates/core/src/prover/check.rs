//! Replays a proof tree without searching: every step is recomputed from
//! its premises and compared with what the trace claims.

use std::collections::BTreeSet;

use super::trace::{Closure, Rule, Signed, SplitKind, Step, Trace, Tree};
use super::ProofStatus;
use crate::formula::{alpha_eq, alpha_key_term, expand_keep_equality, pair, singleton, substitute, Formula, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("trace roots do not match the axioms and goal")]
    Roots,
    #[error("branch {path}: step {step}: {why}")]
    Step { path: String, step: usize, why: String },
    #[error("branch {path}: {why}")]
    Leaf { path: String, why: String },
    #[error("only proved or refuted results carry a checkable trace")]
    NoProof,
}

fn same(a: &Signed, b: &Signed) -> bool {
    a.sign == b.sign && alpha_eq(&a.formula, &b.formula)
}

fn same_term(a: &Term, b: &Term) -> bool {
    alpha_key_term(a) == alpha_key_term(b)
}

fn core_term(t: Term) -> Term {
    match expand_keep_equality(&Formula::Set(t)) {
        Formula::Set(t) => t,
        _ => unreachable!(),
    }
}

// z in t iff z in s, written out with not/and
fn extensional(z: &Term, t: &Term, s: &Term) -> Formula {
    let zt = Formula::Member(z.clone(), t.clone());
    let zs = Formula::Member(z.clone(), s.clone());
    Formula::and(
        Formula::not(Formula::and(zt.clone(), Formula::not(zs.clone()))),
        Formula::not(Formula::and(zs, Formula::not(zt))),
    )
}

fn alternatives(s: &Signed) -> Option<[Signed; 2]> {
    match (s.sign, &s.formula) {
        (false, Formula::And(a, b)) => Some([Signed::f((**a).clone()), Signed::f((**b).clone())]),
        (false, Formula::Member(t, Term::Abs { var, body, .. })) => {
            Some([Signed::f(Formula::Set(t.clone())), Signed::f(substitute(body, *var, t))])
        }
        _ => None,
    }
}

struct Replay {
    branch: Vec<Signed>,
    constants: BTreeSet<Var>,
}

impl Replay {
    fn push(&mut self, s: Signed) {
        self.constants.extend(s.formula.all_vars().into_iter().filter(|v| v.is_constant()));
        self.branch.push(s);
    }

    fn get(&self, i: usize) -> Result<&Signed, String> {
        self.branch.get(i).ok_or_else(|| format!("premise {i} is not on the branch"))
    }

    fn set_of(&self, i: usize, t: &Term) -> Result<(), String> {
        match self.get(i)? {
            Signed { sign: true, formula: Formula::Set(u) } if same_term(u, t) => Ok(()),
            other => Err(format!("premise `{other}` does not make `{t}` a set")),
        }
    }

    /// The conclusions a rule licenses from the given premises.
    fn licensed(&self, step: &Step) -> Result<Vec<Signed>, String> {
        let p = |k: usize| -> Result<&Signed, String> {
            let i = *step.premises.get(k).ok_or("missing premise")?;
            self.get(i)
        };
        let term = || step.term.as_ref().ok_or_else(|| "missing term".to_string());
        Ok(match step.rule {
            Rule::Alpha => match p(0)? {
                Signed { sign, formula: Formula::Not(a) } => vec![Signed { sign: !sign, formula: (**a).clone() }],
                Signed { sign: true, formula: Formula::And(a, b) } => {
                    vec![Signed::t((**a).clone()), Signed::t((**b).clone())]
                }
                other => return Err(format!("alpha does not apply to `{other}`")),
            },
            Rule::Unfold => match p(0)? {
                Signed { sign: true, formula: Formula::Member(t, Term::Abs { var, body, .. }) } => {
                    vec![Signed::t(Formula::Set(t.clone())), Signed::t(substitute(body, *var, t))]
                }
                other => return Err(format!("unfold does not apply to `{other}`")),
            },
            Rule::SetOfMember => match p(0)? {
                Signed { sign: true, formula: Formula::Member(t, _) } => vec![Signed::t(Formula::Set(t.clone()))],
                other => return Err(format!("`{other}` is not a membership")),
            },
            Rule::Delta | Rule::EqDelta => {
                let c = term()?;
                let Term::Var(v) = c else { return Err("witness is not a constant".into()) };
                if !v.is_constant() || self.constants.contains(v) {
                    return Err(format!("witness `{c}` is not fresh"));
                }
                let body = match (step.rule, p(0)?) {
                    (Rule::Delta, Signed { sign: false, formula: Formula::ForAll(w, a) }) => substitute(a, *w, c),
                    (Rule::EqDelta, Signed { sign: false, formula: Formula::Equal(t, s) }) => extensional(c, t, s),
                    (_, other) => return Err(format!("delta does not apply to `{other}`")),
                };
                vec![Signed::t(Formula::Set(c.clone())), Signed::f(body)]
            }
            Rule::Gamma | Rule::EqGamma => {
                let t = term()?;
                self.set_of(*step.premises.get(1).ok_or("missing premise")?, t)?;
                let body = match (step.rule, p(0)?) {
                    (Rule::Gamma, Signed { sign: true, formula: Formula::ForAll(w, a) }) => substitute(a, *w, t),
                    (Rule::EqGamma, Signed { sign: true, formula: Formula::Equal(l, r) }) => extensional(t, l, r),
                    (_, other) => return Err(format!("gamma does not apply to `{other}`")),
                };
                vec![Signed::t(body)]
            }
            Rule::Singleton => match p(0)? {
                Signed { sign: true, formula: Formula::Set(a) } => {
                    vec![Signed::t(Formula::Set(core_term(singleton(a))))]
                }
                other => return Err(format!("`{other}` is not a sethood fact")),
            },
            Rule::Pair => match (p(0)?, p(1)?) {
                (Signed { sign: true, formula: Formula::Set(a) }, Signed { sign: true, formula: Formula::Set(b) }) => {
                    vec![Signed::t(Formula::Set(core_term(pair(a, b))))]
                }
                _ => return Err("pair needs two sethood facts".into()),
            },
            Rule::BetaUnit => {
                let [d1, d2] = alternatives(p(0)?).ok_or("premise does not branch")?;
                let refuted = p(1)?;
                if same(refuted, &d1.flip()) {
                    vec![d2]
                } else if same(refuted, &d2.flip()) {
                    vec![d1]
                } else {
                    return Err(format!("`{refuted}` refutes neither alternative"));
                }
            }
        })
    }

    fn step(&mut self, step: &Step) -> Result<(), String> {
        let licensed = self.licensed(step)?;
        if step.conclusions.is_empty() {
            return Err("step concludes nothing".into());
        }
        for c in &step.conclusions {
            if !licensed.iter().any(|l| same(l, c)) {
                return Err(format!("`{c}` does not follow"));
            }
        }
        for c in &step.conclusions {
            self.push(c.clone());
        }
        Ok(())
    }

    fn closes(&self, closure: &Closure) -> Result<(), String> {
        match *closure {
            Closure::Complement(i, j) => {
                let (a, b) = (self.get(i)?, self.get(j)?);
                if a.sign != b.sign && alpha_eq(&a.formula, &b.formula) {
                    return Ok(());
                }
                Err(format!("`{a}` and `{b}` are not complementary"))
            }
            Closure::Falsum(i) => match self.get(i)? {
                Signed { sign: true, formula: Formula::Falsum } => Ok(()),
                other => Err(format!("`{other}` is not T falsum")),
            },
            Closure::Verum(i) => match self.get(i)? {
                Signed { sign: false, formula: Formula::Verum } => Ok(()),
                other => Err(format!("`{other}` is not F verum")),
            },
            Closure::Reflexive(i) => match self.get(i)? {
                Signed { sign: false, formula: Formula::Equal(a, b) } if same_term(a, b) => Ok(()),
                other => Err(format!("`{other}` is not a denied identity")),
            },
        }
    }

    fn tree(&mut self, t: &Tree, path: &str) -> Result<(), TraceError> {
        for (k, s) in t.steps().iter().enumerate() {
            self.step(s).map_err(|why| TraceError::Step { path: path.to_string(), step: k, why })?;
        }
        let leaf = |why: String| TraceError::Leaf { path: path.to_string(), why };
        match t {
            Tree::Closed { closure, .. } => self.closes(closure).map_err(leaf),
            Tree::Split { kind, children, .. } => {
                if children.len() != 2 {
                    return Err(leaf("a split has exactly two branches".into()));
                }
                let expected = match kind {
                    SplitKind::Beta { premise } => {
                        let p = self.get(*premise).map_err(leaf)?;
                        alternatives(p).ok_or_else(|| leaf(format!("`{p}` does not branch")))?
                    }
                    SplitKind::Cut => {
                        let f = &children[0].0.formula;
                        if !f.is_closed() {
                            return Err(leaf("cut formula is not closed".into()));
                        }
                        [Signed::t(f.clone()), Signed::f(f.clone())]
                    }
                };
                for (i, ((side, child), want)) in children.iter().zip(expected).enumerate() {
                    if !same(side, &want) {
                        return Err(leaf(format!("branch {i} starts with `{side}`, expected `{want}`")));
                    }
                    let mut sub = Replay { branch: self.branch.clone(), constants: self.constants.clone() };
                    sub.push(side.clone());
                    sub.tree(child, &format!("{path}{i}"))?;
                }
                Ok(())
            }
        }
    }
}

/// Re-derive every step of `trace` as a proof (or refutation) of `goal`
/// from `axioms`.
pub fn check_trace(axioms: &[Formula], goal: &Formula, status: ProofStatus, trace: &Trace) -> Result<(), TraceError> {
    if status == ProofStatus::OutOfBudget {
        return Err(TraceError::NoProof);
    }
    let expected = super::roots(axioms, goal, status);
    if expected.len() != trace.roots.len() || expected.iter().zip(&trace.roots).any(|(a, b)| !same(a, b)) {
        return Err(TraceError::Roots);
    }
    let mut replay = Replay { branch: Vec::new(), constants: BTreeSet::new() };
    for r in &trace.roots {
        replay.push(r.clone());
    }
    replay.tree(&trace.tree, "")
}
