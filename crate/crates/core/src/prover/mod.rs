//! Budgeted proof search over the core language.
//!
//! The calculus is a ground signed tableau. Quantifiers range over sets:
//! `forall` is instantiated only with terms the branch already knows to be
//! sets, and refuting a `forall` introduces a fresh witness constant that is
//! a set. Besides the connective rules, the frame supplies comprehension
//! unfolding `t in {z: A}  <=>  set(t) and A(t)`, `t in s => set(t)`,
//! extensionality unfolded one instance at a time, and sethood of singletons
//! and pairs of sets. Cuts on `t in s` between known sets give the search
//! the diagonal arguments behind Russell-style paradoxes.
//!
//! Search is iterative deepening on the number of quantifier instances and
//! cuts a single branch may use; budgets count rule applications, so results
//! are reproducible and independent of the machine.

mod check;
mod frame;
mod search;
mod trace;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use check::{check_trace, TraceError};
pub use frame::{eq_instance, pair_core, singleton_core};
pub use trace::{Closure, Rule, Signed, SplitKind, Step, Trace, Tree};

use crate::formula::{expand_keep_equality, substitute, Formula, Term, Var};
use search::{Outcome, Search};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofBudget {
    /// Rule applications across the whole search.
    pub max_steps: u64,
    /// How many extensionality unfoldings may be stacked on one equality.
    pub max_equality_depth: u32,
    /// Terms larger than this never become quantifier instances.
    pub max_term_size: usize,
}

impl Default for ProofBudget {
    fn default() -> ProofBudget {
        ProofBudget { max_steps: 50_000, max_equality_depth: 4, max_term_size: 200 }
    }
}

impl ProofBudget {
    pub fn with_steps(max_steps: u64) -> ProofBudget {
        ProofBudget { max_steps, ..ProofBudget::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofStatus {
    /// The goal follows from the axioms.
    Proved,
    /// The negation of the goal follows from the axioms.
    Refuted,
    OutOfBudget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub steps_used: u64,
    /// Set on `OutOfBudget` when the search ran dry before the budget did:
    /// no amount of extra steps would change the outcome.
    pub saturated: bool,
    pub trace: Option<Trace>,
    /// Frame facts about singletons and pairs the proof relied on, as closed
    /// formulas. Finite models need not satisfy them.
    pub frame_assumptions: Vec<Formula>,
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        self.status == ProofStatus::Proved
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    NegatedGoal,
    Goal,
}

/// Roots of the tableau for one side: the axioms asserted, the goal denied
/// (or asserted, when looking for a refutation). Free variables are shared
/// across the sequent and become fixed sets `c0, c1, ...` past any witness
/// already present, each with a `set(c)` root in front.
pub fn roots(axioms: &[Formula], goal: &Formula, status: ProofStatus) -> Vec<Signed> {
    let mut free = BTreeSet::new();
    let mut next = 0;
    for f in axioms.iter().chain([goal]) {
        free.extend(f.free_vars().into_iter().filter(|v| !v.is_constant()));
        for v in f.all_vars().into_iter().filter(|v| v.is_constant()) {
            next = next.max(v.index() - crate::formula::CONST_BASE + 1);
        }
    }
    let consts: Vec<(Var, Term)> =
        free.into_iter().zip(next..).map(|(v, k)| (v, Term::Var(Var::constant(k)))).collect();
    let ground = |f: &Formula| {
        let f = consts.iter().fold(f.clone(), |f, (v, c)| substitute(&f, *v, c));
        expand_keep_equality(&f)
    };
    let mut out: Vec<Signed> = consts.iter().map(|(_, c)| Signed::t(Formula::Set(c.clone()))).collect();
    out.extend(axioms.iter().map(|a| Signed::t(ground(a))));
    let g = ground(goal);
    out.push(if status == ProofStatus::Refuted { Signed::t(g) } else { Signed::f(g) });
    // a branch holds one formula per alpha-class and sign, so the root list does too
    let mut seen = std::collections::HashSet::new();
    out.retain(|s| seen.insert((s.sign, crate::formula::alpha_key(&s.formula))));
    out
}

/// Try to derive `goal` from `axioms`, alternating with attempts to derive
/// its negation, at growing per-branch allowances.
pub fn prove(axioms: &[Formula], goal: &Formula, budget: &ProofBudget) -> ProofResult {
    run(axioms, goal, budget, true)
}

/// Like [`prove`] but never looks for a refutation: the whole budget goes
/// to deriving `goal`.
pub fn derive(axioms: &[Formula], goal: &Formula, budget: &ProofBudget) -> ProofResult {
    run(axioms, goal, budget, false)
}

fn run(axioms: &[Formula], goal: &Formula, budget: &ProofBudget, refute: bool) -> ProofResult {
    // branches are explored recursively; deep searches need more than the
    // default thread stack
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(scope, || prove_on_this_thread(axioms, goal, budget, refute))
            .expect("spawn prover thread")
            .join()
            .expect("prover thread panicked")
    })
}

const STACK_BYTES: usize = 1 << 30;

fn prove_on_this_thread(axioms: &[Formula], goal: &Formula, budget: &ProofBudget, refute: bool) -> ProofResult {
    // (side, saturated)
    let mut sides = vec![(Side::NegatedGoal, false)];
    if refute && *goal != Formula::Falsum {
        sides.push((Side::Goal, false));
    }
    let mut search = Search { budget, steps: 0, limit: 1 };
    loop {
        for (side, saturated) in sides.iter_mut().filter(|(_, s)| !*s) {
            let status = match *side {
                Side::NegatedGoal => ProofStatus::Proved,
                Side::Goal => ProofStatus::Refuted,
            };
            let roots = roots(axioms, goal, status);
            match search.run(&roots) {
                Outcome::Closed(tree) => {
                    let trace = Trace { roots, tree };
                    let frame_assumptions = frame_assumptions(&trace);
                    return ProofResult {
                        status,
                        steps_used: search.steps,
                        saturated: false,
                        trace: Some(trace),
                        frame_assumptions,
                    };
                }
                Outcome::Open { limited } => *saturated = !limited,
                Outcome::Abort => return out_of_budget(budget, false),
            }
        }
        if sides.iter().all(|(_, s)| *s) {
            return out_of_budget(budget, true);
        }
        search.limit = search.limit.saturating_mul(2);
    }
}

fn out_of_budget(budget: &ProofBudget, saturated: bool) -> ProofResult {
    ProofResult {
        status: ProofStatus::OutOfBudget,
        steps_used: budget.max_steps,
        saturated,
        trace: None,
        frame_assumptions: Vec::new(),
    }
}

/// Try to refute `set({x: a})` in the bare frame.
pub fn refute_sethood(a: &Formula, budget: &ProofBudget) -> ProofResult {
    let c = Term::abs(Var::X, a.clone());
    derive(&[Formula::Set(c)], &Formula::Falsum, budget)
}

fn witness_free(t: &Term) -> bool {
    t.is_closed() && !t.all_vars().iter().any(|v| v.is_constant())
}

/// Closed frame facts a trace used. Instances on closed, witness-free terms
/// are kept as they are; anything mentioning a witness is covered by the
/// universal form of the rule.
fn frame_assumptions(trace: &Trace) -> Vec<Formula> {
    let mut out = BTreeSet::new();
    let x1 = Term::Var(Var(1));
    let x2 = Term::Var(Var(2));
    for step in trace.all_steps() {
        let Some(Signed { formula: Formula::Set(target), .. }) = step.conclusions.first() else { continue };
        match step.rule {
            Rule::Singleton if witness_free(target) => {
                let Some(frame::Parts::Single(a)) = frame::parts(target) else { continue };
                out.insert(Formula::implies(Formula::Set(a), Formula::Set(target.clone())));
            }
            Rule::Singleton => {
                out.insert(Formula::forall(Var(1), Formula::Set(singleton_core(&x1))));
            }
            Rule::Pair if witness_free(target) => {
                let Some(frame::Parts::Pair(a, b)) = frame::parts(target) else { continue };
                out.insert(Formula::implies(
                    Formula::and(Formula::Set(a), Formula::Set(b)),
                    Formula::Set(target.clone()),
                ));
            }
            Rule::Pair => {
                out.insert(Formula::forall(
                    Var(1),
                    Formula::forall(
                        Var(2),
                        Formula::implies(
                            Formula::and(Formula::Set(x1.clone()), Formula::Set(x2.clone())),
                            Formula::Set(pair_core(&x1, &x2)),
                        ),
                    ),
                ));
            }
            _ => {}
        }
    }
    out.into_iter().collect()
}
